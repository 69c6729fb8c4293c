#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smirl/cli/metrics.hpp"
#include "smirl/core/archive.hpp"

namespace smirl::cli {

inline constexpr const char* kCheckpointMagic = "SMIRLCKPT";
inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Archive plus the resolved config text it was trained with.
struct Checkpoint {
  std::string config_yaml;
  Archive archive;
};

/// Text layout:
///   SMIRLCKPT 1
///   meta <n>            then n lines "<key>\t<value>"
///   config <n>          then n lines of YAML
///   array <name> <len>  then the values, 8 per line
///   ...
///   end
inline void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "meta " << ck.archive.meta.size() << '\n';
  for (const auto& [k, v] : ck.archive.meta) {
    if (k.find_first_of("\t\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw CheckpointError("checkpoint meta entries must be single-line");
    }
    out << k << '\t' << v << '\n';
  }
  std::vector<std::string> lines;
  {
    std::istringstream ss(ck.config_yaml);
    std::string l;
    while (std::getline(ss, l)) lines.push_back(l);
  }
  out << "config " << lines.size() << '\n';
  for (const auto& l : lines) out << l << '\n';
  for (const auto& [name, values] : ck.archive.arrays) {
    out << "array " << name << ' ' << values.size() << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << format_real(values[i]) << ((i % 8 == 7 || i + 1 == values.size()) ? '\n' : ' ');
    }
  }
  out << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& in) {
  int lineno = 0;
  std::string line;
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) throw CheckpointError("checkpoint truncated after line " + std::to_string(lineno));
    ++lineno;
    return line;
  };
  auto fail = [&](const std::string& msg) { throw CheckpointError("checkpoint line " + std::to_string(lineno) + ": " + msg); };

  Checkpoint ck;
  {
    std::istringstream h(next());
    std::string magic;
    int version = 0;
    if (!(h >> magic >> version) || magic != kCheckpointMagic) fail("not a checkpoint file");
    if (version != kCheckpointVersion) {
      fail("unsupported checkpoint version " + std::to_string(version) + " (this build reads version " +
           std::to_string(kCheckpointVersion) + ")");
    }
  }
  std::size_t n = 0;
  {
    std::istringstream h(next());
    std::string tag;
    if (!(h >> tag >> n) || tag != "meta") fail("expected 'meta <count>'");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& l = next();
    const auto tab = l.find('\t');
    if (tab == std::string::npos) fail("meta entry without a tab");
    ck.archive.meta[l.substr(0, tab)] = l.substr(tab + 1);
  }
  {
    std::istringstream h(next());
    std::string tag;
    if (!(h >> tag >> n) || tag != "config") fail("expected 'config <lines>'");
  }
  for (std::size_t i = 0; i < n; ++i) ck.config_yaml += next() + "\n";
  while (true) {
    std::istringstream h(next());
    std::string tag;
    h >> tag;
    if (tag == "end") break;
    std::string name;
    std::size_t len = 0;
    if (tag != "array" || !(h >> name >> len)) fail("expected 'array <name> <length>' or 'end'");
    std::vector<double> values;
    values.reserve(len);
    while (values.size() < len) {
      const std::string& l = next();
      const char* p = l.data();
      const char* e = l.data() + l.size();
      while (p < e) {
        while (p < e && *p == ' ') ++p;
        if (p == e) break;
        double x = 0.0;
        const auto res = std::from_chars(p, e, x);
        if (res.ec != std::errc()) fail("bad number in array '" + name + "'");
        values.push_back(x);
        p = res.ptr;
      }
    }
    if (values.size() != len) fail("array '" + name + "' has more values than declared");
    ck.archive.arrays[name] = std::move(values);
  }
  return ck;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  write_checkpoint(out, ck);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace smirl::cli

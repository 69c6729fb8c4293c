#pragma once

#include <map>
#include <string>
#include <vector>

#include "smirl/core/types.hpp"

namespace smirl {

/// Named flat real arrays plus string metadata; the in-memory form of a
/// checkpoint. Components write their state here and read it back.
struct Archive {
  std::map<std::string, std::string> meta;
  std::map<std::string, std::vector<double>> arrays;

  const std::vector<double>& array(const std::string& name) const {
    auto it = arrays.find(name);
    if (it == arrays.end()) throw ContractError("checkpoint is missing array '" + name + "'");
    return it->second;
  }
  const std::string& get(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw ContractError("checkpoint is missing key '" + key + "'");
    return it->second;
  }
  bool has_array(const std::string& name) const { return arrays.count(name) != 0; }
};

}  // namespace smirl

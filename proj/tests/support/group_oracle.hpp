// SPDX-License-Identifier: MIT
// Reference grouping over bags of records.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dbx/data.hpp"

namespace testing {

// Groups in first-occurrence order of key tuples, members in input order.
inline dbx::Data group_oracle(const std::string& g, const std::vector<std::string>& keys, const dbx::Data& in) {
  std::vector<std::pair<dbx::Fields, std::vector<dbx::Data>>> groups;
  for (auto& row : in.items()) {
    dbx::Fields k;
    for (auto& l : keys) k.emplace_back(l, row.get(l));
    auto it = std::find_if(groups.begin(), groups.end(), [&](auto& p) { return p.first == k; });
    if (it == groups.end()) groups.emplace_back(k, std::vector<dbx::Data>{row});
    else it->second.push_back(row);
  }
  std::vector<dbx::Data> out;
  for (auto& [k, rows] : groups) {
    dbx::Fields fs = k;
    fs.emplace_back(g, dbx::Data::bag(rows));
    out.push_back(dbx::Data::record(fs));
  }
  return dbx::Data::bag(out);
}

}  // namespace testing

// SPDX-License-Identifier: MIT
// Random nested data for property tests.
#pragma once

#include <random>
#include <string>

#include "dbx/data.hpp"

namespace testing {

class DataGen {
 public:
  explicit DataGen(std::uint64_t seed) : rng_(seed) {}

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  dbx::Value scalar() {
    switch (pick(0, 5)) {
      case 0: return dbx::Value(pick(0, 1) == 1);
      case 1: return dbx::Value(pick(-3, 3));
      case 2: return dbx::Value(dbx::BigInt(dbx::BigInt("123456789012345678901234567890") * pick(-1, 1)));
      case 3: return dbx::Value(pick(-8, 8) / 4.0);
      case 4: return dbx::Value(std::string(1, char('a' + pick(0, 2))));
      default: return dbx::Value(std::string(pick(0, 1) ? "$left" : "x\"y"));
    }
  }

  // Depth counts constructor nesting; depth 1 is a leaf.
  dbx::Data data(int depth) {
    int k = depth <= 1 ? pick(0, 1) : pick(0, 5);
    switch (k) {
      case 0: return dbx::Data::unit();
      case 1: return dbx::Data::atom(scalar());
      case 2: {
        dbx::Fields fs;
        int n = pick(0, 3);
        for (int i = 0; i < n; ++i) {
          std::string l = std::string(1, char('a' + i)) + (pick(0, 3) == 0 ? ".x" : "");
          fs.emplace_back(l, data(depth - 1));
        }
        return dbx::Data::record(std::move(fs));
      }
      case 3: {
        std::vector<dbx::Data> xs;
        int n = pick(0, 3);
        for (int i = 0; i < n; ++i) xs.push_back(data(depth - 1));
        return dbx::Data::bag(std::move(xs));
      }
      case 4: return dbx::Data::left(data(depth - 1));
      default: return dbx::Data::right(data(depth - 1));
    }
  }

  // Bag of flat records over labels k1, k2, v with small value domains.
  dbx::Data flat_bag() {
    std::vector<dbx::Data> rows;
    int n = pick(0, 8);
    for (int i = 0; i < n; ++i) {
      dbx::Fields fs;
      fs.emplace_back("k1", dbx::Data::atom(dbx::Value(pick(0, 2))));
      fs.emplace_back("k2", pick(0, 3) == 0 ? dbx::null_data() : dbx::left_atom(dbx::Value(pick(0, 1))));
      fs.emplace_back("v", dbx::Data::atom(dbx::Value(pick(-5, 5))));
      rows.push_back(dbx::Data::record(std::move(fs)));
    }
    return dbx::Data::bag(std::move(rows));
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing

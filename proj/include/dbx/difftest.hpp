// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dbx/fuzz.hpp"
#include "dbx/nrae.hpp"
#include "dbx/pipeline.hpp"

namespace dbx::difftest {

struct Options {
  std::uint64_t seed = 42;
  int cases = 1000;
  int threads = 0;  // 0: hardware concurrency
  int envs_per_subquery = 2;
  bool shrink = true;
  fuzz::Config fuzz;
  // Replaceable for mutation tests.
  std::function<nra::Q(const nra::Q&)> optimizer = [](const nra::Q& q) { return nra::optimize(q); };
  std::function<void(pipeline::Artifacts&)> tamper;
};

enum class Outcome { Pass, Rejected, Fail };

struct CaseResult {
  int index = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::Pass;
  std::string check;  // failing check, e.g. "stages"
  std::string pair;   // diverging pair, e.g. "nnrs/no-shadow"
  std::string detail;
  std::string sql;
  std::string instance;
  std::string min_sql;
  std::string min_instance;
  int shrink_steps = 0;
  int subqueries = 0;  // subqueries checked under random environments
  std::string features;
};

struct Report {
  std::uint64_t seed = 0;
  int cases = 0;
  int passed = 0;
  int rejected = 0;
  int failed = 0;
  int env_checks = 0;
  double seconds = 0;
  std::vector<CaseResult> failures;
  // Feature counts over accepted cases: grouped, having, exists, in, quant,
  // setop, nulls.
  std::vector<std::pair<std::string, int>> features;

  std::string to_json() const;
};

// Checks one case; no shrinking.
CaseResult check_case(const fuzz::Case& c, const Options& opts);

Report run(const Options& opts);

// Random environment matching a static shape; grouped slices hold 1-3 tuples
// agreeing on their grouping attributes.
alg::Env random_env(const alg::StaticEnv& shape, const Schema& schema, std::mt19937_64& rng);

}  // namespace dbx::difftest

// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dbx/instance.hpp"
#include "dbx/sqlalg.hpp"
#include "dbx/value.hpp"

namespace dbx::fuzz {

struct FExpr;
struct FFormula;
struct FQuery;
using FE = std::shared_ptr<const FExpr>;
using FF = std::shared_ptr<const FFormula>;
using FQ = std::shared_ptr<const FQuery>;

struct FExpr {
  enum class Kind { Col, Const, Arith, Agg, CountStar } kind;
  std::string col;  // qualified as alias.column
  Value value;
  char op = '+';
  alg::Agg agg = alg::Agg::Sum;
  std::vector<FE> args;
};

struct FFormula {
  enum class Kind { Cmp, And, Or, Not, Exists, In, Quant } kind;
  std::string op;  // Cmp, Quant
  bool all = false;
  std::vector<FE> args;
  FF a, b;
  FQ q;
};

struct FFrom {
  std::string table;  // empty for a subquery
  FQ sub;
  std::string alias;
};

struct FQuery {
  enum class Kind { Select, Union, Except, Intersect } kind = Kind::Select;
  bool all = false;
  FQ lhs, rhs;
  std::vector<std::pair<FE, std::string>> items;
  std::vector<FFrom> from;
  FF where;
  std::vector<FE> group;
  FF having;
};

struct Config {
  int max_depth = 3;   // query nesting
  int max_rows = 4;
  double p_grouped = 0.30;
  double p_hard = 0.30;  // exists, in, all, any among formulas
  double p_null = 0.25;
};

// Three tables t1(a1, b1), t2(a2, b2), t3(a3, b3) with column types drawn per
// case; rows are lists of column values in schema order.
struct Case {
  Schema schema;
  FQ query;
  std::vector<std::vector<std::vector<Value>>> rows;  // per table

  std::string ddl() const;
  std::string sql() const;  // ddl + query
  std::string query_sql() const;
  std::string instance_json() const;
  Instance instance() const;
};

Case generate(std::uint64_t seed, const Config& cfg = {});

// Per-case seed derived from a run seed.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index);

std::string to_sql(const FQuery& q);

// Node count plus row count; every shrink candidate is strictly smaller.
std::size_t size(const Case& c);
std::vector<Case> shrink_candidates(const Case& c);
// Greedy: takes the first candidate that still fails, until none does.
Case shrink(const Case& c, const std::function<bool(const Case&)>& still_fails,
            int* steps = nullptr);

}  // namespace dbx::fuzz

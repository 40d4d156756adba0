// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dbx/data.hpp"
#include "dbx/ops.hpp"
#include "dbx/value.hpp"

namespace dbx::nra {

struct Node;
using Q = std::shared_ptr<const Node>;

// Nested relational algebra with environment.
//
//   Comp(a, b)    a o b, runs b then a on its result
//   Map(a, b)     chi<a>(b)
//   Select(a, b)  sigma<a>(b)
//   Product(a, b) a x b
//   Default(a, b) a ?? b
//   Either(a, b)  either<a><b>
//   AppEnv(a, b)  a @e b, runs a with b's result as environment
//   MapEnv(a)     chiE<a>
//   GroupBy       group_by[label; labels](a)
//   Table         field of the instance record handed to eval
struct Node {
  enum class Kind {
    Const,
    In,
    Env,
    Unary,
    Binary,
    Comp,
    Map,
    Select,
    Product,
    Default,
    Either,
    AppEnv,
    MapEnv,
    GroupBy,
    Table,
  } kind;
  Data value;
  UnaryOp uop{UnaryKind::Not, {}, {}};
  BinaryKind bop = BinaryKind::Equal;
  Q a, b;
  std::string label;                // GroupBy group label, Table name
  std::vector<std::string> labels;  // GroupBy keys
};

Q cst(Data d);
Q in();
Q env();
Q unary(UnaryOp op, Q a);
Q binary(BinaryKind op, Q a, Q b);
Q comp(Q after, Q before);
Q map(Q body, Q over);
Q select(Q pred, Q over);
Q product(Q a, Q b);
Q default_(Q a, Q b);
Q either(Q on_left, Q on_right);
Q app_env(Q body, Q new_env);
Q map_env(Q body);
Q group_by(std::string g, std::vector<std::string> keys, Q over);
Q table(std::string name);

// Shorthands over unary/binary.
Q dot(Q a, std::string label);
Q rec(std::string label, Q a);
Q bag(Q a);
Q left(Q a);
Q right(Q a);
Q concat(Q a, Q b);  // record concatenation

bool equal(const Node& a, const Node& b);
std::size_t size(const Node& q);

class NraError : public EvalError {
 public:
  using EvalError::EvalError;
};

// rho |- q @ d, with tables read from db.
Data eval(const Q& q, const Data& rho, const Data& d, const Data& db);
// Top-level form: the instance record is both the input and the table source.
Data eval_top(const Q& q, const Data& rho, const Data& instance);

std::string print(const Node& q);

// The pure NRAe definition of group_by in terms of map, select, distinct and
// the environment.
Q desugar_group_by(const std::string& g, const std::vector<std::string>& keys, Q over);
// Replaces every GroupBy node by its desugared form.
Q desugar_all(const Q& q);

// Rewrites to a fixpoint, at most 100 passes.
Q optimize(const Q& q);

// A single bottom-up pass of one named rule, exposed for rule-by-rule tests.
enum class Rule {
  EitherLeft,   // either(a, b) o left(q)  ->  a o q
  EitherRight,  // either(a, b) o right(q) ->  b o q
  CompIn,       // q o In -> q, In o q -> q
  MapIn,        // chi<In>(q) -> q
  SelectTrue,   // sigma<true>(q) -> q
  FlattenBag,   // flatten(bag(q)) -> q
};
Q rewrite_once(const Q& q, Rule r);
std::vector<Rule> all_rules();

}  // namespace dbx::nra

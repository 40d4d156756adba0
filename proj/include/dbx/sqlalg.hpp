// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dbx/instance.hpp"
#include "dbx/value.hpp"

namespace dbx::alg {

enum class Fn { Add, Sub, Mul, Div, Neg, Concat };
enum class Agg { Sum, Count, CountStar, Avg, Min, Max };
enum class Pred { Eq, Ne, Lt, Le, Gt, Ge };

struct Expr;
struct Formula;
struct Query;
using ExprP = std::shared_ptr<const Expr>;
using FormulaP = std::shared_ptr<const Formula>;
using QueryP = std::shared_ptr<const Query>;

struct Expr {
  enum class Kind { Const, Attr, Fn, Agg } kind;
  Value value;                // Const
  std::string attr;           // Attr
  Fn fn = Fn::Add;            // Fn
  Agg agg = Agg::Sum;         // Agg
  std::vector<ExprP> args;    // Fn arguments, Agg argument (one)
};

struct Formula {
  enum class Kind { True, And, Or, Not, Pred, Quant, In, Exists } kind;
  FormulaP lhs, rhs;               // And/Or use both, Not uses lhs
  Pred pred = Pred::Eq;            // Pred, Quant
  bool all = false;                // Quant: all vs any
  std::vector<ExprP> args;         // Pred, Quant, In
  std::vector<std::string> names;  // In: attribute names paired with args
  QueryP query;                    // Quant, In, Exists
};

struct Select {
  ExprP expr;
  std::string name;
};

struct Query {
  enum class Kind { Empty, Table, Union, Inter, Except, Join, Project, Sigma, Gamma } kind;
  std::string table;             // Table
  QueryP lhs, rhs;               // binary ops; lhs is the input of unary ops
  std::vector<Select> items;     // Project, Gamma
  std::vector<ExprP> group;      // Gamma
  FormulaP formula;              // Sigma, Gamma (having)
};

// Builders.
ExprP cst(Value v);
ExprP attr(std::string a);
ExprP fn(Fn f, std::vector<ExprP> args);
ExprP agg(Agg a, ExprP arg);
ExprP count_star();
FormulaP f_true();
FormulaP f_and(FormulaP a, FormulaP b);
FormulaP f_or(FormulaP a, FormulaP b);
FormulaP f_not(FormulaP a);
FormulaP f_pred(Pred p, ExprP a, ExprP b);
FormulaP f_quant(Pred p, bool all, ExprP a, QueryP q);
FormulaP f_in(std::vector<ExprP> args, std::vector<std::string> names, QueryP q);
FormulaP f_exists(QueryP q);
QueryP q_empty();
QueryP q_table(std::string name);
QueryP q_set(Query::Kind k, QueryP a, QueryP b);
QueryP q_join(QueryP a, QueryP b);
QueryP q_project(std::vector<Select> items, QueryP q);
QueryP q_sigma(FormulaP f, QueryP q);
QueryP q_gamma(std::vector<Select> items, std::vector<ExprP> group, FormulaP f,
               QueryP q);

bool equal(const Expr& a, const Expr& b);
bool equal(const Formula& a, const Formula& b);
bool equal(const Query& a, const Query& b);

// Attribute names carried by result tuples, in a fixed order.
std::vector<std::string> sort_of(const Query& q, const Schema& schema);

// ASCII notation: pi[...](Q), sigma[f](Q), gamma[items; group; f](Q), ...
std::string print(const Query& q);
std::string print(const Formula& f);
std::string print(const Expr& e);
QueryP parse_query(const std::string& text);

// Three-valued logic.
enum class Bool3 { False, Unknown, True };
Bool3 and3(Bool3 a, Bool3 b);
Bool3 or3(Bool3 a, Bool3 b);
Bool3 not3(Bool3 a);
const char* to_string(Bool3 b);

// One level of the evaluation environment.
struct Slice {
  std::vector<std::string> attrs;  // A
  std::vector<ExprP> group;        // G
  std::vector<Tuple> tuples;       // T
  bool grouped = false;            // introduced by gamma
};

// Persistent stack of slices, top first.
class Env {
 public:
  Env() = default;
  Env push(Slice s) const;
  bool empty() const { return !node_; }
  const Slice& top() const;
  Env tail() const;
  std::size_t depth() const;

 private:
  struct Node {
    Slice slice;
    std::shared_ptr<const Node> next;
  };
  explicit Env(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Bag eval_query(const Query& q, const Env& env, const Instance& i);
Bool3 eval_formula(const Formula& f, const Env& env, const Instance& i);
Value eval_expr(const Expr& e, const Env& env, const Instance& i);

// Whether e is built from constants and members of the given expression set.
bool is_built_upon(const std::vector<ExprP>& g, const std::set<std::string>& attrs,
                   const Expr& e);
// Depth of the slice find_eval_env selects (0 = top), or -1 when undefined.
int find_eval_env(const Env& env, const Expr& e);

// Static shape of an environment: attributes and grouping expressions.
struct StaticSlice {
  std::vector<std::string> attrs;
  std::vector<ExprP> group;
  bool grouped = false;
  // Column types parallel to attrs; empty or nullopt means unknown.
  std::vector<std::optional<ColumnType>> types;
};
using StaticEnv = std::vector<StaticSlice>;  // top first

StaticEnv static_of(const Env& env);
int find_eval_env_static(const StaticEnv& env, const Expr& e);

class WellFormedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TypedSort = std::vector<std::pair<std::string, std::optional<ColumnType>>>;

// Checks attribute resolution, aggregate placement, sorts and operand types
// under a static environment; throws WellFormedError. Returns the typed sort
// of q (nullopt for columns that are always null).
TypedSort check_well_formed(const Query& q, const StaticEnv& env, const Schema& schema);

}  // namespace dbx::alg

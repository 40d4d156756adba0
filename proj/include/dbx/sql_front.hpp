// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbx/instance.hpp"
#include "dbx/sqlalg.hpp"
#include "dbx/value.hpp"

namespace dbx::sql {

struct Pos {
  int line = 1;
  int col = 1;
};

class SqlError : public std::runtime_error {
 public:
  SqlError(const std::string& msg, Pos p);
  Pos pos;
};

// distinct, order by, scalar subqueries and the like.
class UnsupportedFeature : public SqlError {
 public:
  using SqlError::SqlError;
};

struct SQuery;
using SQueryP = std::shared_ptr<SQuery>;

struct SExpr;
using SExprP = std::shared_ptr<SExpr>;

struct SExpr {
  enum class Kind { Const, Column, Binary, Neg, Agg } kind;
  Pos pos;
  Value value;                    // Const
  std::string qualifier, name;    // Column; qualifier may be empty
  alg::Fn fn = alg::Fn::Add;      // Binary
  alg::Agg agg = alg::Agg::Sum;   // Agg
  std::vector<SExprP> args;
};

struct SFormula;
using SFormulaP = std::shared_ptr<SFormula>;

struct SFormula {
  enum class Kind { True, False, And, Or, Not, Cmp, Quant, In, Exists } kind;
  Pos pos;
  SFormulaP lhs, rhs;
  alg::Pred pred = alg::Pred::Eq;
  bool all = false;
  std::vector<SExprP> args;  // Cmp: two; Quant: one; In: the row
  SQueryP query;
};

struct SelectItem {
  SExprP expr;
  std::string alias;  // empty when absent
};

struct FromItem {
  Pos pos;
  std::string table;             // base table, or empty for a subquery
  SQueryP subquery;
  std::string alias;             // user alias, then the generated one
  std::vector<std::string> columns;  // explicit column aliases
  int ordinal = -1;              // source-order index, drives t0, t1, ...
};

struct SQuery {
  enum class Kind { Select, Union, Intersect, Except } kind = Kind::Select;
  Pos pos;
  // Select
  bool star = false;
  std::vector<SelectItem> items;
  std::vector<FromItem> from;
  SFormulaP where;                  // null when absent
  std::vector<SExprP> group_by;
  bool has_group_by = false;
  SFormulaP having;                 // null when absent
  // Set operations
  bool all = false;
  SQueryP lhs, rhs;
};

struct CreateTable {
  Pos pos;
  TableSchema table;
};

struct Statement {
  std::optional<CreateTable> create;
  SQueryP query;
};

std::vector<Statement> parse(const std::string& sql_text);

// Schema declared by the create-table statements.
Schema schema_of(const std::vector<Statement>& stmts);

// The single query of a statement list; SqlError otherwise.
SQueryP query_of(const std::vector<Statement>& stmts);

// Resolves names against the schema, assigns fresh aliases t0, t1, ... in
// source order, qualifies every column, adds explicit where/as clauses and
// expands select *. The result is a fresh tree.
SQueryP normalize(const SQueryP& q, const Schema& schema);

// SQL text of a query; on normalized input this is the canonical form.
std::string print_sql(const SQuery& q);

// Lowers a normalized query and checks the algebra term is well formed.
alg::QueryP to_sqlalg(const SQuery& q, const Schema& schema);

// parse + schema_of + normalize + to_sqlalg.
struct Compiled {
  Schema schema;
  SQueryP normalized;
  alg::QueryP algebra;
};
Compiled compile_sql(const std::string& sql_text);

}  // namespace dbx::sql

// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbx/data.hpp"
#include "dbx/nrae.hpp"
#include "dbx/ops.hpp"

namespace dbx {

// Variable holding the instance record in every lowered program.
inline const char* kDbVar = "db";
// Return variable of NNRS, NNRSimp and Imp programs.
inline const char* kRetVar = "ret";

class CompilerBug : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using Bindings = std::vector<std::pair<std::string, Data>>;

}  // namespace dbx

namespace dbx::nnrc {

struct Expr;
using E = std::shared_ptr<const Expr>;

//   Let(x, a, b)             let x = a in b
//   For(x, a, b)             { b | x in a }
//   If(a, b, c)              if a then b else c
//   Either(a, x, b, y, c)    match a with left(x) -> b | right(y) -> c
struct Expr {
  enum class Kind { Var, Const, Let, For, If, Either, Unary, Binary } kind;
  std::string x, y;
  Data value;
  UnaryOp uop{UnaryKind::Not, {}, {}};
  BinaryKind bop = BinaryKind::Equal;
  E a, b, c;
};

E var(std::string x);
E cst(Data d);
E let(std::string x, E a, E b);
E for_(std::string x, E a, E b);
E if_(E a, E b, E c);
E either(E a, std::string x, E b, std::string y, E c);
E unary(UnaryOp op, E a);
E binary(BinaryKind op, E a, E b);

bool equal(const Expr& a, const Expr& b);
std::string print(const Expr& e);
std::vector<std::string> free_vars(const Expr& e);

// Free variables are looked up in `free`.
Data eval(const E& e, const Bindings& free);
// Basic expressions only; variables are resolved through lookup.
Data eval_basic(const Expr& e, const std::function<const Data&(const std::string&)>& lookup);
// Renames free variables of a basic expression.
E rename_basic(const E& e, const std::function<std::string(const std::string&)>& rename);

// The whole query as an expression of the free variable db; the NRAe input
// is db and the environment is {}.
E nrae_to_nnrc(const nra::Q& q);
// Open form with explicit variables for In and Env.
E nrae_to_nnrc_open(const nra::Q& q, const std::string& in_var, const std::string& env_var);

// Var, Const and operator applications over basic expressions.
bool is_basic(const Expr& e);
// Loop sources, conditions and match scrutinees are basic, and no complex
// expression sits below an operator.
bool is_stratified(const Expr& e);
// Hoists complex operands into lets named t$0, t$1, ... in traversal order.
E stratify(const E& e);

}  // namespace dbx::nnrc

namespace dbx::nnrs {

struct Stmt;
using S = std::shared_ptr<const Stmt>;

// Three namespaces: immutable (Let, For and match binders, and mutable
// variables after their write phase), mutable data (LetMut, Assign) and
// mutable collections (LetMutColl, Push). Expressions are basic NNRC and
// read the immutable namespace only.
struct Stmt {
  enum class Kind { Seq, Let, LetMut, LetMutColl, Assign, Push, For, If, Either } kind;
  std::string x, y;
  nnrc::E e;
  S a, b;
};

S seq(S a, S b);
S let(std::string x, nnrc::E e, S body);
S let_mut(std::string x, S write, S read);
S let_mut_coll(std::string x, S write, S read);
S assign(std::string x, nnrc::E e);
S push(std::string x, nnrc::E e);
S for_(std::string x, nnrc::E e, S body);
S if_(nnrc::E e, S a, S b);
S either(nnrc::E e, std::string x, S a, std::string y, S b);

// The body runs with the input in the immutable namespace and the return
// variable in its write phase.
struct Program {
  S body;
  std::string input = kDbVar;
  std::string ret = kRetVar;
};

bool equal(const Stmt& a, const Stmt& b);
std::string print(const Program& p);

// CPS translation of a stratified expression over the free variable input.
Program nnrc_to_nnrs(const nnrc::E& e, const std::string& input = kDbVar);

// Checks namespaces and the phase discipline; returns an empty string when
// the program is valid, otherwise the first violation.
std::string validate(const Program& p);

bool is_cross_shadow_free(const Program& p);
// Renames binders that would capture a name live in another namespace to
// name$k, the smallest unused k.
Program uncross_shadow(const Program& p);

Data eval(const Program& p, const Data& input);

}  // namespace dbx::nnrs

namespace dbx::nnrsimp {

struct Stmt;
using S = std::shared_ptr<const Stmt>;

// One namespace of mutable variables. Let declares x, initialized when e is
// set, for the extent of its body.
struct Stmt {
  enum class Kind { Seq, Let, Assign, For, If, Either } kind;
  std::string x, y;
  nnrc::E e;
  S a, b;
};

S seq(S a, S b);
S let(std::string x, nnrc::E init, S body);
S assign(std::string x, nnrc::E e);
S for_(std::string x, nnrc::E e, S body);
S if_(nnrc::E e, S a, S b);
S either(nnrc::E e, std::string x, S a, std::string y, S b);

struct Program {
  S body;
  std::string input = kDbVar;
  std::string ret = kRetVar;
};

std::string print(const Program& p);
// Every read and write names a declared variable.
std::string validate(const Program& p);

// Collections become variables initialized to [] and push becomes
// x := union(x, bag(e)).
Program nnrs_to_nnrsimp(const nnrs::Program& p);

Data eval(const Program& p, const Data& input);

}  // namespace dbx::nnrsimp

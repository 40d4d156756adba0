// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dbx/data.hpp"
#include "dbx/ejson.hpp"
#include "dbx/lowering.hpp"

namespace dbx::imp {

// Imp over a data model D.
//
//   e ::= c | x | op(e, ...) | runtime(e, ...)
//   s ::= { var x [= e]; ... s; ... } | x = e | for (x in e) s | if (e) s else s
//
// Operators whose meaning depends on a record label (dot, rec, project,
// group_by) carry it in label/labels.
template <class D>
struct Expr {
  enum class Kind { Const, Var, Op, Runtime } kind;
  D value{};
  std::string name;  // variable, operator or runtime function
  std::string label;
  std::vector<std::string> labels;
  std::vector<std::shared_ptr<const Expr>> args;
};

template <class D>
using ExprP = std::shared_ptr<const Expr<D>>;

template <class D>
struct Stmt {
  enum class Kind { Block, Assign, For, If } kind;
  std::vector<std::pair<std::string, ExprP<D>>> decls;  // Block; null init allowed
  std::vector<std::shared_ptr<const Stmt>> stmts;       // Block
  std::string x;                                        // Assign target, For variable
  ExprP<D> e;                                           // Assign, For, If
  std::shared_ptr<const Stmt> a, b;                     // For body; If branches
};

template <class D>
using StmtP = std::shared_ptr<const Stmt<D>>;

// fun(param) { var ret; body; return ret; }
template <class D>
struct Function {
  std::string param = kDbVar;
  std::string ret = kRetVar;
  StmtP<D> body;
};

template <class D>
struct Instantiation {
  std::function<D(const Expr<D>& call, const std::vector<D>& args)> op;
  std::function<D(const Expr<D>& call, const std::vector<D>& args)> runtime;
  std::function<bool(const D&)> to_bool;
  std::function<void(const D&, const std::function<void(const D&)>&)> for_each;
};

// ------------------------------------------------------------ construction

template <class D>
ExprP<D> e_const(D v) {
  Expr<D> e{};
  e.kind = Expr<D>::Kind::Const;
  e.value = std::move(v);
  return std::make_shared<const Expr<D>>(std::move(e));
}

template <class D>
ExprP<D> e_var(std::string x) {
  Expr<D> e{};
  e.kind = Expr<D>::Kind::Var;
  e.name = std::move(x);
  return std::make_shared<const Expr<D>>(std::move(e));
}

template <class D>
ExprP<D> e_call(typename Expr<D>::Kind k, std::string name, std::vector<ExprP<D>> args,
                std::string label = {}, std::vector<std::string> labels = {}) {
  Expr<D> e{};
  e.kind = k;
  e.name = std::move(name);
  e.args = std::move(args);
  e.label = std::move(label);
  e.labels = std::move(labels);
  return std::make_shared<const Expr<D>>(std::move(e));
}

template <class D>
StmtP<D> s_block(std::vector<std::pair<std::string, ExprP<D>>> decls, std::vector<StmtP<D>> stmts) {
  Stmt<D> s{};
  s.kind = Stmt<D>::Kind::Block;
  s.decls = std::move(decls);
  s.stmts = std::move(stmts);
  return std::make_shared<const Stmt<D>>(std::move(s));
}

template <class D>
StmtP<D> s_assign(std::string x, ExprP<D> e) {
  Stmt<D> s{};
  s.kind = Stmt<D>::Kind::Assign;
  s.x = std::move(x);
  s.e = std::move(e);
  return std::make_shared<const Stmt<D>>(std::move(s));
}

template <class D>
StmtP<D> s_for(std::string x, ExprP<D> e, StmtP<D> body) {
  Stmt<D> s{};
  s.kind = Stmt<D>::Kind::For;
  s.x = std::move(x);
  s.e = std::move(e);
  s.a = std::move(body);
  return std::make_shared<const Stmt<D>>(std::move(s));
}

template <class D>
StmtP<D> s_if(ExprP<D> e, StmtP<D> a, StmtP<D> b) {
  Stmt<D> s{};
  s.kind = Stmt<D>::Kind::If;
  s.e = std::move(e);
  s.a = std::move(a);
  s.b = std::move(b);
  return std::make_shared<const Stmt<D>>(std::move(s));
}

// ---------------------------------------------------------------- semantics

class ImpError : public EvalError {
 public:
  using EvalError::EvalError;
};

template <class D>
class Interpreter {
 public:
  explicit Interpreter(const Instantiation<D>& inst) : inst_(inst) {}

  D call(const Function<D>& f, const D& input) {
    vars_.clear();
    vars_.emplace_back(f.param, input);
    vars_.emplace_back(f.ret, std::nullopt);
    run(*f.body);
    if (!vars_[1].second) throw ImpError("return variable " + f.ret + " is unassigned");
    return *vars_[1].second;
  }

 private:
  void run(const Stmt<D>& s) {
    switch (s.kind) {
      case Stmt<D>::Kind::Block: {
        std::size_t mark = vars_.size();
        for (auto& [x, init] : s.decls) {
          std::optional<D> v;
          if (init) v = eval(*init);
          vars_.emplace_back(x, std::move(v));
        }
        for (auto& t : s.stmts) run(*t);
        vars_.resize(mark);
        return;
      }
      case Stmt<D>::Kind::Assign: {
        D v = eval(*s.e);
        slot(s.x) = std::move(v);
        return;
      }
      case Stmt<D>::Kind::For: {
        D xs = eval(*s.e);
        inst_.for_each(xs, [&](const D& x) {
          vars_.emplace_back(s.x, x);
          run(*s.a);
          vars_.pop_back();
        });
        return;
      }
      case Stmt<D>::Kind::If:
        run(inst_.to_bool(eval(*s.e)) ? *s.a : *s.b);
        return;
    }
  }

  D eval(const Expr<D>& e) {
    switch (e.kind) {
      case Expr<D>::Kind::Const: return e.value;
      case Expr<D>::Kind::Var: {
        auto& v = slot(e.name);
        if (!v) throw ImpError("read of uninitialized variable " + e.name);
        return *v;
      }
      case Expr<D>::Kind::Op:
      case Expr<D>::Kind::Runtime: {
        std::vector<D> args;
        args.reserve(e.args.size());
        for (auto& a : e.args) args.push_back(eval(*a));
        return e.kind == Expr<D>::Kind::Op ? inst_.op(e, args) : inst_.runtime(e, args);
      }
    }
    throw ImpError("unknown expression");
  }

  std::optional<D>& slot(const std::string& x) {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it)
      if (it->first == x) return it->second;
    throw ImpError("undeclared variable " + x);
  }

  const Instantiation<D>& inst_;
  std::vector<std::pair<std::string, std::optional<D>>> vars_;
};

template <class D>
D eval_imp(const Function<D>& f, const Instantiation<D>& inst, const D& input) {
  return Interpreter<D>(inst).call(f, input);
}

// Declared-before-use check; returns the first violation or "".
template <class D>
std::string validate(const Function<D>& f) {
  std::vector<std::string> scope{f.param, f.ret};
  std::string err;
  std::function<void(const Expr<D>&)> expr = [&](const Expr<D>& e) {
    if (e.kind == Expr<D>::Kind::Var &&
        std::find(scope.begin(), scope.end(), e.name) == scope.end() && err.empty())
      err = "read of undeclared " + e.name;
    for (auto& a : e.args) expr(*a);
  };
  std::function<void(const Stmt<D>&)> stmt = [&](const Stmt<D>& s) {
    switch (s.kind) {
      case Stmt<D>::Kind::Block: {
        std::size_t mark = scope.size();
        for (auto& [x, init] : s.decls) {
          if (init) expr(*init);
          scope.push_back(x);
        }
        for (auto& t : s.stmts) stmt(*t);
        scope.resize(mark);
        return;
      }
      case Stmt<D>::Kind::Assign:
        if (std::find(scope.begin(), scope.end(), s.x) == scope.end() && err.empty())
          err = "assignment to undeclared " + s.x;
        expr(*s.e);
        return;
      case Stmt<D>::Kind::For:
        expr(*s.e);
        scope.push_back(s.x);
        stmt(*s.a);
        scope.pop_back();
        return;
      case Stmt<D>::Kind::If:
        expr(*s.e);
        stmt(*s.a);
        stmt(*s.b);
        return;
    }
  };
  stmt(*f.body);
  return err;
}

// ------------------------------------------------------------ instantiations

using DataFunction = Function<Data>;
using EJsonFunction = Function<EJson>;

// Operators are the ops.hpp vocabulary; runtime functions are either,
// getLeft, getRight and group_by.
const Instantiation<Data>& data_instantiation();

// Operators keep their names and act on the JSON encoding; runtime functions
// are either, getLeft, getRight, group_by, push and array.
const Instantiation<EJson>& ejson_instantiation();

// Direct entry point to the EJson operator and runtime tables.
EJson ejson_call(const std::string& name, const std::string& label,
                 const std::vector<std::string>& labels, const std::vector<EJson>& args);
// Names understood by ejson_call, operators first.
std::vector<std::string> ejson_operator_names();
std::vector<std::string> ejson_runtime_names();

// Match statements become if (either(v)) with getLeft/getRight bindings.
DataFunction nnrsimp_to_imp_data(const nnrsimp::Program& p);
// Constants go through data_to_ejson; union(x, bag(e)) becomes push(x, e) and
// the empty bag becomes array().
EJsonFunction imp_data_to_imp_ejson(const DataFunction& f);

std::string print(const DataFunction& f);
std::string print(const EJsonFunction& f);

}  // namespace dbx::imp

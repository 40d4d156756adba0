// SPDX-License-Identifier: MIT
#include <algorithm>

#include "dbx/sqlalg.hpp"

namespace dbx::alg {

namespace {

using Type = std::optional<ColumnType>;

enum class Mode { Plain, InAggregate, NoAggregate };

bool numeric(const Type& t) {
  return !t || *t == ColumnType::Int || *t == ColumnType::Double;
}

bool compatible(const Type& a, const Type& b) {
  if (!a || !b) return true;
  if (numeric(a) && numeric(b)) return true;
  return *a == *b;
}

Type type_of_value(const Value& v) {
  if (v.is_bool()) return ColumnType::Boolean;
  if (v.is_int()) return ColumnType::Int;
  if (v.is_double()) return ColumnType::Double;
  if (v.is_text()) return ColumnType::Text;
  return std::nullopt;
}

std::string type_name(const Type& t) { return t ? column_type_name(*t) : "null"; }

[[noreturn]] void fail(const std::string& msg) { throw WellFormedError(msg); }

StaticSlice slice_of(const TypedSort& s, std::vector<ExprP> group, bool grouped) {
  StaticSlice out;
  for (auto& [n, t] : s) {
    out.attrs.push_back(n);
    out.types.push_back(t);
  }
  out.group = std::move(group);
  out.grouped = grouped;
  return out;
}

StaticEnv push(const StaticEnv& env, StaticSlice s) {
  StaticEnv out;
  out.reserve(env.size() + 1);
  out.push_back(std::move(s));
  out.insert(out.end(), env.begin(), env.end());
  return out;
}

class Checker {
 public:
  explicit Checker(const Schema& s) : schema_(s) {}

  TypedSort query(const Query& q, const StaticEnv& env) {
    switch (q.kind) {
      case Query::Kind::Empty: return {};
      case Query::Kind::Table: {
        const TableSchema* t = schema_.find(q.table);
        if (!t) fail("unknown table " + q.table);
        TypedSort out;
        for (auto& c : t->columns) out.emplace_back(qualify(t->name, c.name), c.type);
        return out;
      }
      case Query::Kind::Union:
      case Query::Kind::Inter:
      case Query::Kind::Except: {
        TypedSort a = query(*q.lhs, env);
        TypedSort b = query(*q.rhs, env);
        auto names = [](const TypedSort& s) {
          std::vector<std::string> n;
          for (auto& x : s) n.push_back(x.first);
          std::sort(n.begin(), n.end());
          return n;
        };
        if (names(a) != names(b)) fail("set operation over different sorts in " + print(q));
        for (auto& [n, t] : a)
          for (auto& [m, u] : b)
            if (n == m) {
              if (!compatible(t, u)) fail("set operation mixes types on " + n);
              if (!t) t = u;
            }
        return a;
      }
      case Query::Kind::Join: {
        TypedSort a = query(*q.lhs, env);
        TypedSort b = query(*q.rhs, env);
        for (auto& x : a)
          for (auto& y : b)
            if (x.first == y.first) fail("join operands share attribute " + x.first);
        a.insert(a.end(), b.begin(), b.end());
        return a;
      }
      case Query::Kind::Project: {
        TypedSort in = query(*q.lhs, env);
        StaticEnv e2 = push(env, slice_of(in, {}, false));
        return items(q.items, e2);
      }
      case Query::Kind::Sigma: {
        TypedSort in = query(*q.lhs, env);
        formula(*q.formula, push(env, slice_of(in, {}, false)));
        return in;
      }
      case Query::Kind::Gamma: {
        TypedSort in = query(*q.lhs, env);
        StaticEnv row = push(env, slice_of(in, {}, false));
        for (auto& g : q.group) {
          if (g->kind != Expr::Kind::Attr) fail("grouping expressions must be attributes");
          expr(*g, row, Mode::NoAggregate);
        }
        StaticEnv e2 = push(env, slice_of(in, q.group, true));
        formula(*q.formula, e2);
        return items(q.items, e2);
      }
    }
    return {};
  }

  void formula(const Formula& f, const StaticEnv& env) {
    switch (f.kind) {
      case Formula::Kind::True: return;
      case Formula::Kind::And:
      case Formula::Kind::Or:
        formula(*f.lhs, env);
        formula(*f.rhs, env);
        return;
      case Formula::Kind::Not: formula(*f.lhs, env); return;
      case Formula::Kind::Pred: {
        Type a = expr(*f.args[0], env, Mode::Plain);
        Type b = expr(*f.args[1], env, Mode::Plain);
        if (!compatible(a, b)) fail("comparison of " + type_name(a) + " with " + type_name(b));
        return;
      }
      case Formula::Kind::Quant: {
        Type a = expr(*f.args[0], env, Mode::Plain);
        TypedSort s = query(*f.query, env);
        if (s.size() != 1) fail("all/any subquery must have exactly one column");
        if (!compatible(a, s[0].second)) fail("all/any compares incompatible types");
        return;
      }
      case Formula::Kind::In: {
        TypedSort s = query(*f.query, env);
        if (f.args.size() != f.names.size() || s.size() != f.names.size())
          fail("in: arity mismatch");
        for (std::size_t k = 0; k < f.args.size(); ++k) {
          Type a = expr(*f.args[k], env, Mode::Plain);
          auto it = std::find_if(s.begin(), s.end(),
                                 [&](auto& x) { return x.first == f.names[k]; });
          if (it == s.end()) fail("in: subquery has no attribute " + f.names[k]);
          if (!compatible(a, it->second)) fail("in: incompatible types on " + f.names[k]);
        }
        auto names = f.names;
        std::sort(names.begin(), names.end());
        if (std::adjacent_find(names.begin(), names.end()) != names.end())
          fail("in: duplicate attribute");
        return;
      }
      case Formula::Kind::Exists: query(*f.query, env); return;
    }
  }

  Type expr(const Expr& e, const StaticEnv& env, Mode mode) {
    switch (e.kind) {
      case Expr::Kind::Const: return type_of_value(e.value);
      case Expr::Kind::Attr: {
        for (auto& s : env) {
          auto it = std::find(s.attrs.begin(), s.attrs.end(), e.attr);
          if (it == s.attrs.end()) continue;
          if (s.grouped) {
            bool keyed = std::any_of(s.group.begin(), s.group.end(),
                                     [&](const ExprP& g) { return equal(*g, e); });
            if (!keyed)
              fail("attribute " + e.attr + " is neither grouped nor aggregated");
          }
          std::size_t k = std::size_t(it - s.attrs.begin());
          return k < s.types.size() ? s.types[k] : std::nullopt;
        }
        fail("unknown attribute " + e.attr);
      }
      case Expr::Kind::Fn: {
        std::vector<Type> ts;
        for (auto& a : e.args) ts.push_back(expr(*a, env, mode));
        if (e.fn == Fn::Concat) {
          for (auto& t : ts)
            if (t && *t != ColumnType::Text) fail("|| applied to " + type_name(t));
          return ColumnType::Text;
        }
        for (auto& t : ts)
          if (!numeric(t)) fail("arithmetic on " + type_name(t));
        if (e.fn == Fn::Neg) return ts[0];
        if (!ts[0] || !ts[1]) return std::nullopt;
        if (*ts[0] == ColumnType::Int && *ts[1] == ColumnType::Int) return ColumnType::Int;
        return ColumnType::Double;
      }
      case Expr::Kind::Agg: {
        if (mode != Mode::Plain) fail("misplaced aggregate " + print(e));
        const Expr& arg = *e.args[0];
        int depth = find_eval_env_static(env, arg);
        if (depth < 0 || env.empty()) fail("aggregate " + print(e) + " has no evaluation slice");
        StaticEnv e2(env.begin() + depth, env.end());
        e2.front().grouped = false;
        Type t = expr(arg, e2, Mode::InAggregate);
        switch (e.agg) {
          case Agg::Count:
          case Agg::CountStar: return ColumnType::Int;
          case Agg::Avg:
            if (!numeric(t)) fail("avg of " + type_name(t));
            return ColumnType::Double;
          case Agg::Sum:
            if (!numeric(t)) fail("sum of " + type_name(t));
            return t;
          case Agg::Min:
          case Agg::Max: return t;
        }
        return t;
      }
    }
    return std::nullopt;
  }

 private:
  TypedSort items(const std::vector<Select>& its, const StaticEnv& env) {
    TypedSort out;
    for (auto& s : its) {
      for (auto& o : out)
        if (o.first == s.name) fail("duplicate output attribute " + s.name);
      out.emplace_back(s.name, expr(*s.expr, env, Mode::Plain));
    }
    return out;
  }

  const Schema& schema_;
};

}  // namespace

TypedSort check_well_formed(const Query& q, const StaticEnv& env, const Schema& schema) {
  return Checker(schema).query(q, env);
}

}  // namespace dbx::alg

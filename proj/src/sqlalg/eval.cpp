// SPDX-License-Identifier: MIT
#include <algorithm>
#include <map>

#include "dbx/sqlalg.hpp"

namespace dbx::alg {

Bool3 and3(Bool3 a, Bool3 b) {
  if (a == Bool3::False || b == Bool3::False) return Bool3::False;
  if (a == Bool3::True && b == Bool3::True) return Bool3::True;
  return Bool3::Unknown;
}

Bool3 or3(Bool3 a, Bool3 b) {
  if (a == Bool3::True || b == Bool3::True) return Bool3::True;
  if (a == Bool3::False && b == Bool3::False) return Bool3::False;
  return Bool3::Unknown;
}

Bool3 not3(Bool3 a) {
  if (a == Bool3::True) return Bool3::False;
  if (a == Bool3::False) return Bool3::True;
  return Bool3::Unknown;
}

const char* to_string(Bool3 b) {
  switch (b) {
    case Bool3::True: return "true";
    case Bool3::False: return "false";
    case Bool3::Unknown: return "unknown";
  }
  return "?";
}

Env Env::push(Slice s) const {
  return Env(std::make_shared<const Node>(Node{std::move(s), node_}));
}

const Slice& Env::top() const {
  if (!node_) throw EvalError("empty environment");
  return node_->slice;
}

Env Env::tail() const {
  if (!node_) throw EvalError("empty environment");
  return Env(node_->next);
}

std::size_t Env::depth() const {
  std::size_t n = 0;
  for (auto p = node_.get(); p; p = p->next.get()) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// find_eval_env

namespace {

bool contains_expr(const std::vector<ExprP>& g, const Expr& e) {
  for (auto& x : g)
    if (equal(*x, e)) return true;
  return false;
}

// Deepest-first search over a top-first list of (attrs, group) pairs.
template <class Slices>
int find_in(const Slices& slices, const Expr& e) {
  if (e.kind == Expr::Kind::Const) return 0;
  // groups[k] = union of G over slices strictly deeper than k
  std::vector<ExprP> deeper;
  int n = int(slices.size());
  for (int k = n - 1; k >= 0; --k) {
    std::set<std::string> attrs(slices[k].attrs.begin(), slices[k].attrs.end());
    if (is_built_upon(deeper, attrs, e)) return k;
    for (auto& g : slices[k].group) deeper.push_back(g);
  }
  return -1;
}

}  // namespace

bool is_built_upon(const std::vector<ExprP>& g, const std::set<std::string>& attrs,
                   const Expr& e) {
  if (e.kind == Expr::Kind::Const) return true;
  if (contains_expr(g, e)) return true;
  if (e.kind == Expr::Kind::Attr) return attrs.count(e.attr) > 0;
  if (e.kind == Expr::Kind::Fn) {
    for (auto& a : e.args)
      if (!is_built_upon(g, attrs, *a)) return false;
    return true;
  }
  return false;
}

StaticEnv static_of(const Env& env) {
  StaticEnv out;
  for (Env e = env; !e.empty(); e = e.tail()) {
    const Slice& s = e.top();
    out.push_back(StaticSlice{s.attrs, s.group, s.grouped, {}});
  }
  return out;
}

int find_eval_env_static(const StaticEnv& env, const Expr& e) { return find_in(env, e); }

int find_eval_env(const Env& env, const Expr& e) { return find_in(static_of(env), e); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::vector<std::string> labels_of(const std::vector<Tuple>& ts, const Query& q,
                                   const Instance& i) {
  if (!ts.empty()) return ts.front().labels();
  auto s = sort_of(q, i.schema);
  std::sort(s.begin(), s.end());
  return s;
}

Env push_tuple(const Env& env, const Tuple& t) {
  return env.push(Slice{t.labels(), {}, {t}, false});
}

Bool3 compare3(Pred p, const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return Bool3::Unknown;
  int c = compare_values(a, b);
  bool r = false;
  switch (p) {
    case Pred::Eq: r = c == 0; break;
    case Pred::Ne: r = c != 0; break;
    case Pred::Lt: r = c < 0; break;
    case Pred::Le: r = c <= 0; break;
    case Pred::Gt: r = c > 0; break;
    case Pred::Ge: r = c >= 0; break;
  }
  return r ? Bool3::True : Bool3::False;
}

const Value& only_value(const Tuple& t) {
  if (t.entries().size() != 1) throw EvalError("single-column subquery expected");
  return t.entries().front().second;
}

Bag multiset(Query::Kind k, const Bag& a, const Bag& b) {
  auto less = [](const Tuple& x, const Tuple& y) { return tuple_compare(x, y) < 0; };
  std::map<Tuple, std::size_t, decltype(less)> counts(less);
  for (auto& t : b) ++counts[t];
  Bag out;
  for (auto& t : a) {
    auto it = counts.find(t);
    bool present = it != counts.end() && it->second > 0;
    if (present) --it->second;
    if ((k == Query::Kind::Except) != present) out.push_back(t);
  }
  return out;
}

Value apply_fn(Fn f, const std::vector<Value>& args) {
  for (auto& a : args)
    if (a.is_null()) return Value();
  switch (f) {
    case Fn::Add: return arith(ArithOp::Add, args[0], args[1]);
    case Fn::Sub: return arith(ArithOp::Sub, args[0], args[1]);
    case Fn::Mul: return arith(ArithOp::Mul, args[0], args[1]);
    case Fn::Div: return arith(ArithOp::Div, args[0], args[1]);
    case Fn::Neg: return negate(args[0]);
    case Fn::Concat: return concat_text(args[0], args[1]);
  }
  return Value();
}

Value eval_agg(const Expr& e, const Env& env, const Instance& i) {
  const Expr& arg = *e.args[0];
  int depth = find_eval_env(env, arg);
  if (depth < 0) throw EvalError("aggregate " + print(e) + " has no evaluation slice");
  Env found = env;
  for (int k = 0; k < depth; ++k) found = found.tail();
  const Slice& s = found.top();
  Env rest = found.tail();
  if (e.agg == Agg::CountStar) return Value(BigInt(static_cast<unsigned long>(s.tuples.size())));
  std::vector<Value> vals;
  for (auto& t : s.tuples) {
    Value v = eval_expr(arg, rest.push(Slice{s.attrs, s.group, {t}, s.grouped}), i);
    if (!v.is_null()) vals.push_back(std::move(v));
  }
  if (e.agg == Agg::Count) return Value(BigInt(static_cast<unsigned long>(vals.size())));
  if (vals.empty()) return Value();
  const Value* b = vals.data();
  const Value* en = b + vals.size();
  switch (e.agg) {
    case Agg::Sum: return sum_values(b, en);
    case Agg::Avg: return avg_values(b, en);
    case Agg::Min: return min_values(b, en);
    case Agg::Max: return max_values(b, en);
    default: break;
  }
  return Value();
}

}  // namespace

Value eval_expr(const Expr& e, const Env& env, const Instance& i) {
  switch (e.kind) {
    case Expr::Kind::Const: return e.value;
    case Expr::Kind::Attr:
      for (Env x = env; !x.empty(); x = x.tail()) {
        const Slice& s = x.top();
        if (std::find(s.attrs.begin(), s.attrs.end(), e.attr) == s.attrs.end()) continue;
        if (s.tuples.empty()) throw EvalError("attribute " + e.attr + " read from an empty slice");
        return s.tuples.front().get(e.attr);
      }
      throw EvalError("unresolved attribute " + e.attr);
    case Expr::Kind::Fn: {
      std::vector<Value> args;
      for (auto& a : e.args) args.push_back(eval_expr(*a, env, i));
      return apply_fn(e.fn, args);
    }
    case Expr::Kind::Agg: return eval_agg(e, env, i);
  }
  return Value();
}

Bool3 eval_formula(const Formula& f, const Env& env, const Instance& i) {
  switch (f.kind) {
    case Formula::Kind::True: return Bool3::True;
    case Formula::Kind::And: return and3(eval_formula(*f.lhs, env, i), eval_formula(*f.rhs, env, i));
    case Formula::Kind::Or: return or3(eval_formula(*f.lhs, env, i), eval_formula(*f.rhs, env, i));
    case Formula::Kind::Not: return not3(eval_formula(*f.lhs, env, i));
    case Formula::Kind::Pred:
      return compare3(f.pred, eval_expr(*f.args[0], env, i), eval_expr(*f.args[1], env, i));
    case Formula::Kind::Quant: {
      Value a = eval_expr(*f.args[0], env, i);
      Bag b = eval_query(*f.query, env, i);
      Bool3 acc = f.all ? Bool3::True : Bool3::False;
      for (auto& t : b) {
        Bool3 r = compare3(f.pred, a, only_value(t));
        acc = f.all ? and3(acc, r) : or3(acc, r);
      }
      return acc;
    }
    case Formula::Kind::In: {
      std::vector<Value> vs;
      for (auto& a : f.args) vs.push_back(eval_expr(*a, env, i));
      Bag b = eval_query(*f.query, env, i);
      Bool3 acc = Bool3::False;
      for (auto& t : b) {
        Bool3 m = Bool3::True;
        for (std::size_t k = 0; k < vs.size(); ++k)
          m = and3(m, compare3(Pred::Eq, vs[k], t.get(f.names[k])));
        acc = or3(acc, m);
      }
      return acc;
    }
    case Formula::Kind::Exists:
      return eval_query(*f.query, env, i).empty() ? Bool3::False : Bool3::True;
  }
  return Bool3::Unknown;
}

Bag eval_query(const Query& q, const Env& env, const Instance& i) {
  switch (q.kind) {
    case Query::Kind::Empty: return {};
    case Query::Kind::Table: {
      auto it = i.tables.find(q.table);
      if (it != i.tables.end()) return it->second;
      if (i.schema.find(q.table)) return {};
      throw EvalError("unknown table " + q.table);
    }
    case Query::Kind::Union: {
      Bag a = eval_query(*q.lhs, env, i);
      Bag b = eval_query(*q.rhs, env, i);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    case Query::Kind::Inter:
    case Query::Kind::Except:
      return multiset(q.kind, eval_query(*q.lhs, env, i), eval_query(*q.rhs, env, i));
    case Query::Kind::Join: {
      Bag a = eval_query(*q.lhs, env, i);
      Bag b = eval_query(*q.rhs, env, i);
      Bag out;
      for (auto& x : a)
        for (auto& y : b) {
          std::vector<Tuple::Entry> es = x.entries();
          bool ok = true;
          for (auto& [k, v] : y.entries()) {
            if (const Value* w = x.find(k)) {
              if (!(*w == v)) ok = false;
            } else {
              es.emplace_back(k, v);
            }
          }
          if (ok) out.push_back(Tuple(std::move(es)));
        }
      return out;
    }
    case Query::Kind::Project: {
      Bag out;
      for (auto& t : eval_query(*q.lhs, env, i)) {
        Env e2 = push_tuple(env, t);
        std::vector<Tuple::Entry> es;
        for (auto& s : q.items) es.emplace_back(s.name, eval_expr(*s.expr, e2, i));
        out.push_back(Tuple(std::move(es)));
      }
      return out;
    }
    case Query::Kind::Sigma: {
      Bag out;
      for (auto& t : eval_query(*q.lhs, env, i))
        if (eval_formula(*q.formula, push_tuple(env, t), i) == Bool3::True) out.push_back(t);
      return out;
    }
    case Query::Kind::Gamma: {
      Bag in = eval_query(*q.lhs, env, i);
      std::vector<std::vector<Tuple>> groups;
      if (q.group.empty()) {
        groups.push_back(std::move(in));
      } else {
        auto less = [](const std::vector<Value>& a, const std::vector<Value>& b) {
          return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                              ValueLess());
        };
        std::map<std::vector<Value>, std::size_t, decltype(less)> index(less);
        for (auto& t : in) {
          Env e2 = push_tuple(env, t);
          std::vector<Value> key;
          for (auto& g : q.group) key.push_back(eval_expr(*g, e2, i));
          auto [it, fresh] = index.emplace(std::move(key), groups.size());
          if (fresh) groups.emplace_back();
          groups[it->second].push_back(t);
        }
      }
      Bag out;
      for (auto& g : groups) {
        Env e2 = env.push(Slice{labels_of(g, *q.lhs, i), q.group, g, true});
        if (eval_formula(*q.formula, e2, i) != Bool3::True) continue;
        std::vector<Tuple::Entry> es;
        for (auto& s : q.items) es.emplace_back(s.name, eval_expr(*s.expr, e2, i));
        out.push_back(Tuple(std::move(es)));
      }
      return out;
    }
  }
  return {};
}

}  // namespace dbx::alg

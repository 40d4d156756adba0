// SPDX-License-Identifier: MIT
#include "dbx/alg2nra.hpp"

#include <algorithm>

namespace dbx::alg2nra {

using namespace nra;
using alg::Agg;
using alg::Expr;
using alg::Fn;
using alg::Formula;
using alg::Pred;
using alg::Query;
using alg::StaticEnv;
using alg::StaticSlice;

namespace {

Q null_q() { return cst(null_data()); }
Q bool_q(bool b) { return cst(Data::atom(Value(b))); }
Q empty_bag() { return cst(Data::bag(std::vector<Data>{})); }
Q env_dot(const std::string& l) { return dot(env(), l); }
Q un(UnaryKind k, Q a) { return unary(uop(k), std::move(a)); }

// {v: In, e: Env}
Q stash_in() { return concat(rec("v", in()), rec("e", env())); }

// Binary operation on boxed operands. Both operands ignore In. The four
// handlers see the unboxed values: ll(x, y) with x in Env.v and y in In,
// lr with x in Env.v, rl with y in In; rr runs with nothing.
Q boxed2(Q q1, Q q2, Q ll, Q lr, Q rl, Q rr) {
  Q with_left = app_env(comp(either(std::move(ll), std::move(lr)), app_env(q2, env_dot("e"))),
                        stash_in());
  Q with_right = comp(either(std::move(rl), std::move(rr)), q2);
  return comp(either(std::move(with_left), std::move(with_right)), std::move(q1));
}

// Null-absorbing binary operation.
Q strict2(Q q1, Q q2, Q op_on_v_in) {
  Q with_left = app_env(comp(either(std::move(op_on_v_in), null_q()), app_env(q2, env_dot("e"))),
                        stash_in());
  return comp(either(std::move(with_left), null_q()), std::move(q1));
}

// Branches run on the condition's truth value, not on the current input.
Q if_then_else(Q cond, Q then_q, Q else_q) {
  return comp(either(std::move(then_q), std::move(else_q)),
              un(UnaryKind::Single, select(in(), bag(std::move(cond)))));
}

BinaryKind cmp_kind(Pred p) {
  switch (p) {
    case Pred::Eq: return BinaryKind::CmpEq;
    case Pred::Ne: return BinaryKind::CmpNe;
    case Pred::Lt: return BinaryKind::CmpLt;
    case Pred::Le: return BinaryKind::CmpLe;
    case Pred::Gt: return BinaryKind::CmpGt;
    case Pred::Ge: return BinaryKind::CmpGe;
  }
  return BinaryKind::CmpEq;
}

// Null-aware comparison of two boxed values.
Q compare_b(Pred p, Q q1, Q q2) {
  return strict2(std::move(q1), std::move(q2),
                 left(binary(cmp_kind(p), dot(env(), "v"), in())));
}

// Fold of a bag of boxed truth values; the bag is kept in Env.b.
Q fold3_bag(Q bag_q, alg::Bool3 absorbing, alg::Bool3 neutral) {
  Q b = env_dot("b");
  Q test = if_then_else(binary(BinaryKind::Contains, cst(box(absorbing)), b), cst(box(absorbing)),
                        if_then_else(binary(BinaryKind::Contains, null_q(), b), null_q(),
                                     cst(box(neutral))));
  return app_env(test, rec("b", std::move(bag_q)));
}

Q and3_bag(Q bag_q) { return fold3_bag(std::move(bag_q), alg::Bool3::False, alg::Bool3::True); }
Q or3_bag(Q bag_q) { return fold3_bag(std::move(bag_q), alg::Bool3::True, alg::Bool3::False); }

StaticEnv push(const StaticEnv& a, StaticSlice s) {
  StaticEnv out;
  out.reserve(a.size() + 1);
  out.push_back(std::move(s));
  out.insert(out.end(), a.begin(), a.end());
  return out;
}

StaticSlice slice_of(std::vector<std::string> attrs, std::vector<alg::ExprP> g, bool grouped) {
  return StaticSlice{std::move(attrs), std::move(g), grouped, {}};
}

Q tail_n(Q body, int k) {
  for (int i = 0; i < k; ++i) body = app_env(body, env_dot("tail"));
  return body;
}

class Translator {
 public:
  explicit Translator(const Schema& s) : schema_(s) {}

  Q query(const StaticEnv& a, const Query& q) {
    switch (q.kind) {
      case Query::Kind::Empty: return empty_bag();
      case Query::Kind::Table: return table(q.table);
      case Query::Kind::Union: return binary(BinaryKind::Union, query(a, *q.lhs), query(a, *q.rhs));
      case Query::Kind::Inter: return binary(BinaryKind::Inter, query(a, *q.lhs), query(a, *q.rhs));
      case Query::Kind::Except: return binary(BinaryKind::Minus, query(a, *q.lhs), query(a, *q.rhs));
      case Query::Kind::Join: return product(query(a, *q.lhs), query(a, *q.rhs));
      case Query::Kind::Project: {
        StaticEnv a2 = push(a, slice_of(alg::sort_of(*q.lhs, schema_), {}, false));
        return map(app_env(items(a2, q.items), push_one()), query(a, *q.lhs));
      }
      case Query::Kind::Sigma: {
        Q src = query(a, *q.lhs);
        if (q.formula->kind == Formula::Kind::True) return src;
        StaticEnv a2 = push(a, slice_of(alg::sort_of(*q.lhs, schema_), {}, false));
        return select(app_env(is_true_b(formula(a2, *q.formula)), push_one()), src);
      }
      case Query::Kind::Gamma: {
        Q src = query(a, *q.lhs);
        Q groups;
        if (q.group.empty()) {
          groups = bag(src);
        } else {
          std::vector<std::string> keys;
          for (auto& g : q.group) keys.push_back(g->attr);
          groups = map(dot(in(), kGroupLabel), group_by(kGroupLabel, keys, src));
        }
        StaticEnv a2 = push(a, slice_of(alg::sort_of(*q.lhs, schema_), q.group, true));
        Q filtered = groups;
        if (q.formula->kind != Formula::Kind::True)
          filtered = select(app_env(is_true_b(formula(a2, *q.formula)), push_bag()), groups);
        return map(app_env(items(a2, q.items), push_bag()), filtered);
      }
    }
    return empty_bag();
  }

  Q formula(const StaticEnv& a, const Formula& f) {
    switch (f.kind) {
      case Formula::Kind::True: return cst(box(alg::Bool3::True));
      case Formula::Kind::And: return and_b(formula(a, *f.lhs), formula(a, *f.rhs));
      case Formula::Kind::Or: return or_b(formula(a, *f.lhs), formula(a, *f.rhs));
      case Formula::Kind::Not: return not_b(formula(a, *f.lhs));
      case Formula::Kind::Pred:
        return compare_b(f.pred, expr(a, *f.args[0]), expr(a, *f.args[1]));
      case Formula::Kind::Exists:
        return left(binary(BinaryKind::CmpGt, un(UnaryKind::Count, query(a, *f.query)),
                           cst(Data::atom(Value(BigInt(0))))));
      case Formula::Kind::Quant: {
        // Env = {x: value, e: outer}; rows see {x, r: row}.
        auto sort = alg::sort_of(*f.query, schema_);
        Q cmp = compare_b(f.pred, env_dot("x"), dot(env_dot("r"), sort.at(0)));
        Q per_row = map(app_env(cmp, row_env()), app_env(query(a, *f.query), env_dot("e")));
        Q fold = f.all ? and3_bag(per_row) : or3_bag(per_row);
        return app_env(fold, concat(rec("x", expr(a, *f.args[0])), rec("e", env())));
      }
      case Formula::Kind::In: {
        // Env = {x: {x0, x1, ...}, e: outer}.
        Q values;
        for (std::size_t k = 0; k < f.args.size(); ++k) {
          Q field = rec("x" + std::to_string(k), expr(a, *f.args[k]));
          values = values ? concat(values, field) : field;
        }
        Q match;
        for (std::size_t k = 0; k < f.args.size(); ++k) {
          Q eq = compare_b(Pred::Eq, dot(env_dot("x"), "x" + std::to_string(k)),
                           dot(env_dot("r"), f.names[k]));
          match = match ? and_b(match, eq) : eq;
        }
        Q per_row = map(app_env(match, row_env()), app_env(query(a, *f.query), env_dot("e")));
        return app_env(or3_bag(per_row), concat(rec("x", values), rec("e", env())));
      }
    }
    return cst(box(alg::Bool3::Unknown));
  }

  Q expr(const StaticEnv& a, const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Const: return cst(value_to_data(e.value));
      case Expr::Kind::Attr: {
        for (std::size_t k = 0; k < a.size(); ++k) {
          auto& attrs = a[k].attrs;
          if (std::find(attrs.begin(), attrs.end(), e.attr) == attrs.end()) continue;
          Q here = dot(un(UnaryKind::First, env_dot("slice")), e.attr);
          return tail_n(here, int(k));
        }
        throw EvalError("attribute " + e.attr + " is not in the translation environment");
      }
      case Expr::Kind::Fn: {
        if (e.fn == Fn::Neg)
          return comp(either(left(un(UnaryKind::Neg, in())), null_q()), expr(a, *e.args[0]));
        Q op;
        Q x = env_dot("v");
        switch (e.fn) {
          case Fn::Add: op = left(binary(BinaryKind::Add, x, in())); break;
          case Fn::Sub: op = left(binary(BinaryKind::Sub, x, in())); break;
          case Fn::Mul: op = left(binary(BinaryKind::Mul, x, in())); break;
          case Fn::Div: op = binary(BinaryKind::Div, x, in()); break;
          case Fn::Concat: op = left(binary(BinaryKind::StrConcat, x, in())); break;
          case Fn::Neg: break;
        }
        return strict2(expr(a, *e.args[0]), expr(a, *e.args[1]), op);
      }
      case Expr::Kind::Agg: return aggregate(a, e);
    }
    return null_q();
  }

 private:
  // {x: Env.x, r: In}
  static Q row_env() { return concat(rec("x", env_dot("x")), rec("r", in())); }

  Q items(const StaticEnv& a, const std::vector<alg::Select>& its) {
    Q out;
    for (auto& s : its) {
      Q field = rec(s.name, expr(a, *s.expr));
      out = out ? concat(out, field) : field;
    }
    return out ? out : cst(Data::record({}));
  }

  Q aggregate(const StaticEnv& a, const Expr& e) {
    const Expr& arg = *e.args[0];
    int depth = alg::find_eval_env_static(a, arg);
    if (depth < 0 || a.empty()) throw EvalError("aggregate " + alg::print(e) + " has no slice");
    StaticEnv found(a.begin() + depth, a.end());
    found.front().grouped = false;
    Q body;
    if (e.agg == Agg::CountStar) {
      body = left(un(UnaryKind::Count, env_dot("slice")));
    } else {
      Q per_tuple = concat(rec("slice", bag(in())), rec("tail", env_dot("tail")));
      Q vals = map(app_env(expr(found, arg), per_tuple), env_dot("slice"));
      Q nonnull = un(UnaryKind::Flatten, map(either(bag(in()), empty_bag()), vals));
      if (e.agg == Agg::Count) {
        body = left(un(UnaryKind::Count, nonnull));
      } else {
        UnaryKind k = e.agg == Agg::Sum   ? UnaryKind::Sum
                      : e.agg == Agg::Avg ? UnaryKind::Avg
                      : e.agg == Agg::Min ? UnaryKind::Min
                                          : UnaryKind::Max;
        Q nonempty = binary(BinaryKind::CmpGt, un(UnaryKind::Count, in()),
                            cst(Data::atom(Value(BigInt(0)))));
        body = comp(either(left(un(k, in())), null_q()),
                    un(UnaryKind::Single, select(nonempty, bag(nonnull))));
      }
    }
    return tail_n(body, depth);
  }

  const Schema& schema_;
};

}  // namespace

Q push_one() { return concat(rec("slice", bag(in())), rec("tail", env())); }
Q push_bag() { return concat(rec("slice", in()), rec("tail", env())); }

Data box(alg::Bool3 b) {
  switch (b) {
    case alg::Bool3::True: return left_atom(Value(true));
    case alg::Bool3::False: return left_atom(Value(false));
    case alg::Bool3::Unknown: return null_data();
  }
  return null_data();
}

Q and_b(Q a, Q b) {
  return boxed2(std::move(a), std::move(b), left(binary(BinaryKind::And, env_dot("v"), in())),
                un(UnaryKind::Single, select(un(UnaryKind::Not, in()), bag(env_dot("v")))),
                un(UnaryKind::Single, select(un(UnaryKind::Not, in()), bag(in()))), null_q());
}

Q or_b(Q a, Q b) {
  return boxed2(std::move(a), std::move(b), left(binary(BinaryKind::Or, env_dot("v"), in())),
                un(UnaryKind::Single, select(in(), bag(env_dot("v")))),
                un(UnaryKind::Single, select(in(), bag(in()))), null_q());
}

Q not_b(Q a) { return comp(either(left(un(UnaryKind::Not, in())), null_q()), std::move(a)); }

Q is_true_b(Q q) { return comp(either(in(), bool_q(false)), std::move(q)); }

Q translate_query(const StaticEnv& a, const Query& q, const Schema& schema) {
  return Translator(schema).query(a, q);
}

Q translate_formula(const StaticEnv& a, const Formula& f, const Schema& schema) {
  return Translator(schema).formula(a, f);
}

Q translate_expr(const StaticEnv& a, const Expr& e, const Schema& schema) {
  return Translator(schema).expr(a, e);
}

Data runtime_of(const alg::Env& e) {
  if (e.empty()) return Data::record({});
  std::vector<Data> ts;
  for (auto& t : e.top().tuples) ts.push_back(tuple_to_data(t));
  return Data::record({{"slice", Data::bag(std::move(ts))}, {"tail", runtime_of(e.tail())}});
}

}  // namespace dbx::alg2nra

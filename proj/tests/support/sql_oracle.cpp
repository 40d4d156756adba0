// SPDX-License-Identifier: MIT
#include "sql_oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace oracle {

using namespace dbx;
using fuzz::FExpr;
using fuzz::FFormula;
using fuzz::FQuery;

namespace {

enum class T3 { F, U, T };

T3 and3(T3 a, T3 b) { return std::min(a, b); }
T3 or3(T3 a, T3 b) { return std::max(a, b); }
T3 not3(T3 a) { return a == T3::T ? T3::F : a == T3::F ? T3::T : T3::U; }

using Named = std::map<std::string, Value>;

// One query level: its columns, the rows in scope (one row, or a group)
// and the grouping columns.
struct Level {
  std::set<std::string> cols;
  std::vector<Named> rows;
  std::vector<std::string> keys;
};

using Scope = std::vector<Level>;  // outermost first

struct Eval {
  const fuzz::Case& c;

  void columns(const FExpr& e, std::set<std::string>& out) const {
    if (e.kind == FExpr::Kind::Col) out.insert(e.col);
    for (auto& a : e.args) columns(*a, out);
  }

  Value expr(const FExpr& e, const Scope& s) const {
    switch (e.kind) {
      case FExpr::Kind::Const: return e.value;
      case FExpr::Kind::Col:
        for (auto l = s.rbegin(); l != s.rend(); ++l)
          if (l->cols.count(e.col)) {
            if (l->rows.empty()) throw std::runtime_error("column of an empty group");
            return l->rows.front().at(e.col);
          }
        throw std::runtime_error("unbound column " + e.col);
      case FExpr::Kind::Arith: {
        Value a = expr(*e.args[0], s), b = expr(*e.args[1], s);
        if (a.is_null() || b.is_null()) return Value();
        ArithOp op = e.op == '+' ? ArithOp::Add : e.op == '-' ? ArithOp::Sub
                     : e.op == '*' ? ArithOp::Mul : ArithOp::Div;
        return arith(op, a, b);
      }
      case FExpr::Kind::Agg:
      case FExpr::Kind::CountStar: return aggregate(e, s);
    }
    return Value();
  }

  // The outermost level whose columns, with the grouping columns of the
  // levels around it, cover the argument; the innermost for constants.
  std::size_t home(const FExpr& e, const Scope& s) const {
    std::set<std::string> cs;
    if (e.kind == FExpr::Kind::Agg) columns(*e.args[0], cs);
    if (cs.empty()) return s.size() - 1;
    std::set<std::string> outer_keys;
    for (std::size_t k = 0; k < s.size(); ++k) {
      bool ok = std::all_of(cs.begin(), cs.end(), [&](const std::string& x) {
        return s[k].cols.count(x) || outer_keys.count(x);
      });
      if (ok) return k;
      outer_keys.insert(s[k].keys.begin(), s[k].keys.end());
    }
    throw std::runtime_error("aggregate without a home level");
  }

  Value aggregate(const FExpr& e, const Scope& s) const {
    std::size_t k = home(e, s);
    const Level& l = s[k];
    if (e.kind == FExpr::Kind::CountStar) return Value(long(l.rows.size()));
    std::vector<Value> vs;
    for (auto& r : l.rows) {
      Scope inner(s.begin(), s.begin() + long(k));
      inner.push_back(Level{l.cols, {r}, l.keys});
      Value v = expr(*e.args[0], inner);
      if (!v.is_null()) vs.push_back(v);
    }
    if (e.agg == alg::Agg::Count) return Value(long(vs.size()));
    if (vs.empty()) return Value();
    const Value* b = vs.data();
    const Value* en = b + vs.size();
    switch (e.agg) {
      case alg::Agg::Sum: return sum_values(b, en);
      case alg::Agg::Avg: return avg_values(b, en);
      case alg::Agg::Min: return min_values(b, en);
      case alg::Agg::Max: return max_values(b, en);
      default: break;
    }
    return Value();
  }

  static T3 cmp(const std::string& op, const Value& a, const Value& b) {
    if (a.is_null() || b.is_null()) return T3::U;
    int c = compare_values(a, b);
    bool r = op == "=" ? c == 0 : op == "<>" ? c != 0 : op == "<" ? c < 0
             : op == "<=" ? c <= 0 : op == ">" ? c > 0 : c >= 0;
    return r ? T3::T : T3::F;
  }

  T3 formula(const FFormula& f, const Scope& s) const {
    switch (f.kind) {
      case FFormula::Kind::Cmp: return cmp(f.op, expr(*f.args[0], s), expr(*f.args[1], s));
      case FFormula::Kind::And: return and3(formula(*f.a, s), formula(*f.b, s));
      case FFormula::Kind::Or: return or3(formula(*f.a, s), formula(*f.b, s));
      case FFormula::Kind::Not: return not3(formula(*f.a, s));
      case FFormula::Kind::Exists: return query(*f.q, s).empty() ? T3::F : T3::T;
      case FFormula::Kind::In: {
        Value x = expr(*f.args[0], s);
        T3 acc = T3::F;
        for (auto& r : query(*f.q, s)) acc = or3(acc, cmp("=", x, r.at(0)));
        return acc;
      }
      case FFormula::Kind::Quant: {
        Value x = expr(*f.args[0], s);
        T3 acc = f.all ? T3::T : T3::F;
        for (auto& r : query(*f.q, s)) {
          T3 v = cmp(f.op, x, r.at(0));
          acc = f.all ? and3(acc, v) : or3(acc, v);
        }
        return acc;
      }
    }
    return T3::U;
  }

  std::vector<Named> source(const fuzz::FFrom& fr, const Scope& s, std::set<std::string>& cols) const {
    std::vector<Named> out;
    if (fr.sub) {
      auto rows = query(*fr.sub, s);
      std::size_t n = fr.sub->kind == FQuery::Kind::Select ? fr.sub->items.size() : first_select(*fr.sub).items.size();
      for (std::size_t k = 0; k < n; ++k) cols.insert(fr.alias + ".c" + std::to_string(k));
      for (auto& r : rows) {
        Named m;
        for (std::size_t k = 0; k < r.size(); ++k) m[fr.alias + ".c" + std::to_string(k)] = r[k];
        out.push_back(std::move(m));
      }
      return out;
    }
    std::size_t t = 0;
    while (c.schema.tables()[t].name != fr.table) ++t;
    const auto& columns = c.schema.tables()[t].columns;
    for (auto& col : columns) cols.insert(fr.alias + "." + col.name);
    for (auto& r : c.rows[t]) {
      Named m;
      for (std::size_t k = 0; k < columns.size(); ++k) m[fr.alias + "." + columns[k].name] = r[k];
      out.push_back(std::move(m));
    }
    return out;
  }

  static const FQuery& first_select(const FQuery& q) {
    return q.kind == FQuery::Kind::Select ? q : first_select(*q.lhs);
  }

  static bool has_agg(const FExpr& e) {
    if (e.kind == FExpr::Kind::Agg || e.kind == FExpr::Kind::CountStar) return true;
    return std::any_of(e.args.begin(), e.args.end(), [](auto& a) { return has_agg(*a); });
  }

  static bool has_agg(const FFormula& f) {
    if (std::any_of(f.args.begin(), f.args.end(), [](auto& a) { return has_agg(*a); })) return true;
    return (f.a && has_agg(*f.a)) || (f.b && has_agg(*f.b));
  }

  std::vector<Row> query(const FQuery& q, const Scope& s) const {
    if (q.kind != FQuery::Kind::Select) {
      auto a = query(*q.lhs, s);
      auto b = query(*q.rhs, s);
      if (q.kind == FQuery::Kind::Union) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
      }
      std::vector<Row> out;
      std::vector<bool> used(b.size(), false);
      for (auto& r : a) {
        bool found = false;
        for (std::size_t k = 0; k < b.size() && !found; ++k)
          if (!used[k] && b[k] == r) found = used[k] = true;
        if (found == (q.kind == FQuery::Kind::Intersect)) out.push_back(r);
      }
      return out;
    }

    // Cross product of the from items.
    std::set<std::string> cols;
    std::vector<Named> rows{Named{}};
    for (auto& fr : q.from) {
      auto src = source(fr, s, cols);
      std::vector<Named> next;
      for (auto& a : rows)
        for (auto& b : src) {
          Named m = a;
          m.insert(b.begin(), b.end());
          next.push_back(std::move(m));
        }
      rows = std::move(next);
    }

    std::vector<Named> kept;
    for (auto& r : rows) {
      Scope inner = s;
      inner.push_back(Level{cols, {r}, {}});
      if (!q.where || formula(*q.where, inner) == T3::T) kept.push_back(r);
    }

    bool grouped = !q.group.empty() || q.having ||
                   std::any_of(q.items.begin(), q.items.end(), [](auto& it) { return has_agg(*it.first); });
    std::vector<Row> out;
    if (!grouped) {
      for (auto& r : kept) {
        Scope inner = s;
        inner.push_back(Level{cols, {r}, {}});
        Row o;
        for (auto& [e, name] : q.items) o.push_back(expr(*e, inner));
        out.push_back(std::move(o));
      }
      return out;
    }

    std::vector<std::string> keys;
    for (auto& g : q.group) keys.push_back(g->col);
    std::vector<std::pair<Row, std::vector<Named>>> groups;
    if (keys.empty()) groups.emplace_back(Row{}, kept);
    for (auto& r : kept) {
      if (keys.empty()) break;
      Row k;
      for (auto& key : keys) k.push_back(r.at(key));
      auto it = std::find_if(groups.begin(), groups.end(), [&](auto& g) { return g.first == k; });
      if (it == groups.end()) groups.emplace_back(k, std::vector<Named>{r});
      else it->second.push_back(r);
    }
    for (auto& [k, members] : groups) {
      Scope inner = s;
      inner.push_back(Level{cols, members, keys});
      if (q.having && formula(*q.having, inner) != T3::T) continue;
      Row o;
      for (auto& [e, name] : q.items) o.push_back(expr(*e, inner));
      out.push_back(std::move(o));
    }
    return out;
  }
};

bool row_less(const Row& a, const Row& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), ValueLess());
}

}  // namespace

std::vector<Row> evaluate(const fuzz::Case& c) { return Eval{c}.query(*c.query, {}); }

std::vector<Row> rows_of(const Bag& b) {
  std::vector<Row> out;
  for (auto& t : b) {
    Row r(t.entries().size());
    for (auto& [k, v] : t.entries()) {
      std::size_t dot = k.rfind('.');
      std::string name = dot == std::string::npos ? k : k.substr(dot + 1);
      r.at(std::stoul(name.substr(1))) = v;
    }
    out.push_back(std::move(r));
  }
  return out;
}

bool same_bag(std::vector<Row> a, std::vector<Row> b) {
  std::sort(a.begin(), a.end(), row_less);
  std::sort(b.begin(), b.end(), row_less);
  return a == b;
}

std::string show(const std::vector<Row>& rows) {
  std::string s = "[";
  for (auto& r : rows) {
    s += "(";
    for (std::size_t k = 0; k < r.size(); ++k) s += (k ? "," : "") + value_literal(r[k]);
    s += ")";
  }
  return s + "]";
}

}  // namespace oracle

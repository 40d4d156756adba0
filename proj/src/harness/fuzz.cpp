// SPDX-License-Identifier: MIT
#include "dbx/fuzz.hpp"

#include <charconv>
#include <random>

#include "dbx/ejson.hpp"

namespace dbx::fuzz {

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// --------------------------------------------------------------- printing

namespace {

std::string double_literal(double d) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string literal(const Value& v) {
  if (v.is_null()) return "null";
  if (v.is_int()) return v.as_int().get_str();
  if (v.is_double()) return double_literal(v.as_double());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  return "'" + v.as_text() + "'";
}

const char* agg_name(alg::Agg a) {
  switch (a) {
    case alg::Agg::Sum: return "sum";
    case alg::Agg::Count:
    case alg::Agg::CountStar: return "count";
    case alg::Agg::Avg: return "avg";
    case alg::Agg::Min: return "min";
    case alg::Agg::Max: return "max";
  }
  return "?";
}

std::string expr_sql(const FExpr& e) {
  switch (e.kind) {
    case FExpr::Kind::Col: return e.col;
    case FExpr::Kind::Const: return literal(e.value);
    case FExpr::Kind::Arith:
      return "(" + expr_sql(*e.args[0]) + " " + e.op + " " + expr_sql(*e.args[1]) + ")";
    case FExpr::Kind::Agg: return std::string(agg_name(e.agg)) + "(" + expr_sql(*e.args[0]) + ")";
    case FExpr::Kind::CountStar: return "count(*)";
  }
  return "?";
}

std::string formula_sql(const FFormula& f) {
  switch (f.kind) {
    case FFormula::Kind::Cmp:
      return "(" + expr_sql(*f.args[0]) + " " + f.op + " " + expr_sql(*f.args[1]) + ")";
    case FFormula::Kind::And: return "(" + formula_sql(*f.a) + " and " + formula_sql(*f.b) + ")";
    case FFormula::Kind::Or: return "(" + formula_sql(*f.a) + " or " + formula_sql(*f.b) + ")";
    case FFormula::Kind::Not: return "not " + formula_sql(*f.a);
    case FFormula::Kind::Exists: return "exists (" + to_sql(*f.q) + ")";
    case FFormula::Kind::In: return "(" + expr_sql(*f.args[0]) + " in (" + to_sql(*f.q) + "))";
    case FFormula::Kind::Quant:
      return "(" + expr_sql(*f.args[0]) + " " + f.op + (f.all ? " all (" : " any (") +
             to_sql(*f.q) + "))";
  }
  return "?";
}

}  // namespace

std::string to_sql(const FQuery& q) {
  if (q.kind != FQuery::Kind::Select) {
    const char* op = q.kind == FQuery::Kind::Union ? "union"
                     : q.kind == FQuery::Kind::Except ? "except"
                                                      : "intersect";
    return "(" + to_sql(*q.lhs) + ") " + op + (q.all ? " all (" : " (") + to_sql(*q.rhs) + ")";
  }
  std::string s = "select ";
  for (std::size_t i = 0; i < q.items.size(); ++i)
    s += (i ? ", " : "") + expr_sql(*q.items[i].first) + " as " + q.items[i].second;
  s += " from ";
  for (std::size_t i = 0; i < q.from.size(); ++i) {
    const FFrom& f = q.from[i];
    s += i ? ", " : "";
    s += f.sub ? "(" + to_sql(*f.sub) + ")" : f.table;
    s += " as " + f.alias;
  }
  if (q.where) s += " where " + formula_sql(*q.where);
  if (!q.group.empty()) {
    s += " group by ";
    for (std::size_t i = 0; i < q.group.size(); ++i) s += (i ? ", " : "") + expr_sql(*q.group[i]);
  }
  if (q.having) s += " having " + formula_sql(*q.having);
  return s;
}

std::string Case::ddl() const {
  std::string s;
  for (auto& t : schema.tables()) {
    s += "create table " + t.name + " (";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      s += (i ? ", " : "") + t.columns[i].name + " " +
           (t.columns[i].type == ColumnType::Int ? "int" : "double precision");
    s += ");\n";
  }
  return s;
}

std::string Case::query_sql() const { return to_sql(*query) + ";"; }
std::string Case::sql() const { return ddl() + query_sql() + "\n"; }

std::string Case::instance_json() const {
  EMembers tables;
  for (std::size_t k = 0; k < schema.tables().size(); ++k) {
    const TableSchema& t = schema.tables()[k];
    std::vector<EJson> rs;
    for (auto& row : rows[k]) {
      EMembers ms;
      for (std::size_t c = 0; c < t.columns.size(); ++c)
        ms.emplace_back(t.columns[c].name, EJson::from_scalar(row[c]));
      rs.push_back(EJson::object(std::move(ms)));
    }
    tables.emplace_back(t.name, EJson::array(std::move(rs)));
  }
  return print_ejson(EJson::object(std::move(tables)));
}

Instance Case::instance() const { return load_instance(schema, instance_json()); }

// -------------------------------------------------------------- generation

namespace {

struct Level {
  std::vector<std::string> cols;
  bool grouped = false;
  std::vector<std::string> keys;

  const std::vector<std::string>& visible() const { return grouped ? keys : cols; }
};

enum class Mode { Row, Group, InAgg };

class Generator {
 public:
  Generator(std::uint64_t seed, const Config& cfg) : rng_(seed), cfg_(cfg) {}

  Case run() {
    Case c;
    for (int t = 1; t <= 3; ++t) {
      TableSchema ts;
      ts.name = "t" + std::to_string(t);
      for (const char* base : {"a", "b"})
        ts.columns.push_back({base + std::to_string(t), chance(0.5) ? ColumnType::Int : ColumnType::Double});
      c.schema.add(ts);
      types_.push_back(ts.columns);
    }
    for (auto& t : c.schema.tables()) {
      std::vector<std::vector<Value>> rs;
      int n = pick(0, cfg_.max_rows);
      for (int r = 0; r < n; ++r) {
        std::vector<Value> row;
        for (auto& col : t.columns) row.push_back(value(col.type));
        rs.push_back(std::move(row));
      }
      c.rows.push_back(std::move(rs));
    }
    c.query = query(1, {}, -1);
    return c;
  }

 private:
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  template <class T>
  const T& one_of(const std::vector<T>& xs) {
    return xs[std::size_t(pick(0, int(xs.size()) - 1))];
  }

  Value value(ColumnType t) {
    if (chance(cfg_.p_null)) return Value();
    if (t == ColumnType::Int) return Value(pick(-2, 3));
    return Value(pick(-8, 12) / 4.0);
  }

  FE make_expr(FExpr e) { return std::make_shared<const FExpr>(std::move(e)); }

  FE constant() {
    FExpr e{};
    e.kind = FExpr::Kind::Const;
    e.value = value(chance(0.5) ? ColumnType::Int : ColumnType::Double);
    return make_expr(std::move(e));
  }

  FE column(const std::string& c) {
    FExpr e{};
    e.kind = FExpr::Kind::Col;
    e.col = c;
    return make_expr(std::move(e));
  }

  std::vector<std::string> columns(const std::vector<Level>& levels, Mode mode) {
    std::vector<std::string> out;
    const Level& inner = levels.back();
    if (mode == Mode::InAgg) {
      out = inner.cols;
      if (chance(0.15))
        for (std::size_t i = 0; i + 1 < levels.size(); ++i)
          for (auto& c : levels[i].visible()) out.push_back(c);
      return out;
    }
    out = mode == Mode::Group ? inner.keys : inner.cols;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
      for (auto& c : levels[i].visible()) out.push_back(c);
    return out;
  }

  FE expr(const std::vector<Level>& levels, Mode mode, int depth) {
    double r = std::uniform_real_distribution<double>(0, 1)(rng_);
    if (mode == Mode::Group && r < 0.45) {
      FExpr e{};
      static const std::vector<alg::Agg> aggs = {alg::Agg::Sum, alg::Agg::Count, alg::Agg::Avg,
                                                 alg::Agg::Min, alg::Agg::Max, alg::Agg::CountStar};
      e.agg = one_of(aggs);
      if (e.agg == alg::Agg::CountStar) {
        e.kind = FExpr::Kind::CountStar;
      } else {
        e.kind = FExpr::Kind::Agg;
        e.args = {expr(levels, Mode::InAgg, 1)};
      }
      return make_expr(std::move(e));
    }
    auto cols = columns(levels, mode);
    if (r < 0.75 && !cols.empty()) return column(one_of(cols));
    if (depth > 0 && r < 0.9) {
      FExpr e{};
      e.kind = FExpr::Kind::Arith;
      e.op = chance(0.1) ? '/' : "+-*"[pick(0, 2)];
      e.args = {expr(levels, mode, depth - 1), expr(levels, mode, depth - 1)};
      return make_expr(std::move(e));
    }
    return constant();
  }

  std::string comparison() {
    static const std::vector<std::string> ops = {"=", "<>", "<", "<=", ">", ">="};
    return one_of(ops);
  }

  FF formula(const std::vector<Level>& levels, Mode mode, int qdepth, int fdepth) {
    FFormula f{};
    double r = std::uniform_real_distribution<double>(0, 1)(rng_);
    if (fdepth > 0 && r < 0.2) {
      int k = pick(0, 2);
      f.kind = k == 0 ? FFormula::Kind::And : k == 1 ? FFormula::Kind::Or : FFormula::Kind::Not;
      f.a = formula(levels, mode, qdepth, fdepth - 1);
      if (f.kind != FFormula::Kind::Not) f.b = formula(levels, mode, qdepth, fdepth - 1);
    } else if (qdepth < cfg_.max_depth && r < 0.2 + cfg_.p_hard) {
      int k = pick(0, 2);
      if (k == 0) {
        f.kind = FFormula::Kind::Exists;
        f.q = query(qdepth + 1, levels, -1);
      } else {
        f.kind = k == 1 ? FFormula::Kind::In : FFormula::Kind::Quant;
        f.args = {expr(levels, mode, 1)};
        if (k == 2) {
          f.op = comparison();
          f.all = chance(0.5);
        }
        f.q = query(qdepth + 1, levels, 1);
      }
    } else {
      f.kind = FFormula::Kind::Cmp;
      f.op = comparison();
      f.args = {expr(levels, mode, 1), expr(levels, mode, 1)};
    }
    return std::make_shared<const FFormula>(std::move(f));
  }

  FQ query(int qdepth, const std::vector<Level>& outer, int arity) {
    if (chance(0.12)) {
      FQuery q;
      int k = pick(0, 2);
      q.kind = k == 0 ? FQuery::Kind::Union : k == 1 ? FQuery::Kind::Except : FQuery::Kind::Intersect;
      q.all = chance(0.5);
      int n = arity > 0 ? arity : pick(1, 2);
      q.lhs = select(qdepth, outer, n);
      q.rhs = select(qdepth, outer, n);
      return std::make_shared<const FQuery>(std::move(q));
    }
    return select(qdepth, outer, arity);
  }

  FQ select(int qdepth, const std::vector<Level>& outer, int arity) {
    FQuery q;
    Level cur;
    int nfrom = chance(0.4) ? 2 : 1;
    for (int i = 0; i < nfrom; ++i) {
      FFrom f;
      f.alias = "x" + std::to_string(next_alias_++);
      if (qdepth < cfg_.max_depth && chance(0.1)) {
        int n = pick(1, 2);
        f.sub = query(qdepth + 1, outer, n);
        for (int k = 0; k < n; ++k) cur.cols.push_back(f.alias + ".c" + std::to_string(k));
      } else {
        int t = pick(0, 2);
        f.table = "t" + std::to_string(t + 1);
        for (auto& c : types_[std::size_t(t)]) cur.cols.push_back(f.alias + "." + c.name);
      }
      q.from.push_back(std::move(f));
    }

    std::vector<Level> levels = outer;
    levels.push_back(cur);
    if (chance(0.7)) q.where = formula(levels, Mode::Row, qdepth, 2);

    bool grouped = chance(cfg_.p_grouped);
    if (grouped) {
      levels.back().grouped = true;
      if (!chance(0.1)) {
        int n = chance(0.3) ? 2 : 1;
        std::vector<std::string> pool = cur.cols;
        for (int i = 0; i < n && !pool.empty(); ++i) {
          std::size_t k = std::size_t(pick(0, int(pool.size()) - 1));
          levels.back().keys.push_back(pool[k]);
          q.group.push_back(column(pool[k]));
          pool.erase(pool.begin() + long(k));
        }
      }
    }
    Mode mode = grouped ? Mode::Group : Mode::Row;
    int n = arity > 0 ? arity : pick(1, 2);
    for (int k = 0; k < n; ++k) q.items.emplace_back(expr(levels, mode, 1), "c" + std::to_string(k));
    if (grouped && chance(0.6)) q.having = formula(levels, Mode::Group, qdepth, 1);
    return std::make_shared<const FQuery>(std::move(q));
  }

  std::mt19937_64 rng_;
  Config cfg_;
  std::vector<std::vector<Column>> types_;
  int next_alias_ = 0;
};

}  // namespace

Case generate(std::uint64_t seed, const Config& cfg) { return Generator(seed, cfg).run(); }

// ---------------------------------------------------------------- shrinking

namespace {

std::size_t esize(const FE& e) {
  std::size_t n = 1;
  for (auto& a : e->args) n += esize(a);
  return n;
}

std::size_t qsize(const FQ& q);

std::size_t fsize(const FF& f) {
  if (!f) return 0;
  std::size_t n = 1 + fsize(f->a) + fsize(f->b);
  for (auto& a : f->args) n += esize(a);
  if (f->q) n += qsize(f->q);
  return n;
}

std::size_t qsize(const FQ& q) {
  if (!q) return 0;
  std::size_t n = 1 + qsize(q->lhs) + qsize(q->rhs) + fsize(q->where) + fsize(q->having);
  for (auto& [e, name] : q->items) n += esize(e);
  for (auto& g : q->group) n += esize(g);
  for (auto& f : q->from) n += 1 + qsize(f.sub);
  return n;
}

std::vector<FE> expr_cands(const FE& e) {
  std::vector<FE> out;
  if (e->kind == FExpr::Kind::Arith) {
    out.push_back(e->args[0]);
    out.push_back(e->args[1]);
  }
  if (e->kind == FExpr::Kind::Agg && esize(e->args[0]) > 1) {
    FExpr c{};
    c.kind = FExpr::Kind::CountStar;
    c.agg = alg::Agg::CountStar;
    out.push_back(std::make_shared<const FExpr>(std::move(c)));
  }
  for (std::size_t i = 0; i < e->args.size(); ++i)
    for (auto& c : expr_cands(e->args[i])) {
      auto n = std::make_shared<FExpr>(*e);
      n->args[i] = c;
      out.push_back(n);
    }
  return out;
}

std::vector<FQ> query_cands(const FQ& q);

std::vector<FF> formula_cands(const FF& f) {
  std::vector<FF> out;
  if (f->a) out.push_back(f->a);
  if (f->b) out.push_back(f->b);
  if (f->a)
    for (auto& c : formula_cands(f->a)) {
      auto n = std::make_shared<FFormula>(*f);
      n->a = c;
      out.push_back(n);
    }
  if (f->b)
    for (auto& c : formula_cands(f->b)) {
      auto n = std::make_shared<FFormula>(*f);
      n->b = c;
      out.push_back(n);
    }
  for (std::size_t i = 0; i < f->args.size(); ++i)
    for (auto& c : expr_cands(f->args[i])) {
      auto n = std::make_shared<FFormula>(*f);
      n->args[i] = c;
      out.push_back(n);
    }
  if (f->q)
    for (auto& c : query_cands(f->q)) {
      auto n = std::make_shared<FFormula>(*f);
      n->q = c;
      out.push_back(n);
    }
  return out;
}

std::vector<FQ> query_cands(const FQ& q) {
  std::vector<FQ> out;
  auto edit = [&](auto&& fn) {
    auto n = std::make_shared<FQuery>(*q);
    fn(*n);
    out.push_back(n);
  };
  if (q->kind != FQuery::Kind::Select) {
    out.push_back(q->lhs);
    out.push_back(q->rhs);
    for (auto& c : query_cands(q->lhs)) edit([&](FQuery& n) { n.lhs = c; });
    for (auto& c : query_cands(q->rhs)) edit([&](FQuery& n) { n.rhs = c; });
    return out;
  }
  if (q->where) edit([](FQuery& n) { n.where = nullptr; });
  if (q->having) edit([](FQuery& n) { n.having = nullptr; });
  for (std::size_t i = 0; i < q->group.size(); ++i)
    edit([&](FQuery& n) { n.group.erase(n.group.begin() + long(i)); });
  if (q->from.size() > 1)
    for (std::size_t i = 0; i < q->from.size(); ++i)
      edit([&](FQuery& n) { n.from.erase(n.from.begin() + long(i)); });
  if (q->items.size() > 1)
    for (std::size_t i = 0; i < q->items.size(); ++i)
      edit([&](FQuery& n) {
        n.items.erase(n.items.begin() + long(i));
        for (std::size_t k = 0; k < n.items.size(); ++k) n.items[k].second = "c" + std::to_string(k);
      });
  if (q->where)
    for (auto& c : formula_cands(q->where)) edit([&](FQuery& n) { n.where = c; });
  if (q->having)
    for (auto& c : formula_cands(q->having)) edit([&](FQuery& n) { n.having = c; });
  for (std::size_t i = 0; i < q->items.size(); ++i)
    for (auto& c : expr_cands(q->items[i].first)) edit([&](FQuery& n) { n.items[i].first = c; });
  for (std::size_t i = 0; i < q->from.size(); ++i)
    if (q->from[i].sub)
      for (auto& c : query_cands(q->from[i].sub)) edit([&](FQuery& n) { n.from[i].sub = c; });
  return out;
}

}  // namespace

std::size_t size(const Case& c) {
  std::size_t n = qsize(c.query);
  for (auto& t : c.rows) n += t.size();
  return n;
}

std::vector<Case> shrink_candidates(const Case& c) {
  std::vector<Case> out;
  for (std::size_t t = 0; t < c.rows.size(); ++t)
    for (std::size_t r = 0; r < c.rows[t].size(); ++r) {
      Case d = c;
      d.rows[t].erase(d.rows[t].begin() + long(r));
      out.push_back(std::move(d));
    }
  for (auto& q : query_cands(c.query)) {
    Case d = c;
    d.query = q;
    out.push_back(std::move(d));
  }
  return out;
}

Case shrink(const Case& c, const std::function<bool(const Case&)>& still_fails, int* steps) {
  Case cur = c;
  int n = 0;
  for (bool progress = true; progress;) {
    progress = false;
    for (auto& cand : shrink_candidates(cur))
      if (still_fails(cand)) {
        cur = cand;
        ++n;
        progress = true;
        break;
      }
  }
  if (steps) *steps = n;
  return cur;
}

}  // namespace dbx::fuzz

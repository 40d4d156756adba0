// SPDX-License-Identifier: MIT
#include "dbx/difftest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <optional>
#include <thread>

#include <json.hpp>

#include "dbx/alg2nra.hpp"

namespace dbx::difftest {

namespace {

struct Result {
  std::optional<Data> value;
  std::string error;
};

template <class F>
Result attempt(F&& f) {
  try {
    return {f(), ""};
  } catch (const std::exception& e) {
    return {std::nullopt, e.what()};
  }
}

// Agreement of two evaluations: equal bags, or both failed.
bool agree(const Result& a, const Result& b) {
  if (a.value && b.value) return bag_equal(*a.value, *b.value);
  return !a.value && !b.value;
}

std::string show(const Result& r) {
  if (!r.value) return "error: " + r.error;
  std::string s = to_string(*r.value);
  return s.size() > 400 ? s.substr(0, 400) + "..." : s;
}

// -------------------------------------------------- subqueries and shapes

alg::StaticSlice slice_of(const std::vector<std::string>& attrs, std::vector<alg::ExprP> group,
                          bool grouped) {
  return alg::StaticSlice{attrs, std::move(group), grouped, {}};
}

alg::StaticEnv push(const alg::StaticEnv& env, alg::StaticSlice s) {
  alg::StaticEnv out{std::move(s)};
  out.insert(out.end(), env.begin(), env.end());
  return out;
}

using Sub = std::pair<alg::QueryP, alg::StaticEnv>;

void subqueries(const alg::Query& q, const alg::StaticEnv& env, const Schema& schema,
                std::vector<Sub>& out);

void subqueries(const alg::Formula& f, const alg::StaticEnv& env, const Schema& schema,
                std::vector<Sub>& out) {
  if (f.lhs) subqueries(*f.lhs, env, schema, out);
  if (f.rhs) subqueries(*f.rhs, env, schema, out);
  if (f.query) {
    out.emplace_back(f.query, env);
    subqueries(*f.query, env, schema, out);
  }
}

void subqueries(const alg::Query& q, const alg::StaticEnv& env, const Schema& schema,
                std::vector<Sub>& out) {
  using K = alg::Query::Kind;
  if (q.lhs) subqueries(*q.lhs, env, schema, out);
  if (q.rhs && q.kind != K::Project && q.kind != K::Sigma && q.kind != K::Gamma)
    subqueries(*q.rhs, env, schema, out);
  if (!q.formula) return;
  auto attrs = alg::sort_of(*q.lhs, schema);
  if (q.kind == K::Sigma) subqueries(*q.formula, push(env, slice_of(attrs, {}, false)), schema, out);
  if (q.kind == K::Gamma) subqueries(*q.formula, push(env, slice_of(attrs, q.group, true)), schema, out);
}

Value random_value(const std::string& attr, const Schema& schema, std::mt19937_64& rng) {
  std::optional<ColumnType> type;
  std::string column = attr.substr(attr.find('.') + 1);
  for (auto& t : schema.tables())
    for (auto& c : t.columns)
      if (c.name == column) type = c.type;
  std::uniform_int_distribution<int> coin(0, 3);
  if (coin(rng) == 0) return Value();
  if (!type) type = coin(rng) % 2 ? ColumnType::Int : ColumnType::Double;
  if (*type == ColumnType::Int) return Value(std::uniform_int_distribution<int>(-2, 3)(rng));
  return Value(std::uniform_int_distribution<int>(-8, 12)(rng) / 4.0);
}

}  // namespace

alg::Env random_env(const alg::StaticEnv& shape, const Schema& schema, std::mt19937_64& rng) {
  alg::Env env;
  for (auto it = shape.rbegin(); it != shape.rend(); ++it) {
    alg::Slice s;
    s.attrs = it->attrs;
    s.group = it->group;
    s.grouped = it->grouped;
    std::vector<std::string> keys;
    for (auto& g : it->group)
      if (g->kind == alg::Expr::Kind::Attr) keys.push_back(g->attr);
    std::vector<std::pair<std::string, Value>> shared;
    for (auto& k : keys) shared.emplace_back(k, random_value(k, schema, rng));
    int n = it->grouped ? std::uniform_int_distribution<int>(1, 3)(rng) : 1;
    for (int i = 0; i < n; ++i) {
      std::vector<Tuple::Entry> entries;
      for (auto& a : it->attrs) {
        auto k = std::find_if(shared.begin(), shared.end(), [&](auto& p) { return p.first == a; });
        entries.emplace_back(a, k != shared.end() ? k->second : random_value(a, schema, rng));
      }
      s.tuples.emplace_back(std::move(entries));
    }
    env = env.push(std::move(s));
  }
  return env;
}

namespace {

struct Features {
  bool grouped = false, having = false, exists = false, in = false, quant = false, setop = false;
};

void walk(const fuzz::FExpr& e, Features& f) {
  if (e.kind == fuzz::FExpr::Kind::Agg || e.kind == fuzz::FExpr::Kind::CountStar) f.grouped = true;
  for (auto& a : e.args) walk(*a, f);
}

void walk(const fuzz::FQuery& q, Features& f);

void walk(const fuzz::FFormula& g, Features& f) {
  using K = fuzz::FFormula::Kind;
  f.exists = f.exists || g.kind == K::Exists;
  f.in = f.in || g.kind == K::In;
  f.quant = f.quant || g.kind == K::Quant;
  for (auto& a : g.args) walk(*a, f);
  if (g.a) walk(*g.a, f);
  if (g.b) walk(*g.b, f);
  if (g.q) walk(*g.q, f);
}

void walk(const fuzz::FQuery& q, Features& f) {
  if (q.kind != fuzz::FQuery::Kind::Select) {
    f.setop = true;
    walk(*q.lhs, f);
    walk(*q.rhs, f);
    return;
  }
  for (auto& [e, n] : q.items) walk(*e, f);
  for (auto& fr : q.from)
    if (fr.sub) walk(*fr.sub, f);
  if (q.where) walk(*q.where, f);
  if (!q.group.empty()) f.grouped = true;
  if (q.having) {
    f.having = f.grouped = true;
    walk(*q.having, f);
  }
}

std::string features_of(const fuzz::Case& c) {
  Features f;
  walk(*c.query, f);
  bool nulls = c.query_sql().find("null") != std::string::npos;
  for (auto& t : c.rows)
    for (auto& r : t)
      for (auto& v : r) nulls = nulls || v.is_null();
  std::string out;
  for (auto [on, name] : {std::pair{f.grouped, "grouped"}, {f.having, "having"}, {f.exists, "exists"},
                          {f.in, "in"}, {f.quant, "quant"}, {f.setop, "setop"}, {nulls, "nulls"}})
    if (on) out += std::string(out.empty() ? "" : " ") + name;
  return out;
}

bool rejected_by_front_end(const std::exception& e) {
  return dynamic_cast<const sql::SqlError*>(&e) || dynamic_cast<const alg::WellFormedError*>(&e);
}

}  // namespace

CaseResult check_case(const fuzz::Case& c, const Options& opts) {
  CaseResult r;
  r.sql = c.sql();
  r.instance = c.instance_json();
  r.features = features_of(c);
  auto fail = [&](std::string check, std::string pair, std::string detail) {
    r.outcome = Outcome::Fail;
    r.check = std::move(check);
    r.pair = std::move(pair);
    r.detail = std::move(detail);
    return r;
  };

  pipeline::Artifacts a;
  try {
    a = pipeline::compile(r.sql);
  } catch (const std::exception& e) {
    if (rejected_by_front_end(e)) {
      r.outcome = Outcome::Rejected;
      r.detail = e.what();
      return r;
    }
    return fail("compile", "", e.what());
  }
  if (opts.tamper) opts.tamper(a);
  Instance db = c.instance();
  Data input = instance_to_data(db);

  // Stage chain, starting from the algebra interpreter.
  std::vector<Result> results;
  for (auto p : pipeline::all_points())
    results.push_back(attempt([&] { return pipeline::eval_at(a, p, db); }));
  bool all_failed = std::all_of(results.begin(), results.end(), [](auto& x) { return !x.value; });
  if (all_failed) {
    r.outcome = Outcome::Rejected;
    r.detail = "runtime error at every stage: " + results[0].error;
    return r;
  }
  const auto& points = pipeline::all_points();
  if (!agree(results[0], results[1]))
    return fail("translation", "sqlalg/nrae", show(results[0]) + " vs " + show(results[1]));
  for (std::size_t i = 2; i < results.size(); ++i)
    if (!agree(results[i - 1], results[i]))
      return fail("stages",
                  pipeline::point_name(points[i - 1]) + "/" + pipeline::point_name(points[i]),
                  show(results[i - 1]) + " vs " + show(results[i]));

  // Optimizer and group-by desugaring.
  nra::Q opt = opts.optimizer(a.nrae);
  Result ro = attempt([&] { return nra::eval_top(opt, Data::record({}), input); });
  if (!agree(results[1], ro)) return fail("optimizer", "nrae/nrae-opt", show(results[1]) + " vs " + show(ro));
  Result rd = attempt([&] { return nra::eval_top(nra::desugar_all(a.nrae), Data::record({}), input); });
  if (!agree(results[1], rd))
    return fail("desugar", "nrae/nrae-desugared", show(results[1]) + " vs " + show(rd));
  Result rol = attempt([&] {
    auto b = pipeline::from_nrae(a.front, opt);
    return pipeline::eval_at(b, pipeline::Point::ImpEJson, db);
  });
  if (!agree(ro, rol)) return fail("optimizer", "nrae-opt/imp-ejson-opt", show(ro) + " vs " + show(rol));

  // Environment invariant on random environments.
  std::mt19937_64 rng(fuzz::sub_seed(opts.seed ^ 0x5eedULL, std::hash<std::string>{}(r.sql)));
  std::vector<Sub> subs;
  subqueries(*a.front.algebra, {}, a.front.schema, subs);
  alg::StaticEnv unrelated = {slice_of({"z0.u", "z0.v"}, {}, false)};
  subs.emplace_back(a.front.algebra, unrelated);
  r.subqueries = int(subs.size());
  for (auto& [q, shape] : subs)
    for (int k = 0; k < opts.envs_per_subquery; ++k) {
      alg::Env env = random_env(shape, a.front.schema, rng);
      Result lhs = attempt([&] { return bag_to_data(alg::eval_query(*q, env, db)); });
      Result rhs = attempt([&] {
        nra::Q t = alg2nra::translate_query(alg::static_of(env), *q, a.front.schema);
        return nra::eval(t, alg2nra::runtime_of(env), Data::unit(), input);
      });
      if (!agree(lhs, rhs))
        return fail("translation-env", "sqlalg/nrae",
                    "subquery " + alg::print(*q) + ": " + show(lhs) + " vs " + show(rhs));
    }
  return r;
}

Report run(const Options& opts) {
  auto start = std::chrono::steady_clock::now();
  std::vector<CaseResult> results(std::size_t(std::max(opts.cases, 0)));
  std::atomic<int> next{0};
  int nthreads = opts.threads > 0 ? opts.threads : int(std::max(1u, std::thread::hardware_concurrency()));
  nthreads = std::min(nthreads, std::max(opts.cases, 1));
  auto worker = [&] {
    for (int i = next++; i < opts.cases; i = next++) {
      std::uint64_t s = fuzz::sub_seed(opts.seed, std::uint64_t(i));
      fuzz::Case c = fuzz::generate(s, opts.fuzz);
      CaseResult r = check_case(c, opts);
      r.index = i;
      r.seed = s;
      if (r.outcome == Outcome::Fail && opts.shrink) {
        auto same = [&](const fuzz::Case& d) {
          CaseResult x = check_case(d, opts);
          return x.outcome == Outcome::Fail && x.check == r.check && x.pair == r.pair;
        };
        fuzz::Case m = fuzz::shrink(c, same, &r.shrink_steps);
        r.min_sql = m.sql();
        r.min_instance = m.instance_json();
      }
      results[std::size_t(i)] = std::move(r);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  Report rep;
  rep.seed = opts.seed;
  rep.cases = opts.cases;
  std::vector<std::string> names = {"grouped", "having", "exists", "in", "quant", "setop", "nulls"};
  std::vector<int> counts(names.size(), 0);
  for (auto& r : results) {
    switch (r.outcome) {
      case Outcome::Pass: ++rep.passed; break;
      case Outcome::Rejected: ++rep.rejected; break;
      case Outcome::Fail:
        ++rep.failed;
        rep.failures.push_back(r);
        break;
    }
    if (r.outcome == Outcome::Rejected) continue;
    rep.env_checks += r.subqueries * opts.envs_per_subquery;
    std::string f = " " + r.features + " ";
    for (std::size_t k = 0; k < names.size(); ++k)
      if (f.find(" " + names[k] + " ") != std::string::npos) ++counts[k];
  }
  for (std::size_t k = 0; k < names.size(); ++k) rep.features.emplace_back(names[k], counts[k]);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["cases"] = cases;
  j["passed"] = passed;
  j["rejected"] = rejected;
  j["failed"] = failed;
  j["env_checks"] = env_checks;
  j["seconds"] = seconds;
  nlohmann::ordered_json fs = nlohmann::ordered_json::object();
  for (auto& [n, k] : features) fs[n] = k;
  j["features"] = fs;
  j["failures"] = nlohmann::ordered_json::array();
  for (auto& r : failures) {
    nlohmann::ordered_json f;
    f["case"] = r.index;
    f["case_seed"] = r.seed;
    f["check"] = r.check;
    f["stage_pair"] = r.pair;
    f["detail"] = r.detail;
    f["sql"] = r.sql;
    f["instance"] = r.instance;
    f["minimized_sql"] = r.min_sql;
    f["minimized_instance"] = r.min_instance;
    f["shrink_steps"] = r.shrink_steps;
    j["failures"].push_back(f);
  }
  return j.dump(2);
}

}  // namespace dbx::difftest

// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "dbx/alg2nra.hpp"
#include "dbx/bench.hpp"
#include "dbx/fuzz.hpp"
#include "dbx/pipeline.hpp"
#include "paths.hpp"
#include "sql_oracle.hpp"

using namespace dbx;
using alg::Bool3;

namespace {

constexpr Bool3 F = Bool3::False, U = Bool3::Unknown, T = Bool3::True;

Data boxed_eval(const nra::Q& q) { return nra::eval(q, Data::record({}), Data::unit(), Data::record({})); }

Schema rs_schema() {
  Schema s;
  s.add({"R", {{"a", ColumnType::Int}, {"b", ColumnType::Int}}});
  s.add({"S", {{"b", ColumnType::Int}}});
  return s;
}

Tuple t(std::vector<std::pair<std::string, Value>> kv) { return Tuple(std::move(kv)); }

// The algebra result under env equals the translation
// evaluated against the runtime encoding of env, for several inputs.
void check_under_env(const std::string& algebra, const alg::Env& env, const Instance& inst) {
  auto q = alg::parse_query(algebra);
  Bag want = alg::eval_query(*q, env, inst);
  nra::Q tq = alg2nra::translate_query(alg::static_of(env), *q, rs_schema());
  Data db = instance_to_data(inst);
  for (const Data& d : {Data::unit(), Data::atom(Value(3)), db}) {
    Data got = nra::eval(tq, alg2nra::runtime_of(env), d, db);
    CHECK(bag_equal(got, bag_to_data(want)));
  }
}

}  // namespace

TEST_SUITE("boxed three-valued logic") {
  TEST_CASE("circuits reproduce the Kleene tables") {
    Bool3 vals[] = {F, U, T};
    for (Bool3 a : vals) {
      CHECK(boxed_eval(alg2nra::not_b(nra::cst(alg2nra::box(a)))) == alg2nra::box(alg::not3(a)));
      for (Bool3 b : vals) {
        nra::Q qa = nra::cst(alg2nra::box(a)), qb = nra::cst(alg2nra::box(b));
        CHECK(boxed_eval(alg2nra::and_b(qa, qb)) == alg2nra::box(alg::and3(a, b)));
        CHECK(boxed_eval(alg2nra::or_b(qa, qb)) == alg2nra::box(alg::or3(a, b)));
      }
    }
  }

  TEST_CASE("unknown is the null box") {
    CHECK(alg2nra::box(U) == null_data());
    CHECK(alg2nra::box(T) == left_atom(Value(true)));
    CHECK(boxed_eval(alg2nra::is_true_b(nra::cst(alg2nra::box(U)))) == Data::atom(Value(false)));
    CHECK(boxed_eval(alg2nra::is_true_b(nra::cst(alg2nra::box(T)))) == Data::atom(Value(true)));
  }
}

TEST_SUITE("translation") {
  TEST_CASE("benchmark queries: algebra and translation agree with the expected rows") {
    for (auto& c : bench::load_dir(testing::source_path("bench"))) {
      CAPTURE(c.name);
      auto art = pipeline::compile(c.sql);
      Instance inst = load_instance(art.front.schema, c.instance);
      Bag direct = alg::eval_query(*art.front.algebra, {}, inst);
      Data translated = nra::eval_top(art.nrae, Data::record({}), instance_to_data(inst));
      CHECK(bag_equal(translated, bag_to_data(direct)));
      CHECK(bench::rows_match(bench::parse_expected(c.expected), data_to_bag(translated)));
    }
  }

  TEST_CASE("translation matches the brute-force evaluator on generated queries") {
    int compared = 0;
    for (int k = 0; k < 300; ++k) {
      auto c = fuzz::generate(fuzz::sub_seed(99, std::uint64_t(k)));
      pipeline::Artifacts art;
      try {
        art = pipeline::compile(c.sql());
      } catch (const sql::SqlError&) {
        continue;
      }
      CAPTURE(c.sql());
      CAPTURE(c.instance_json());
      Data got = nra::eval_top(art.nrae, Data::record({}), instance_to_data(c.instance()));
      auto want = oracle::evaluate(c);
      auto rows = oracle::rows_of(data_to_bag(got));
      CHECK_MESSAGE(oracle::same_bag(want, rows), oracle::show(want) << " vs " << oracle::show(rows));
      ++compared;
    }
    CHECK(compared > 280);
  }

  TEST_CASE("correlated query under an ungrouped outer slice") {
    Instance inst = load_instance(rs_schema(), R"({"R": [], "S": [{"b":1},{"b":2},{"b":2},{"b":null}]})");
    alg::Env env = alg::Env().push(alg::Slice{{"t0.a", "t0.b"}, {}, {t({{"t0.a", Value(2)}, {"t0.b", Value()}})}, false});
    check_under_env("pi[t1.b as b](sigma[(t1.b = t0.a)](pi[S.b as t1.b](table S)))", env, inst);
    check_under_env("pi[t1.b as b](sigma[(t1.b = t0.b)](pi[S.b as t1.b](table S)))", env, inst);
  }

  TEST_CASE("aggregate evaluated over an outer group") {
    Instance inst = load_instance(rs_schema(), R"({"R": [], "S": [{"b":1},{"b":5}]})");
    alg::Slice outer{{"t0.a", "t0.b"},
                     {alg::attr("t0.a")},
                     {t({{"t0.a", Value(1)}, {"t0.b", Value(10)}}), t({{"t0.a", Value(1)}, {"t0.b", Value(20)}})},
                     true};
    alg::Env env = alg::Env().push(outer);
    // sum(t0.b) has its home in the outer group; sum(t1.b) in the inner one.
    check_under_env("gamma[sum(t0.b) as s, sum(t1.b) as u; ; true](sigma[true](pi[S.b as t1.b](table S)))", env, inst);
    Bag b = alg::eval_query(*alg::parse_query(
        "gamma[sum(t0.b) as s, sum(t1.b) as u; ; true](sigma[true](pi[S.b as t1.b](table S)))"), env, inst);
    CHECK(result_to_json(b) == R"([{"s":30,"u":6}])");
  }

  TEST_CASE("result does not depend on the input value") {
    for (auto& c : bench::load_dir(testing::source_path("bench"))) {
      auto art = pipeline::compile(c.sql);
      Data db = instance_to_data(load_instance(art.front.schema, c.instance));
      Data a = nra::eval(art.nrae, Data::record({}), Data::unit(), db);
      Data b = nra::eval(art.nrae, Data::record({}), Data::bag(std::vector<Data>{Data::unit()}), db);
      CHECK(a == b);
    }
  }
}

// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "dbx/bench.hpp"
#include "dbx/fuzz.hpp"
#include "dbx/sql_front.hpp"
#include "paths.hpp"
#include "sql_oracle.hpp"

using namespace dbx;
using alg::Bool3;

namespace {

constexpr Bool3 F = Bool3::False, U = Bool3::Unknown, T = Bool3::True;

Bag run(const std::string& sql, const std::string& instance) {
  auto c = sql::compile_sql(sql);
  return alg::eval_query(*c.algebra, {}, load_instance(c.schema, instance));
}

std::string nested_groups_db() {
  return testing::read_text(testing::source_path("bench/nested_groups.json"));
}

const char* kNestedDdl = "create table t1 (a1 int, b1 int);\ncreate table t2 (a2 int, b2 int);\n";

}  // namespace

TEST_SUITE("three-valued logic") {
  // Kleene tables, row-major over (false, unknown, true).
  TEST_CASE("and") {
    Bool3 vals[] = {F, U, T};
    Bool3 expected[3][3] = {{F, F, F}, {F, U, U}, {F, U, T}};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) CHECK(alg::and3(vals[a], vals[b]) == expected[a][b]);
  }

  TEST_CASE("or") {
    Bool3 vals[] = {F, U, T};
    Bool3 expected[3][3] = {{F, U, T}, {U, U, T}, {T, T, T}};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) CHECK(alg::or3(vals[a], vals[b]) == expected[a][b]);
  }

  TEST_CASE("not") {
    CHECK(alg::not3(F) == T);
    CHECK(alg::not3(U) == U);
    CHECK(alg::not3(T) == F);
  }
}

TEST_SUITE("environments") {
  alg::ExprP a(const char* n) { return alg::attr(n); }

  TEST_CASE("find_eval_env picks the outermost slice the expression is built upon") {
    // top: grouped slice over t2, below: grouped slice over t1 keyed on t1.a1
    alg::Env env;
    env = env.push(alg::Slice{{"t1.a1", "t1.b1"}, {a("t1.a1")}, {}, true});
    env = env.push(alg::Slice{{"t2.a2", "t2.b2"}, {a("t2.a2")}, {}, true});
    auto sum_of = [&](alg::ExprP arg) { return alg::fn(alg::Fn::Add, {alg::cst(Value(1)), alg::fn(alg::Fn::Mul, {alg::cst(Value(0)), arg})}); };
    CHECK(alg::find_eval_env(env, *sum_of(a("t2.b2"))) == 0);
    CHECK(alg::find_eval_env(env, *sum_of(a("t1.b1"))) == 1);
    CHECK(alg::find_eval_env(env, *alg::cst(Value(3))) == 0);
    // t2.b2 together with the outer group key: the inner slice
    CHECK(alg::find_eval_env(env, *alg::fn(alg::Fn::Add, {a("t2.b2"), a("t1.a1")})) == 0);
    // t2.b2 with a non-key outer attribute: nowhere
    CHECK(alg::find_eval_env(env, *alg::fn(alg::Fn::Add, {a("t2.b2"), a("t1.b1")})) == -1);
    CHECK(alg::find_eval_env(env, *a("zz")) == -1);
  }

  TEST_CASE("static and dynamic searches agree") {
    alg::Env env;
    env = env.push(alg::Slice{{"x.a"}, {}, {Tuple({{"x.a", Value(1)}})}, false});
    env = env.push(alg::Slice{{"y.b"}, {}, {}, true});
    for (auto e : {a("x.a"), a("y.b"), alg::fn(alg::Fn::Add, {a("x.a"), a("y.b")})})
      CHECK(alg::find_eval_env(env, *e) == alg::find_eval_env_static(alg::static_of(env), *e));
  }
}

TEST_SUITE("evaluation") {
  TEST_CASE("group-by walkthrough, aggregate over the inner group") {
    Bag b = run(std::string(kNestedDdl) +
                    "select a1 from t1 group by a1 having exists "
                    "(select a2 from t2 group by a2 having sum(1+0*b2) = 2);",
                nested_groups_db());
    CHECK(result_to_json(b).size() > 0);
    CHECK(bench::rows_match(bench::parse_expected(R"([{"a1":1},{"a1":2},{"a1":3}])"), b));
  }

  TEST_CASE("group-by walkthrough, aggregate over the outer group") {
    Bag b = run(std::string(kNestedDdl) +
                    "select a1 from t1 group by a1 having exists "
                    "(select a2 from t2 group by a2 having sum(1+0*b1) = 2);",
                nested_groups_db());
    CHECK(bench::rows_match(bench::parse_expected(R"([{"a1":1}])"), b));
  }

  TEST_CASE("empty grouping over an empty table yields one group") {
    Bag b = run("create table R (a int);\nselect count(*) as c, sum(a) as s from R;", "{}");
    CHECK(result_to_json(b) == R"([{"c":0,"s":null}])");
  }

  TEST_CASE("set operations are bag operations") {
    std::string ddl = "create table R (a int);\ncreate table S (a int);\n";
    std::string db = R"({"R": [{"a":1},{"a":1},{"a":2}], "S": [{"a":1}]})";
    CHECK(bench::rows_match(bench::parse_expected("[{\"a\":1},{\"a\":2}]"),
                            run(ddl + "select a from R except select a from S;", db)));
    CHECK(bench::rows_match(bench::parse_expected("[{\"a\":1}]"),
                            run(ddl + "select a from R intersect select a from S;", db)));
    CHECK(run(ddl + "select a from R union select a from S;", db).size() == 4);
  }

  TEST_CASE("agrees with the brute-force evaluator on generated queries") {
    int compared = 0;
    for (int k = 0; k < 400; ++k) {
      auto c = fuzz::generate(fuzz::sub_seed(1234, std::uint64_t(k)));
      sql::Compiled comp;
      try {
        comp = sql::compile_sql(c.sql());
      } catch (const sql::SqlError&) {
        continue;
      }
      CAPTURE(c.sql());
      CAPTURE(c.instance_json());
      auto want = oracle::evaluate(c);
      auto got = oracle::rows_of(alg::eval_query(*comp.algebra, {}, c.instance()));
      CHECK_MESSAGE(oracle::same_bag(want, got), oracle::show(want) << " vs " << oracle::show(got));
      ++compared;
    }
    CHECK(compared > 380);
  }
}

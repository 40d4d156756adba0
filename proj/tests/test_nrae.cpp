// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "dbx/bench.hpp"
#include "dbx/ejson.hpp"
#include "dbx/nrae.hpp"
#include "dbx/pipeline.hpp"
#include "dbx/sql_front.hpp"
#include "gen.hpp"
#include "group_oracle.hpp"
#include "paths.hpp"

using namespace dbx;
using namespace dbx::nra;

namespace {

Data i(long v) { return Data::atom(Value(v)); }
Data b(bool v) { return Data::atom(Value(v)); }
Data dbag(std::vector<Data> xs) { return Data::bag(std::move(xs)); }
Data drec(Fields fs) { return Data::record(std::move(fs)); }

Data ev(const Q& q, const Data& d, const Data& rho = Data::record({})) {
  return eval(q, rho, d, Data::record({}));
}

Data parse(const char* json) { return ejson_to_data(parse_ejson(json)); }

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("input, environment and constants") {
    CHECK(ev(in(), i(3)) == i(3));
    CHECK(ev(env(), i(3), i(4)) == i(4));
    CHECK(ev(cst(i(5)), i(3)) == i(5));
  }

  TEST_CASE("composition runs the right operand first") {
    Q q = comp(binary(BinaryKind::Add, in(), cst(i(1))), binary(BinaryKind::Mul, in(), cst(i(10))));
    CHECK(ev(q, i(2)) == i(21));
  }

  TEST_CASE("map, select and product over bags") {
    Data xs = dbag({i(1), i(2), i(3)});
    CHECK(bag_equal(ev(map(binary(BinaryKind::Add, in(), cst(i(1))), in()), xs), dbag({i(2), i(3), i(4)})));
    CHECK(bag_equal(ev(select(binary(BinaryKind::CmpGt, in(), cst(i(1))), in()), xs), dbag({i(2), i(3)})));
    Data ra = dbag({drec({{"a", i(1)}}), drec({{"a", i(2)}})});
    Data rb = dbag({drec({{"b", i(7)}})});
    Data p = ev(product(cst(ra), cst(rb)), Data::unit());
    CHECK(bag_equal(p, dbag({drec({{"a", i(1)}, {"b", i(7)}}), drec({{"a", i(2)}, {"b", i(7)}})})));
    CHECK_THROWS_AS(ev(map(in(), in()), i(1)), EvalError);
  }

  TEST_CASE("default picks the second operand on an empty bag") {
    CHECK(ev(default_(in(), cst(dbag({i(9)}))), dbag({})) == dbag({i(9)}));
    CHECK(ev(default_(in(), cst(dbag({i(9)}))), dbag({i(1)})) == dbag({i(1)}));
  }

  TEST_CASE("either dispatches on the tag") {
    Q q = either(binary(BinaryKind::Add, in(), cst(i(1))), cst(i(0)));
    CHECK(ev(q, Data::left(i(4))) == i(5));
    CHECK(ev(q, Data::right(Data::unit())) == i(0));
    CHECK_THROWS_AS(ev(q, i(4)), EvalError);
  }

  TEST_CASE("environment application and environment map") {
    CHECK(ev(app_env(binary(BinaryKind::Add, env(), in()), cst(i(10))), i(1)) == i(11));
    Data rho = dbag({i(1), i(2)});
    CHECK(bag_equal(ev(map_env(binary(BinaryKind::Mul, env(), cst(i(2)))), Data::unit(), rho), dbag({i(2), i(4)})));
    CHECK_THROWS_AS(ev(map_env(env()), Data::unit(), i(1)), EvalError);
  }

  TEST_CASE("table reads the instance record") {
    Data db = drec({{"R", dbag({i(1)})}});
    CHECK(eval(table("R"), Data::record({}), Data::unit(), db) == dbag({i(1)}));
    CHECK_THROWS_AS(eval(table("S"), Data::record({}), Data::unit(), db), EvalError);
    CHECK(eval_top(table("R"), Data::record({}), db) == dbag({i(1)}));
  }

  TEST_CASE("record shorthands") {
    Q q = concat(rec("a", cst(i(1))), rec("b", dot(in(), "x")));
    CHECK(ev(q, drec({{"x", i(2)}})) == drec({{"a", i(1)}, {"b", i(2)}}));
    CHECK(ev(concat(rec("a", cst(i(1))), rec("a", cst(i(2)))), Data::unit()) == drec({{"a", i(2)}}));
  }

  TEST_CASE("printed labels are quoted unless identifier-like") {
    CHECK(print(*dot(env(), "slice")) == "Env.slice");
    CHECK(print(*dot(in(), "t0.a")) == "In.\"t0.a\"");
    CHECK(print(*rec("t0.a", in())) == "{\"t0.a\": In}");
    CHECK(print(*group_by("g", {"k1", "t.k"}, in())) == "group_by[g; k1, \"t.k\"](In)");
  }

  TEST_CASE("bag operators are multiset operators") {
    Data x = dbag({i(1), i(1), i(2)});
    Data y = dbag({i(1), i(3)});
    CHECK(bag_equal(apply_binary(BinaryKind::Union, x, y), dbag({i(1), i(1), i(2), i(1), i(3)})));
    CHECK(bag_equal(apply_binary(BinaryKind::Minus, x, y), dbag({i(1), i(2)})));
    CHECK(bag_equal(apply_binary(BinaryKind::Inter, x, y), dbag({i(1)})));
    CHECK(bag_equal(apply_unary(uop(UnaryKind::Distinct), x), dbag({i(1), i(2)})));
    CHECK(apply_binary(BinaryKind::Contains, i(2), x) == b(true));
    CHECK(apply_unary(uop(UnaryKind::Single), dbag({i(4)})) == Data::left(i(4)));
    CHECK(apply_unary(uop(UnaryKind::Single), x) == null_data());
    CHECK(apply_unary(uop(UnaryKind::Count), x) == i(3));
    CHECK(apply_binary(BinaryKind::Div, i(1), i(0)) == null_data());
    CHECK(apply_binary(BinaryKind::Div, i(7), i(2)) == Data::left(i(3)));
  }
}

TEST_SUITE("group_by") {
  TEST_CASE("worked example") {
    Data input = parse(R"([{"x":1,"y":1},{"x":1,"y":2},{"x":2,"y":3}])");
    Data want = parse(R"([{"x":1,"g":[{"x":1,"y":1},{"x":1,"y":2}]},{"x":2,"g":[{"x":2,"y":3}]}])");
    CHECK(bag_equal(ev(group_by("g", {"x"}, in()), input), want));
    CHECK(bag_equal(ev(desugar_group_by("g", {"x"}, in()), input), want));
    CHECK(bag_equal(testing::group_oracle("g", {"x"}, input), want));
  }

  TEST_CASE("desugared form agrees with the builtin and the oracle on random bags") {
    testing::DataGen gen(11);
    const std::vector<std::vector<std::string>> key_sets = {{}, {"k1"}, {"k2"}, {"k1", "k2"}};
    for (int k = 0; k < 500; ++k) {
      Data input = gen.flat_bag();
      const auto& keys = key_sets[std::size_t(k) % key_sets.size()];
      CAPTURE(print_ejson(data_to_ejson(input)));
      Data want = testing::group_oracle("g", keys, input);
      Data builtin = ev(group_by("g", keys, in()), input);
      Data sugar_free = ev(desugar_group_by("g", keys, in()), input);
      CHECK(bag_equal(builtin, want));
      CHECK(bag_equal(sugar_free, want));
    }
  }

  TEST_CASE("desugar_all removes every group_by node") {
    Q q = map(dot(in(), "g"), group_by("g", {"k1"}, in()));
    Q d = desugar_all(q);
    CHECK(print(*d).find("group_by") == std::string::npos);
    testing::DataGen gen(5);
    for (int k = 0; k < 50; ++k) {
      Data input = gen.flat_bag();
      CHECK(bag_equal(ev(q, input), ev(d, input)));
    }
  }
}

TEST_SUITE("optimizer") {
  TEST_CASE("each rule fires on its pattern") {
    Q x = cst(i(3));
    CHECK(equal(*rewrite_once(comp(either(in(), cst(i(0))), left(x)), Rule::EitherLeft), *comp(in(), x)));
    CHECK(equal(*rewrite_once(comp(either(in(), cst(i(0))), right(x)), Rule::EitherRight), *comp(cst(i(0)), x)));
    CHECK(equal(*rewrite_once(comp(x, in()), Rule::CompIn), *x));
    CHECK(equal(*rewrite_once(comp(in(), x), Rule::CompIn), *x));
    CHECK(equal(*rewrite_once(map(in(), table("R")), Rule::MapIn), *table("R")));
    CHECK(equal(*rewrite_once(select(cst(b(true)), table("R")), Rule::SelectTrue), *table("R")));
    CHECK(equal(*rewrite_once(unary(uop(UnaryKind::Flatten), bag(table("R"))), Rule::FlattenBag), *table("R")));
    CHECK(all_rules().size() == 6);
  }

  TEST_CASE("rules and the full optimizer preserve meaning on translated queries") {
    for (auto& c : bench::load_dir(testing::source_path("bench"))) {
      CAPTURE(c.name);
      auto art = pipeline::compile(c.sql);
      Data db = instance_to_data(load_instance(art.front.schema, c.instance));
      Q q = art.nrae;
      Data want = eval_top(q, Data::record({}), db);
      for (Rule r : all_rules()) CHECK(bag_equal(eval_top(rewrite_once(q, r), Data::record({}), db), want));
      Q o = optimize(q);
      CHECK(size(*o) <= size(*q));
      CHECK(bag_equal(eval_top(o, Data::record({}), db), want));
    }
  }
}

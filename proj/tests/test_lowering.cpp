// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "dbx/bench.hpp"
#include "dbx/fuzz.hpp"
#include "dbx/lowering.hpp"
#include "dbx/pipeline.hpp"
#include "paths.hpp"

using namespace dbx;

namespace {

Data i(long v) { return Data::atom(Value(v)); }
Data ints(std::vector<long> xs) {
  std::vector<Data> out;
  for (long x : xs) out.push_back(i(x));
  return Data::bag(std::move(out));
}

nnrc::E plus(nnrc::E a, nnrc::E b) { return nnrc::binary(BinaryKind::Add, std::move(a), std::move(b)); }

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_SUITE("nnrc") {
  using namespace dbx::nnrc;

  TEST_CASE("evaluation of each construct") {
    CHECK(eval(let("x", cst(i(2)), plus(var("x"), var("x"))), {}) == i(4));
    CHECK(bag_equal(eval(for_("x", var("xs"), plus(var("x"), cst(i(1)))), {{"xs", ints({1, 2})}}), ints({2, 3})));
    CHECK(eval(if_(cst(Data::atom(Value(false))), cst(i(1)), cst(i(2))), {}) == i(2));
    E m = either(var("v"), "l", var("l"), "r", cst(i(0)));
    CHECK(eval(m, {{"v", Data::left(i(7))}}) == i(7));
    CHECK(eval(m, {{"v", null_data()}}) == i(0));
    CHECK_THROWS(eval(var("nope"), {}));
  }

  TEST_CASE("free variables respect binders") {
    E e = let("x", var("a"), for_("y", var("x"), plus(var("y"), var("b"))));
    auto fv = free_vars(*e);
    std::sort(fv.begin(), fv.end());
    CHECK(fv == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("stratification hoists complex operands") {
    // A loop whose source is itself a loop.
    E inner = for_("y", var("xs"), plus(var("y"), cst(i(1))));
    E e = for_("x", inner, plus(var("x"), cst(i(10))));
    CHECK(is_basic(*var("x")));
    CHECK_FALSE(is_basic(*e));
    CHECK_FALSE(is_stratified(*e));
    E s = stratify(e);
    CHECK(is_stratified(*s));
    CHECK(contains(print(*s), "t$0"));
    Bindings b{{"xs", ints({1, 2, 3})}};
    CHECK(bag_equal(eval(s, b), eval(e, b)));
  }

  TEST_CASE("translation and stratification of benchmark queries") {
    for (auto& c : bench::load_dir(testing::source_path("bench"))) {
      CAPTURE(c.name);
      auto art = pipeline::compile(c.sql);
      CHECK(is_stratified(*art.stratified));
      Instance inst = load_instance(art.front.schema, c.instance);
      Data want = pipeline::eval_at(art, pipeline::Point::SqlAlg, inst);
      CHECK(bag_equal(eval(art.nnrc, {{kDbVar, instance_to_data(inst)}}), want));
      CHECK(bag_equal(eval(art.stratified, {{kDbVar, instance_to_data(inst)}}), want));
    }
  }
}

TEST_SUITE("nnrs") {
  using namespace dbx::nnrs;
  namespace c = dbx::nnrc;

  TEST_CASE("collection push then read") {
    // ret := { for x in db: push(acc, x + 1) } read acc
    Program p{let_mut_coll("acc", for_("x", c::var(kDbVar), push("acc", plus(c::var("x"), c::cst(i(1))))),
                           assign(kRetVar, c::var("acc")))};
    CHECK(validate(p).empty());
    CHECK(bag_equal(eval(p, ints({1, 2})), ints({2, 3})));
  }

  TEST_CASE("validator rejects namespace and phase violations") {
    // push into a data variable
    Program bad_push{let_mut("v", push("v", c::cst(i(1))), assign(kRetVar, c::var("v")))};
    CHECK_FALSE(validate(bad_push).empty());
    // reading a collection during its write phase
    Program bad_read{let_mut_coll("acc", push("acc", c::var("acc")), assign(kRetVar, c::var("acc")))};
    CHECK_FALSE(validate(bad_read).empty());
    // assigning to an unknown variable
    Program bad_assign{assign("zz", c::cst(i(1)))};
    CHECK_FALSE(validate(bad_assign).empty());
    // free variable in an expression
    Program bad_free{assign(kRetVar, c::var("q"))};
    CHECK_FALSE(validate(bad_free).empty());
  }

  TEST_CASE("cross-namespace shadowing is renamed away") {
    // The collection x hides the immutable x inside its write phase.
    Program p{let("x", c::cst(i(1)),
                  let_mut_coll("x", push("x", c::var("x")), assign(kRetVar, c::var("x"))))};
    CHECK(validate(p).empty());
    CHECK_FALSE(is_cross_shadow_free(p));
    Program q = uncross_shadow(p);
    CHECK(is_cross_shadow_free(q));
    CHECK(validate(q).empty());
    CHECK(contains(print(q), "x$0"));
    CHECK(eval(q, Data::unit()) == eval(p, Data::unit()));
    CHECK(bag_equal(eval(q, Data::unit()), ints({1})));
  }

  TEST_CASE("benchmark programs are valid and shadow free after renaming") {
    for (auto& cs : bench::load_dir(testing::source_path("bench"))) {
      CAPTURE(cs.name);
      auto art = pipeline::compile(cs.sql);
      CHECK(validate(art.nnrs) == "");
      CHECK(validate(art.no_shadow) == "");
      CHECK(is_cross_shadow_free(art.no_shadow));
      CHECK(nnrsimp::validate(art.nnrsimp) == "");
    }
  }
}

TEST_SUITE("nnrsimp") {
  using namespace dbx::nnrsimp;
  namespace c = dbx::nnrc;

  TEST_CASE("declared variables and loops") {
    Program p{let("s", c::cst(i(0)),
                  seq(for_("x", c::var(kDbVar), assign("s", plus(c::var("s"), c::var("x")))),
                      assign(kRetVar, c::var("s"))))};
    CHECK(validate(p).empty());
    CHECK(eval(p, ints({1, 2, 3})) == i(6));
    Program bad{assign("s", c::cst(i(0)))};
    CHECK_FALSE(validate(bad).empty());
  }

  TEST_CASE("collections become unions") {
    nnrs::Program p{nnrs::let_mut_coll("acc", nnrs::push("acc", c::cst(i(5))), nnrs::assign(kRetVar, c::var("acc")))};
    Program q = nnrs_to_nnrsimp(p);
    CHECK(contains(print(q), "acc := (acc U bag(5))"));
    CHECK(eval(q, Data::unit()) == nnrs::eval(p, Data::unit()));
  }
}

TEST_SUITE("stage agreement") {
  TEST_CASE("every lowering point agrees on the benchmark") {
    for (bool opt : {false, true}) {
      for (auto& c : bench::load_dir(testing::source_path("bench"))) {
        CAPTURE(c.name);
        CAPTURE(opt);
        auto art = pipeline::compile(c.sql, {opt, true});
        Instance inst = load_instance(art.front.schema, c.instance);
        Data want = pipeline::eval_at(art, pipeline::Point::SqlAlg, inst);
        for (auto p : pipeline::all_points()) {
          CAPTURE(pipeline::point_name(p));
          CHECK(bag_equal(pipeline::eval_at(art, p, inst), want));
        }
      }
    }
  }

  TEST_CASE("every lowering point agrees on generated queries") {
    int compared = 0;
    for (int k = 0; k < 150; ++k) {
      auto c = fuzz::generate(fuzz::sub_seed(77, std::uint64_t(k)));
      pipeline::Artifacts art;
      try {
        art = pipeline::compile(c.sql());
      } catch (const sql::SqlError&) {
        continue;
      }
      CAPTURE(c.sql());
      Instance inst = c.instance();
      Data want = pipeline::eval_at(art, pipeline::Point::SqlAlg, inst);
      for (auto p : pipeline::all_points()) {
        CAPTURE(pipeline::point_name(p));
        CHECK(bag_equal(pipeline::eval_at(art, p, inst), want));
      }
      ++compared;
    }
    CHECK(compared > 140);
  }
}

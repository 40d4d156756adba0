// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <map>
#include <json.hpp>

#include "dbx/bench.hpp"
#include "dbx/fuzz.hpp"
#include "dbx/imp.hpp"
#include "dbx/js_backend.hpp"
#include "dbx/pipeline.hpp"
#include "paths.hpp"

using namespace dbx;
using namespace dbx::imp;
using json = nlohmann::json;

namespace {

using IE = Expr<EJson>;

EJson decode(const json& j) {
  if (j.is_null()) return EJson::null();
  if (j.is_boolean()) return EJson::boolean(j.get<bool>());
  if (j.is_number()) return EJson::number(j.get<double>());
  if (j.is_string()) return EJson::string(j.get<std::string>());
  if (j.is_array()) {
    std::vector<EJson> xs;
    for (auto& x : j) xs.push_back(decode(x));
    return EJson::array(std::move(xs));
  }
  if (j.size() == 1 && j.contains("$bigint")) return EJson::bigint(BigInt(j["$bigint"].get<std::string>()));
  EMembers ms;
  for (auto& [k, v] : j.items()) ms.emplace_back(k, decode(v));
  return EJson::object(std::move(ms));
}

// Mirrors how emitted code uses the two helpers that are not Imp functions:
// iter drives the for loop, toBool guards the if.
EJson call_vector(const std::string& fn, const json& args) {
  if (fn == "iter") {
    std::vector<EJson> seen;
    ejson_instantiation().for_each(decode(args[0]), [&](const EJson& x) { seen.push_back(x); });
    return EJson::array(std::move(seen));
  }
  if (fn == "toBool") return EJson::boolean(ejson_instantiation().to_bool(decode(args[0])));
  std::string name = fn == "member" ? "dot" : fn;
  std::vector<EJson> xs;
  std::string label;
  std::vector<std::string> labels;
  std::size_t n = args.size();
  if (fn == "member") label = args[--n].get<std::string>();
  if (fn == "project") labels = args[--n].get<std::vector<std::string>>();
  if (fn == "group_by") {
    labels = args[--n].get<std::vector<std::string>>();
    label = args[--n].get<std::string>();
  }
  for (std::size_t k = 0; k < n; ++k) xs.push_back(decode(args[k]));
  return ejson_call(name, label, labels, xs);
}

ExprP<Data> dc(long v) { return e_const(Data::atom(Value(v))); }
ExprP<Data> dv(const char* x) { return e_var<Data>(x); }
ExprP<Data> dop(const char* name, std::vector<ExprP<Data>> args) {
  return e_call<Data>(Expr<Data>::Kind::Op, name, std::move(args));
}

}  // namespace

TEST_SUITE("interpreter") {
  TEST_CASE("block scoping restores the outer binding") {
    // var x = 1; { var x = 2; ret = x; } ret = ret + x
    DataFunction f{kDbVar, kRetVar,
                   s_block<Data>({{"x", dc(1)}},
                                 {s_block<Data>({{"x", dc(2)}}, {s_assign<Data>(kRetVar, dv("x"))}),
                                  s_assign<Data>(kRetVar, dop("add", {dv(kRetVar), dv("x")}))})};
    CHECK(validate(f).empty());
    CHECK(eval_imp(f, data_instantiation(), Data::unit()) == Data::atom(Value(3)));
  }

  TEST_CASE("uninitialized reads and unassigned return fail") {
    DataFunction reads{kDbVar, kRetVar, s_block<Data>({{"x", nullptr}}, {s_assign<Data>(kRetVar, dv("x"))})};
    CHECK(validate(reads).empty());
    CHECK_THROWS_AS(eval_imp(reads, data_instantiation(), Data::unit()), ImpError);
    DataFunction silent{kDbVar, kRetVar, s_block<Data>({}, {})};
    CHECK_THROWS_AS(eval_imp(silent, data_instantiation(), Data::unit()), ImpError);
    DataFunction undeclared{kDbVar, kRetVar, s_assign<Data>("y", dc(1))};
    CHECK_FALSE(validate(undeclared).empty());
    CHECK_THROWS_AS(eval_imp(undeclared, data_instantiation(), Data::unit()), ImpError);
  }

  TEST_CASE("loops bind the element for the body only") {
    DataFunction f{kDbVar, kRetVar,
                   s_block<Data>({{"s", dc(0)}},
                                 {s_for<Data>("x", dv(kDbVar), s_assign<Data>("s", dop("add", {dv("s"), dv("x")}))),
                                  s_assign<Data>(kRetVar, dv("s"))})};
    Data in = Data::bag({Data::atom(Value(4)), Data::atom(Value(5))});
    CHECK(eval_imp(f, data_instantiation(), in) == Data::atom(Value(9)));
    DataFunction leak{kDbVar, kRetVar,
                      s_block<Data>({}, {s_for<Data>("x", dv(kDbVar), s_assign<Data>(kRetVar, dc(0))),
                                         s_assign<Data>(kRetVar, dv("x"))})};
    CHECK_FALSE(validate(leak).empty());
  }

  TEST_CASE("printed form") {
    DataFunction f{kDbVar, kRetVar, s_assign<Data>(kRetVar, dv(kDbVar))};
    CHECK(print(f).rfind("fun(db) {", 0) == 0);
    CHECK(print(f).find("return ret;") != std::string::npos);
  }
}

TEST_SUITE("runtime vectors") {
  json load_vectors() {
    return json::parse(testing::read_text(testing::source_path("tests/data/runtime_vectors.json")));
  }

  TEST_CASE("the EJson instantiation satisfies every vector") {
    json doc = load_vectors();
    int checked = 0;
    for (auto& v : doc["vectors"]) {
      std::string fn = v["fn"];
      CAPTURE(v.dump());
      if (v.value("error", false)) {
        CHECK_THROWS(call_vector(fn, v["args"]));
      } else {
        EJson got = call_vector(fn, v["args"]);
        CHECK_MESSAGE(got == decode(v["expect"]), print_ejson(got));
      }
      ++checked;
    }
    CHECK(checked >= 200);
  }

  TEST_CASE("every runtime name has at least five vectors") {
    json doc = load_vectors();
    std::map<std::string, int> count;
    for (auto& v : doc["vectors"]) ++count[v["fn"].get<std::string>()];
    for (auto& n : js::runtime_names()) {
      CAPTURE(n);
      CHECK(count[n] >= 5);
    }
    for (auto& [n, k] : count) {
      CAPTURE(n);
      auto& rt = js::runtime_names();
      CHECK(std::find(rt.begin(), rt.end(), n) != rt.end());
    }
  }
}

TEST_SUITE("instantiations") {
  TEST_CASE("Imp over Data and over EJson agree") {
    int compared = 0;
    for (auto& c : bench::load_dir(testing::source_path("bench"))) {
      CAPTURE(c.name);
      auto art = pipeline::compile(c.sql);
      Instance inst = load_instance(art.front.schema, c.instance);
      CHECK(validate(art.imp_data).empty());
      CHECK(validate(art.imp_ejson).empty());
      CHECK(bag_equal(pipeline::eval_at(art, pipeline::Point::ImpData, inst),
                      pipeline::eval_at(art, pipeline::Point::ImpEJson, inst)));
      ++compared;
    }
    for (int k = 0; k < 200; ++k) {
      auto c = fuzz::generate(fuzz::sub_seed(5, std::uint64_t(k)));
      pipeline::Artifacts art;
      try {
        art = pipeline::compile(c.sql());
      } catch (const sql::SqlError&) {
        continue;
      }
      CAPTURE(c.sql());
      Instance inst = c.instance();
      CHECK(bag_equal(pipeline::eval_at(art, pipeline::Point::ImpData, inst),
                      pipeline::eval_at(art, pipeline::Point::ImpEJson, inst)));
      ++compared;
    }
    CHECK(compared > 200);
  }

  TEST_CASE("EJson programs build arrays with push") {
    auto art = pipeline::compile("create table R (a int);\nselect a from R;");
    std::string printed = print(art.imp_ejson);
    CHECK(printed.find("push(") != std::string::npos);
    CHECK(printed.find("array()") != std::string::npos);
    CHECK(printed.find("union(") == std::string::npos);
  }
}

// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <regex>
#include <set>

#include "dbx/bench.hpp"
#include "dbx/js_backend.hpp"
#include "dbx/pipeline.hpp"
#include "paths.hpp"

using namespace dbx;
using namespace dbx::imp;

namespace {

using IE = Expr<EJson>;

ExprP<EJson> c(EJson j) { return e_const<EJson>(std::move(j)); }
ExprP<EJson> v(const char* x) { return e_var<EJson>(x); }

std::string emit(const EJsonFunction& f) { return js::print_js(js::imp_to_js(f)); }

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

// Identifiers declared with let, in order.
std::vector<std::string> declared(const std::string& src) {
  std::vector<std::string> out;
  std::regex decl(R"(let ([A-Za-z_$][A-Za-z0-9_$]*))");
  for (auto it = std::sregex_iterator(src.begin(), src.end(), decl); it != std::sregex_iterator(); ++it)
    out.push_back((*it)[1]);
  return out;
}

}  // namespace

TEST_SUITE("printing") {
  TEST_CASE("empty function") {
    EJsonFunction f{kDbVar, kRetVar, s_block<EJson>({}, {})};
    CHECK(js::print_function(js::imp_to_js(f).query) == "function query(db) {\n  let ret;\n  return ret;\n}");
  }

  TEST_CASE("module layout") {
    EJsonFunction f{kDbVar, kRetVar, s_assign<EJson>(kRetVar, e_call<EJson>(IE::Kind::Op, "dot", {v(kDbVar)}, "t0.a"))};
    CHECK(emit(f) ==
          "\"use strict\";\n"
          "const { member } = require(\"./dbcertRuntime.js\");\n"
          "\n"
          "function query(db) {\n"
          "  let ret;\n"
          "  ret = member(db, \"t0.a\");\n"
          "  return ret;\n"
          "}\n"
          "\n"
          "module.exports = { query };\n");
  }

  TEST_CASE("literals") {
    auto lit = [](EJson j) {
      std::string s = emit(EJsonFunction{kDbVar, kRetVar, s_assign<EJson>(kRetVar, c(std::move(j)))});
      std::smatch m;
      REQUIRE(std::regex_search(s, m, std::regex("ret = (.*);\n")));
      return m[1].str();
    };
    CHECK(lit(EJson::bigint(BigInt(0))) == "0n");
    CHECK(lit(EJson::bigint(BigInt("-123456789012345678901234567890"))) == "-123456789012345678901234567890n");
    CHECK(lit(EJson::number(0.1)) == "0.1");
    CHECK(lit(EJson::number(3.0)) == "3");
    CHECK(lit(EJson::number(1e21)) == "1e+21");
    CHECK(lit(EJson::number(-2.5)) == "-2.5");
    CHECK(lit(EJson::string("a\"b\n\\")) == R"("a\"b\n\\")");
    // Output stays ASCII: non-ASCII code points become UTF-16 escapes.
    CHECK(lit(EJson::string("\xc3\xa9")) == R"("\u00e9")");
    CHECK(lit(EJson::string("\xf0\x9f\x98\x80")) == R"("\ud83d\ude00")");
    CHECK(lit(EJson::null()) == "null");
    CHECK(lit(EJson::boolean(true)) == "true");
    CHECK(lit(EJson::object({{"b", EJson::null()}, {"a", EJson::bigint(BigInt(1))}})) == R"({ "a": 1n, "b": null })");
    CHECK(lit(EJson::array(std::vector<EJson>{EJson::bigint(BigInt(1))})) == "push(array(), 1n)");
  }
}

TEST_SUITE("renaming") {
  TEST_CASE("reserved words, runtime names and shadowed binders are renamed") {
    EJsonFunction f{kDbVar, kRetVar,
                    s_block<EJson>({{"let", c(EJson::bigint(BigInt(1)))}, {"iter", c(EJson::bigint(BigInt(2)))},
                                    {"x", c(EJson::null())}, {"t0.a", c(EJson::null())}},
                                   {s_block<EJson>({{"x", v("let")}}, {s_assign<EJson>(kRetVar, v("x"))}),
                                    s_assign<EJson>("x", v("iter"))})};
    std::string s = emit(f);
    auto names = declared(s);
    std::set<std::string> unique(names.begin(), names.end());
    CHECK(unique.size() == names.size());
    for (auto& n : names) {
      CAPTURE(n);
      CHECK(js::is_identifier(n));
      CHECK_FALSE(js::is_reserved_word(n));
      auto& rt = js::runtime_names();
      CHECK(std::find(rt.begin(), rt.end(), n) == rt.end());
    }
    CHECK(contains(s, "let let$"));
    CHECK(contains(s, "let iter$"));
    CHECK(contains(s, "let t0_a$"));
    // The inner x reads the renamed let and is written to ret; the outer x is assigned iter.
    std::smatch m;
    REQUIRE(std::regex_search(s, m, std::regex(R"(let (x\$\d+) = (let\$\d+);\n\s*ret = (x\$\d+);)")));
    CHECK(m[1] == m[3]);
    CHECK(std::regex_search(s, std::regex(R"(\n  x = iter\$\d+;)")));
  }

  TEST_CASE("identifier and reserved word predicates") {
    CHECK(js::is_identifier("a$1"));
    CHECK(js::is_identifier("_x"));
    CHECK_FALSE(js::is_identifier("1a"));
    CHECK_FALSE(js::is_identifier("t0.a"));
    CHECK(js::is_reserved_word("let"));
    CHECK(js::is_reserved_word("class"));
    CHECK_FALSE(js::is_reserved_word("query1"));
  }
}

TEST_SUITE("generated modules") {
  TEST_CASE("benchmark modules are deterministic, balanced and import only runtime names") {
    for (auto& cs : bench::load_dir(testing::source_path("bench"))) {
      CAPTURE(cs.name);
      auto a = pipeline::compile(cs.sql);
      auto b = pipeline::compile(cs.sql);
      std::string s = js::print_js(a.js);
      CHECK(s == js::print_js(b.js));
      std::string why;
      CHECK_MESSAGE(js::balanced_tokens(s, &why), why);
      CHECK(s.rfind("\"use strict\";\nconst {", 0) == 0);
      CHECK(contains(s, "module.exports = { query };\n"));
      CHECK(std::is_sorted(a.js.imports.begin(), a.js.imports.end()));
      for (auto& n : a.js.imports) {
        auto& rt = js::runtime_names();
        CHECK(std::find(rt.begin(), rt.end(), n) != rt.end());
      }
      auto names = declared(s);
      for (auto& n : names) CHECK(js::is_identifier(n));
    }
  }

  TEST_CASE("balance checker rejects broken sources") {
    std::string why;
    CHECK(js::balanced_tokens("f(a, [b, { c: \"}\" }]);"));
    CHECK_FALSE(js::balanced_tokens("f(a;", &why));
    CHECK_FALSE(why.empty());
    CHECK_FALSE(js::balanced_tokens("f(a));"));
    CHECK_FALSE(js::balanced_tokens("let s = \"abc;"));
    CHECK_FALSE(js::balanced_tokens("{ ( }"));
  }

  TEST_CASE("schema sidecar") {
    Schema s;
    s.add({"employees", {{"name", ColumnType::Text}, {"age", ColumnType::Int}}});
    s.add({"m", {{"x", ColumnType::Double}, {"b", ColumnType::Boolean}}});
    CHECK(print_ejson(js::schema_sidecar(s)) ==
          R"({"employees":{"age":"int","name":"text"},"m":{"b":"boolean","x":"double precision"}})");
  }
}

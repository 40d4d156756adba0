// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <set>

#include "dbx/ejson.hpp"
#include "dbx/instance.hpp"
#include "gen.hpp"

using namespace dbx;

namespace {

Data i(long v) { return Data::atom(Value(v)); }
Data d(double v) { return Data::atom(Value(v)); }
Data s(const char* v) { return Data::atom(Value(v)); }

Schema employees() {
  Schema sc;
  sc.add({"employees", {{"name", ColumnType::Text}, {"age", ColumnType::Int}}});
  return sc;
}

}  // namespace

TEST_SUITE("values") {
  TEST_CASE("integer arithmetic is exact and truncates toward zero") {
    CHECK(arith(ArithOp::Div, Value(7), Value(2)) == Value(3));
    CHECK(arith(ArithOp::Div, Value(-7), Value(2)) == Value(-3));
    CHECK(arith(ArithOp::Div, Value(7), Value(0)).is_null());
    CHECK(arith(ArithOp::Div, Value(1.0), Value(0.0)).is_null());
    BigInt big("18446744073709551616");
    CHECK(arith(ArithOp::Mul, Value(BigInt("4294967296")), Value(BigInt("4294967296"))) == Value(big));
    CHECK(arith(ArithOp::Add, Value(1), Value(0.5)) == Value(1.5));
  }

  TEST_CASE("integer and double differ structurally but compare numerically") {
    CHECK(Value(1) != Value(1.0));
    CHECK(compare_values(Value(1), Value(1.0)) == 0);
    CHECK(compare_values(Value(2), Value(1.5)) > 0);
    CHECK_THROWS_AS(compare_values(Value("a"), Value(1)), EvalError);
  }

  TEST_CASE("aggregate folds") {
    std::vector<Value> xs = {Value(1), Value(2), Value(4)};
    CHECK(sum_values(xs.data(), xs.data() + 3) == Value(7));
    CHECK(avg_values(xs.data(), xs.data() + 3) == Value(7.0 / 3.0));
    CHECK(min_values(xs.data(), xs.data() + 3) == Value(1));
    CHECK(max_values(xs.data(), xs.data() + 3) == Value(4));
    CHECK(sum_values(xs.data(), xs.data()) == Value(0));
    CHECK_THROWS_AS(avg_values(xs.data(), xs.data()), EvalError);
    std::vector<Value> tie = {Value(1.0), Value(1)};
    CHECK(min_values(tie.data(), tie.data() + 2).is_double());
  }

  TEST_CASE("literals") {
    CHECK(value_literal(Value(1.0)) == "1.0");
    CHECK(value_literal(Value(0.25)) == "0.25");
    CHECK(value_literal(Value("it's")) == "'it''s'");
    CHECK(value_literal(Value()) == "null");
  }
}

TEST_SUITE("data") {
  TEST_CASE("records sort their labels and reject duplicates") {
    Data r = Data::record({{"b", i(1)}, {"a", i(2)}});
    REQUIRE(r.fields().size() == 2);
    CHECK(r.fields()[0].first == "a");
    CHECK(r.get("b") == i(1));
    CHECK(r.find("z") == nullptr);
    CHECK_THROWS_AS(Data::record({{"a", i(1)}, {"a", i(2)}}), EvalError);
  }

  TEST_CASE("sql null is never an atom") {
    CHECK_THROWS(Data::atom(Value()));
    CHECK(null_data() == Data::right(Data::unit()));
  }

  TEST_CASE("bag equality is multiset equality") {
    CHECK(bag_equal(Data::bag({i(1), i(2)}), Data::bag({i(2), i(1)})));
    CHECK_FALSE(bag_equal(Data::bag({i(1), i(1), i(2)}), Data::bag({i(1), i(2), i(2)})));
    CHECK_FALSE(bag_equal(Data::bag({i(1)}), Data::bag({d(1.0)})));
    Data nested1 = Data::bag({Data::bag({i(1), i(2)}), Data::bag(std::vector<Data>{})});
    Data nested2 = Data::bag({Data::bag(std::vector<Data>{}), Data::bag({i(2), i(1)})});
    CHECK(bag_equal(nested1, nested2));
    CHECK(nested1 != nested2);
  }
}

TEST_SUITE("ejson") {
  TEST_CASE("encoding of each constructor") {
    CHECK(data_to_ejson(Data::unit()) == EJson::null());
    CHECK(data_to_ejson(i(3)) == EJson::bigint(BigInt(3)));
    CHECK(data_to_ejson(d(3.0)) == EJson::number(3.0));
    CHECK(data_to_ejson(s("x")) == EJson::string("x"));
    CHECK(print_ejson(data_to_ejson(Data::left(i(1)))) == "{\"$left\":1}");
    CHECK(print_ejson(data_to_ejson(null_data())) == "{\"$right\":null}");
    CHECK(print_ejson(data_to_ejson(Data::record({{"b", i(1)}, {"a", Data::bag(std::vector<Data>{})}}))) ==
          "{\"a\":[],\"b\":1}");
  }

  TEST_CASE("parsing keeps integers apart from doubles") {
    CHECK(parse_ejson("1").is_bigint());
    CHECK(parse_ejson("1.0").is_number());
    CHECK(parse_ejson("123456789012345678901234567890").as_bigint() ==
          BigInt("123456789012345678901234567890"));
    CHECK(parse_ejson("[1, 2.5, \"a\", null, true]").elements().size() == 5);
    CHECK_THROWS(parse_ejson("{"));
  }

  TEST_CASE("round trip and injectivity on random data") {
    testing::DataGen g(7);
    std::set<std::string> printed;
    std::set<Data, DataLess> seen;
    for (int k = 0; k < 2000; ++k) {
      Data x = g.data(5);
      EJson j = data_to_ejson(x);
      REQUIRE(ejson_to_data(j) == x);
      REQUIRE(ejson_to_data(parse_ejson(print_ejson(j))) == x);
      bool fresh_data = seen.insert(x).second;
      bool fresh_text = printed.insert(print_ejson(j)).second;
      REQUIRE(fresh_data == fresh_text);
    }
  }

  TEST_CASE("records with reserved labels are refused rather than confused with tags") {
    Data rec = Data::record({{"$left", i(1)}});
    CHECK(rec != Data::left(i(1)));
    CHECK_THROWS_AS(data_to_ejson(rec), EvalError);
    Data wide = Data::record({{"$left", i(1)}, {"b", i(2)}});
    CHECK_THROWS_AS(data_to_ejson(wide), EvalError);
  }
}

TEST_SUITE("persistent array") {
  TEST_CASE("branching views observe their own prefix") {
    PersistentArray<int> e;
    auto a = e.push(1);
    auto b = a.push(2);
    auto c = a.push(3);
    CHECK(a.to_vector() == std::vector<int>{1});
    CHECK(b.to_vector() == std::vector<int>{1, 2});
    CHECK(c.to_vector() == std::vector<int>{1, 3});
    CHECK(e.empty());
    CHECK(b.shares_store_with(a));
    CHECK_FALSE(c.shares_store_with(a));
  }

  TEST_CASE("random push trees match naive copies") {
    std::mt19937_64 rng(3);
    std::vector<PersistentArray<int>> views{PersistentArray<int>()};
    std::vector<std::vector<int>> naive{{}};
    for (int k = 0; k < 5000; ++k) {
      std::size_t from = std::uniform_int_distribution<std::size_t>(0, views.size() - 1)(rng);
      int v = int(rng() % 1000);
      if (rng() % 8 == 0) {
        std::size_t other = std::uniform_int_distribution<std::size_t>(0, views.size() - 1)(rng);
        views.push_back(views[from].append(views[other]));
        auto n = naive[from];
        n.insert(n.end(), naive[other].begin(), naive[other].end());
        naive.push_back(n);
      } else {
        views.push_back(views[from].push(v));
        auto n = naive[from];
        n.push_back(v);
        naive.push_back(n);
      }
    }
    for (std::size_t k = 0; k < views.size(); ++k) REQUIRE(views[k].to_vector() == naive[k]);
  }

  TEST_CASE("linear pushes extend one store") {
    PersistentArray<int> a;
    auto first = a.push(0);
    auto cur = first;
    for (int k = 1; k < 100000; ++k) cur = cur.push(k);
    CHECK(cur.size() == 100000);
    CHECK(cur.shares_store_with(first));
    CHECK(cur[99999] == 99999);
  }
}

TEST_SUITE("instances") {
  TEST_CASE("loading qualifies columns and converts cells") {
    Instance inst = load_instance(employees(), R"({"employees": [{"name": "John", "age": 40}, {"name": null}]})");
    const Bag& b = inst.table("employees");
    REQUIRE(b.size() == 2);
    CHECK(b[0].get("employees.name") == Value("John"));
    CHECK(b[0].get("employees.age") == Value(40));
    CHECK(b[1].get("employees.name").is_null());
    CHECK(b[1].get("employees.age").is_null());
  }

  TEST_CASE("schema mismatches are rejected") {
    CHECK_THROWS_AS(load_instance(employees(), R"({"employees": [{"name": 3}]})"), InstanceError);
    CHECK_THROWS_AS(load_instance(employees(), R"({"staff": []})"), InstanceError);
    CHECK_THROWS_AS(load_instance(employees(), R"({"employees": [{"wage": 3}]})"), InstanceError);
    CHECK_THROWS_AS(load_instance(employees(), R"({"employees": [{"$left": 3}]})"), InstanceError);
    CHECK_THROWS_AS(load_instance(employees(), "[1"), InstanceError);
  }

  TEST_CASE("boxed encoding of a table") {
    Instance inst = load_instance(employees(), R"({"employees": [{"name": "Jim", "age": null}]})");
    Data db = instance_to_data(inst);
    Data row = db.get("employees").items()[0];
    CHECK(row.get("employees.name") == Data::left(s("Jim")));
    CHECK(row.get("employees.age") == null_data());
  }

  TEST_CASE("results print with unqualified names") {
    Bag b = {Tuple({{"t0.name", Value("John")}}), Tuple({{"t0.name", Value()}})};
    CHECK(result_to_json(b) == R"([{"name":"John"},{"name":null}])");
    CHECK(result_to_json(Bag{}) == "[]");
    CHECK(result_to_json(bag_to_data(b)) == result_to_json(b));
  }
}

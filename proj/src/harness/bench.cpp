// SPDX-License-Identifier: MIT
#include "dbx/bench.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dbx/ejson.hpp"
#include "dbx/pipeline.hpp"

namespace dbx::bench {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw BenchError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool starts_with_ci(const std::string& s, const std::string& prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  return true;
}

Value parse_atom(const std::string& raw) {
  std::string s = trim(raw);
  if (s == "null" || s == "NULL") return Value();
  if (s == "true") return Value(true);
  if (s == "false") return Value(false);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return Value(s.substr(1, s.size() - 2));
  EJson j;
  try {
    j = parse_ejson(s);
  } catch (const std::exception&) {
    return Value(s);
  }
  if (j.is_bigint() || j.is_number()) return j.scalar();
  return Value(s);
}

std::string canon(const Value& v) {
  if (v.is_null()) return "null";
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_numeric()) {
    double d = v.is_int() ? v.as_int().get_d() : v.as_double();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
  }
  return nlohmann::json(v.as_text()).dump();
}

std::string strip(const std::string& k) {
  auto dot = k.rfind('.');
  return dot == std::string::npos ? k : k.substr(dot + 1);
}

std::string row_key(Row r) {
  std::sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::string out = "(";
  for (auto& [k, v] : r) out += k + "=" + canon(v) + ";";
  return out + ")";
}

}  // namespace

std::vector<Row> parse_expected(const std::string& raw) {
  std::string text = trim(raw);
  std::vector<Row> rows;
  if (text.empty() || text == "empty") return rows;
  if (text.front() == '[') {
    EJson j = parse_ejson(text);
    if (!j.is_array()) throw BenchError("expected output is not an array");
    for (auto& o : j.elements()) {
      if (!o.is_object()) throw BenchError("expected output row is not an object");
      Row r;
      for (auto& [k, v] : o.members()) r.emplace_back(k, v.is_null() ? Value() : v.scalar());
      rows.push_back(std::move(r));
    }
    return rows;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    auto open = text.find('(', i);
    if (open == std::string::npos) break;
    auto close = text.find(')', open);
    if (close == std::string::npos) throw BenchError("unbalanced expected row: " + text);
    Row r;
    std::stringstream fields(text.substr(open + 1, close - open - 1));
    std::string f;
    while (std::getline(fields, f, ',')) {
      auto eq = f.find('=');
      if (eq == std::string::npos) throw BenchError("expected field without '=': " + f);
      r.emplace_back(trim(f.substr(0, eq)), parse_atom(f.substr(eq + 1)));
    }
    rows.push_back(std::move(r));
    i = close + 1;
  }
  return rows;
}

bool rows_match(const std::vector<Row>& expected, const Bag& actual, std::string* why) {
  std::vector<std::string> a, e;
  for (auto& r : expected) e.push_back(row_key(r));
  for (auto& t : actual) {
    Row r;
    for (auto& [k, v] : t.entries()) r.emplace_back(strip(k), v);
    a.push_back(row_key(std::move(r)));
  }
  std::sort(a.begin(), a.end());
  std::sort(e.begin(), e.end());
  if (a == e) return true;
  if (why) {
    std::string s = "expected";
    for (auto& x : e) s += " " + x;
    s += " but got";
    for (auto& x : a) s += " " + x;
    *why = s;
  }
  return false;
}

std::vector<Case> load_file(const std::string& sql_path) {
  fs::path path(sql_path);
  std::string text = read_file(path);
  std::string suite = path.stem().string();
  fs::path instance_path = path.parent_path() / (suite + ".json");

  std::string prelude, current;
  std::vector<Case> cases;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::string t = trim(line);
    if (t.rfind("--", 0) == 0) {
      std::string body = trim(t.substr(2));
      if (starts_with_ci(body, "instance:")) {
        instance_path = path.parent_path() / trim(body.substr(9));
      } else if (starts_with_ci(body, "expected:")) {
        if (cases.empty() || !cases.back().expected.empty())
          throw BenchError(sql_path + ": expected output without a query");
        cases.back().expected = trim(body.substr(9));
        if (cases.back().expected.empty()) cases.back().expected = "empty";
      }
      continue;
    }
    if (t.empty() && trim(current).empty()) continue;
    current += line + "\n";
    if (!t.empty() && t.back() == ';') {
      std::string stmt = trim(current);
      current.clear();
      if (starts_with_ci(stmt, "create")) {
        prelude += stmt + "\n";
        continue;
      }
      Case c;
      c.suite = suite;
      c.name = suite + "#" + std::to_string(cases.size() + 1);
      c.query = stmt;
      c.sql = prelude + stmt + "\n";
      cases.push_back(std::move(c));
    }
  }
  if (!trim(current).empty()) throw BenchError(sql_path + ": unterminated statement");
  std::string instance = read_file(instance_path);
  for (auto& c : cases) {
    if (c.expected.empty()) throw BenchError(c.name + ": missing expected output");
    c.instance = instance;
  }
  return cases;
}

std::vector<Case> load_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".sql") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Case> out;
  for (auto& f : files) {
    auto cs = load_file(f.string());
    out.insert(out.end(), cs.begin(), cs.end());
  }
  return out;
}

Outcome run_case(const Case& c) {
  Outcome o;
  o.suite = c.suite;
  o.name = c.name;
  auto start = std::chrono::steady_clock::now();
  try {
    auto expected = parse_expected(c.expected);
    auto a = pipeline::compile(c.sql);
    Instance db = load_instance(a.front.schema, c.instance);
    o.valid = true;
    for (auto p : pipeline::all_points()) {
      std::string why;
      Bag got = data_to_bag(pipeline::eval_at(a, p, db));
      if (!rows_match(expected, got, &why)) {
        o.valid = false;
        o.failure = pipeline::point_name(p) + ": " + why;
        break;
      }
    }
  } catch (const std::exception& e) {
    o.valid = false;
    o.failure = e.what();
  }
  o.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return o;
}

std::vector<Outcome> run_all(const std::vector<Case>& cases) {
  std::vector<Outcome> out;
  for (auto& c : cases) out.push_back(run_case(c));
  return out;
}

std::string format_table(const std::vector<Outcome>& outcomes) {
  std::string s;
  std::map<std::string, std::pair<int, int>> suites;
  char buf[64];
  for (auto& o : outcomes) {
    std::snprintf(buf, sizeof buf, "%9.2f ms  ", o.millis);
    s += std::string(o.valid ? "ok    " : "FAIL  ") + buf + o.name;
    if (!o.valid) s += "  " + o.failure;
    s += "\n";
    auto& [valid, total] = suites[o.suite];
    valid += o.valid;
    ++total;
  }
  s += "\nsuite          valid/total\n";
  for (auto& [name, vt] : suites) {
    std::snprintf(buf, sizeof buf, "%-14s %d/%d\n", name.c_str(), vt.first, vt.second);
    s += buf;
  }
  return s;
}

}  // namespace dbx::bench

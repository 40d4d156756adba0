// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <vector>

#include "dbx/instance.hpp"

namespace dbx::bench {

// One annotated query of a benchmark file. sql holds the file's DDL prelude
// followed by the query text.
struct Case {
  std::string suite;     // file stem
  std::string name;      // suite#k
  std::string sql;
  std::string query;     // the query text alone
  std::string instance;  // JSON text of the instance
  std::string expected;  // raw text after "-- Expected:"
};

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses a .sql benchmark file. The instance is named by a
// "-- Instance: file.json" line, defaulting to the .json file with the same
// stem, resolved next to the .sql file.
std::vector<Case> load_file(const std::string& sql_path);
// Every .sql file of a directory, in file name order.
std::vector<Case> load_dir(const std::string& dir);

// A result row as attribute name (unqualified) to value.
using Row = std::vector<std::pair<std::string, Value>>;

// Accepts a JSON array of flat objects, "empty", or "(a=1,b=x); (a=2,b=y)".
std::vector<Row> parse_expected(const std::string& text);

// Bag equality where numbers compare by numeric value, ignoring the
// integer/double distinction.
bool rows_match(const std::vector<Row>& expected, const Bag& actual, std::string* why = nullptr);

struct Outcome {
  std::string suite;
  std::string name;
  bool valid = false;  // expected output at every evaluation point
  std::string failure;  // first failing point and reason
  double millis = 0;    // compile plus every evaluation
};

// Compiles and evaluates a case at every in-process point.
Outcome run_case(const Case& c);
std::vector<Outcome> run_all(const std::vector<Case>& cases);

// Per-case lines with timings, then valid/total per suite.
std::string format_table(const std::vector<Outcome>& outcomes);

}  // namespace dbx::bench

// SPDX-License-Identifier: MIT
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dbx/data.hpp"
#include "dbx/ejson.hpp"
#include "dbx/value.hpp"

namespace dbx {

enum class ColumnType { Int, Text, Boolean, Double };

const char* column_type_name(ColumnType t);

struct Column {
  std::string name;
  ColumnType type;
};

struct TableSchema {
  std::string name;
  std::vector<Column> columns;
};

class Schema {
 public:
  void add(TableSchema t);
  const TableSchema* find(const std::string& name) const;
  const std::vector<TableSchema>& tables() const { return tables_; }

 private:
  std::vector<TableSchema> tables_;
};

// Flat row: attribute name to value, attributes kept in lexicographic order.
class Tuple {
 public:
  using Entry = std::pair<std::string, Value>;

  Tuple() = default;
  explicit Tuple(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  const Value* find(const std::string& a) const;
  const Value& get(const std::string& a) const;
  std::vector<std::string> labels() const;

  bool operator==(const Tuple& o) const { return entries_ == o.entries_; }

 private:
  std::vector<Entry> entries_;
};

int tuple_compare(const Tuple& a, const Tuple& b);

using Bag = std::vector<Tuple>;

bool bag_equal(const Bag& a, const Bag& b);

// Database contents. Stored attributes are qualified as table.column.
struct Instance {
  Schema schema;
  std::map<std::string, Bag> tables;

  const Bag& table(const std::string& name) const;
};

std::string qualify(const std::string& table, const std::string& column);

Data value_to_data(const Value& v);
Data tuple_to_data(const Tuple& t);
Data bag_to_data(const Bag& b);
// Record table-name -> bag_to_data(table); every schema table is present.
Data instance_to_data(const Instance& i);

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads the JSON instance format: table name -> array of flat objects with
// unqualified column names. Missing tables are empty, missing columns null.
Instance load_instance(const Schema& schema, const std::string& json_text);
Instance load_instance(const Schema& schema, const EJson& json);

// Plain JSON rendering of a query result: boxed values unwrapped, attribute
// qualification stripped, doubles printed as JavaScript numbers.
std::string result_to_json(const Bag& b);
std::string result_to_json(const Data& boxed_bag);
Bag data_to_bag(const Data& boxed_bag);

}  // namespace dbx

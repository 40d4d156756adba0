// SPDX-License-Identifier: MIT
#include "dbx/instance.hpp"

#include <algorithm>
#include <json.hpp>

namespace dbx {

const char* column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Int: return "int";
    case ColumnType::Text: return "text";
    case ColumnType::Boolean: return "boolean";
    case ColumnType::Double: return "double precision";
  }
  return "?";
}

void Schema::add(TableSchema t) {
  if (find(t.name)) throw InstanceError("table " + t.name + " declared twice");
  tables_.push_back(std::move(t));
}

const TableSchema* Schema::find(const std::string& name) const {
  for (auto& t : tables_)
    if (t.name == name) return &t;
  return nullptr;
}

Tuple::Tuple(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i].first == entries_[i - 1].first)
      throw EvalError("duplicate attribute " + entries_[i].first);
}

const Value* Tuple::find(const std::string& a) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), a,
      [](const Entry& e, const std::string& k) { return e.first < k; });
  if (it == entries_.end() || it->first != a) return nullptr;
  return &it->second;
}

const Value& Tuple::get(const std::string& a) const {
  const Value* v = find(a);
  if (!v) throw EvalError("tuple has no attribute " + a);
  return *v;
}

std::vector<std::string> Tuple::labels() const {
  std::vector<std::string> out;
  for (auto& e : entries_) out.push_back(e.first);
  return out;
}

int tuple_compare(const Tuple& a, const Tuple& b) {
  auto& x = a.entries();
  auto& y = b.entries();
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = x[i].first.compare(y[i].first);
    if (c != 0) return c < 0 ? -1 : 1;
    c = value_total_order(x[i].second, y[i].second);
    if (c != 0) return c;
  }
  return x.size() == y.size() ? 0 : (x.size() < y.size() ? -1 : 1);
}

bool bag_equal(const Bag& a, const Bag& b) {
  if (a.size() != b.size()) return false;
  auto less = [](const Tuple& x, const Tuple& y) { return tuple_compare(x, y) < 0; };
  Bag x = a, y = b;
  std::sort(x.begin(), x.end(), less);
  std::sort(y.begin(), y.end(), less);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] == y[i])) return false;
  return true;
}

const Bag& Instance::table(const std::string& name) const {
  auto it = tables.find(name);
  if (it == tables.end()) throw EvalError("unknown table " + name);
  return it->second;
}

std::string qualify(const std::string& table, const std::string& column) {
  return table + "." + column;
}

Data value_to_data(const Value& v) {
  if (v.is_null()) return null_data();
  return Data::left(Data::atom(v));
}

Data tuple_to_data(const Tuple& t) {
  Fields fs;
  fs.reserve(t.entries().size());
  for (auto& [k, v] : t.entries()) fs.emplace_back(k, value_to_data(v));
  return Data::record(std::move(fs));
}

Data bag_to_data(const Bag& b) {
  std::vector<Data> xs;
  xs.reserve(b.size());
  for (auto& t : b) xs.push_back(tuple_to_data(t));
  return Data::bag(std::move(xs));
}

Data instance_to_data(const Instance& i) {
  Fields fs;
  for (auto& t : i.schema.tables()) {
    auto it = i.tables.find(t.name);
    fs.emplace_back(t.name, it == i.tables.end() ? Data::bag(std::vector<Data>{})
                                                 : bag_to_data(it->second));
  }
  return Data::record(std::move(fs));
}

namespace {

Value convert_cell(const EJson& j, const Column& c, const std::string& where) {
  if (j.is_null()) return Null{};
  switch (c.type) {
    case ColumnType::Int:
      if (j.is_bigint()) return j.as_bigint();
      break;
    case ColumnType::Double:
      if (j.is_number()) return j.as_number();
      if (j.is_bigint()) return j.as_bigint().get_d();
      break;
    case ColumnType::Text:
      if (j.is_string()) return j.as_string();
      break;
    case ColumnType::Boolean:
      if (j.is_bool()) return j.as_bool();
      break;
  }
  throw InstanceError(where + ": value " + print_ejson(j) + " does not match type " +
                      column_type_name(c.type));
}

}  // namespace

Instance load_instance(const Schema& schema, const std::string& json_text) {
  EJson j;
  try {
    j = parse_ejson(json_text);
  } catch (const EvalError& e) {
    throw InstanceError(e.what());
  }
  return load_instance(schema, j);
}

Instance load_instance(const Schema& schema, const EJson& json) {
  if (!json.is_object()) throw InstanceError("instance must be a JSON object");
  Instance inst;
  inst.schema = schema;
  for (auto& t : schema.tables()) inst.tables[t.name];
  for (auto& [name, rows] : json.members()) {
    const TableSchema* ts = schema.find(name);
    if (!ts) throw InstanceError("instance mentions undeclared table " + name);
    if (!rows.is_array()) throw InstanceError("table " + name + " must be an array");
    Bag& bag = inst.tables[name];
    std::size_t row = 0;
    for (auto& obj : rows.elements()) {
      std::string where = name + "[" + std::to_string(row++) + "]";
      if (!obj.is_object()) throw InstanceError(where + ": row must be an object");
      for (auto& [k, v] : obj.members()) {
        (void)v;
        if (k == kLeftKey || k == kRightKey)
          throw InstanceError(where + ": reserved key " + k);
        bool known = std::any_of(ts->columns.begin(), ts->columns.end(),
                                 [&](const Column& c) { return c.name == k; });
        if (!known) throw InstanceError(where + ": unknown column " + k);
      }
      std::vector<Tuple::Entry> es;
      for (auto& c : ts->columns) {
        const EJson* cell = obj.find(c.name);
        es.emplace_back(qualify(name, c.name),
                        cell ? convert_cell(*cell, c, where + "." + c.name) : Value(Null{}));
      }
      bag.emplace_back(std::move(es));
    }
  }
  return inst;
}

namespace {

std::string strip(const std::string& k) {
  auto p = k.rfind('.');
  return p == std::string::npos ? k : k.substr(p + 1);
}

void plain_value(std::string& out, const Value& v) {
  if (v.is_null()) {
    out += "null";
  } else if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else if (v.is_int()) {
    out += v.as_int().get_str();
  } else if (v.is_double()) {
    out += format_double(v.as_double());
  } else {
    out += nlohmann::json(v.as_text()).dump();
  }
}

}  // namespace

std::string result_to_json(const Bag& b) {
  std::string out = "[";
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += ',';
    out += '{';
    bool first = true;
    for (auto& [k, v] : b[i].entries()) {
      if (!first) out += ',';
      first = false;
      out += nlohmann::json(strip(k)).dump();
      out += ':';
      plain_value(out, v);
    }
    out += '}';
  }
  return out + "]";
}

Bag data_to_bag(const Data& boxed_bag) {
  Bag out;
  for (auto& r : boxed_bag.items()) {
    std::vector<Tuple::Entry> es;
    for (auto& [k, v] : r.fields()) {
      if (v.is_left())
        es.emplace_back(k, v.payload().atom());
      else if (v.is_right())
        es.emplace_back(k, Null{});
      else
        throw EvalError("boxed value expected for attribute " + k);
    }
    out.emplace_back(std::move(es));
  }
  return out;
}

std::string result_to_json(const Data& boxed_bag) {
  return result_to_json(data_to_bag(boxed_bag));
}

}  // namespace dbx

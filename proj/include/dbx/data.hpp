// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dbx/persistent_array.hpp"
#include "dbx/value.hpp"

namespace dbx {

class Data;
using Field = std::pair<std::string, Data>;
using Fields = std::vector<Field>;
using DataBag = PersistentArray<Data>;

// Nested data: unit | atom | record | bag | left | right.
class Data {
 public:
  enum class Kind { Unit, Atom, Record, Bag, Left, Right };

  Data() = default;

  static Data unit() { return Data(); }
  static Data atom(Value v);
  // Fields are sorted by label; duplicate labels raise EvalError.
  static Data record(Fields fields);
  static Data bag(std::vector<Data> items);
  static Data bag(DataBag items);
  static Data left(Data d);
  static Data right(Data d);

  Kind kind() const { return Kind(rep_.index()); }
  bool is_unit() const { return kind() == Kind::Unit; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_record() const { return kind() == Kind::Record; }
  bool is_bag() const { return kind() == Kind::Bag; }
  bool is_left() const { return kind() == Kind::Left; }
  bool is_right() const { return kind() == Kind::Right; }

  const Value& atom() const;
  const Fields& fields() const;
  const DataBag& items() const;
  const Data& payload() const;  // of left/right

  // Field lookup on a record; nullptr when absent.
  const Data* find(const std::string& label) const;
  const Data& get(const std::string& label) const;

  bool operator==(const Data& o) const;
  bool operator!=(const Data& o) const { return !(*this == o); }

 private:
  struct Tag {
    std::shared_ptr<const Data> d;
  };
  struct LeftTag : Tag {};
  struct RightTag : Tag {};
  std::variant<std::monostate, Value, std::shared_ptr<const Fields>, DataBag,
               LeftTag, RightTag>
      rep_;
};

// Total structural order (bags compared as sequences).
int data_compare(const Data& a, const Data& b);

struct DataLess {
  bool operator()(const Data& a, const Data& b) const {
    return data_compare(a, b) < 0;
  }
};

// Recursively sorts every bag so structurally different orderings of the
// same multisets become equal.
Data canonical(const Data& d);
bool bag_equal(const Data& a, const Data& b);

// Short printed form used in diagnostics and the NRAe printer.
std::string to_string(const Data& d);

inline Data left_atom(Value v) { return Data::left(Data::atom(std::move(v))); }
Data null_data();  // right(unit)

}  // namespace dbx

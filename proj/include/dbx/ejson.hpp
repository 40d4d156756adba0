// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dbx/data.hpp"
#include "dbx/persistent_array.hpp"
#include "dbx/value.hpp"

namespace dbx {

class EJson;
using EMember = std::pair<std::string, EJson>;
using EMembers = std::vector<EMember>;
using EArray = PersistentArray<EJson>;

// JSON extended with big integers; arrays are functional.
class EJson {
 public:
  enum class Kind { Null, Bool, Number, String, BigInt, Object, Array };

  EJson() = default;
  static EJson null() { return EJson(); }
  static EJson boolean(bool b);
  static EJson number(double d);
  static EJson string(std::string s);
  static EJson bigint(BigInt i);
  // Members sorted by key; duplicate keys raise EvalError.
  static EJson object(EMembers members);
  static EJson array(std::vector<EJson> items);
  static EJson array(EArray items);

  Kind kind() const { return Kind(rep_.index()); }
  bool is_null() const { return kind() == Kind::Null; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_number() const { return kind() == Kind::Number; }
  bool is_string() const { return kind() == Kind::String; }
  bool is_bigint() const { return kind() == Kind::BigInt; }
  bool is_object() const { return kind() == Kind::Object; }
  bool is_array() const { return kind() == Kind::Array; }

  bool as_bool() const;
  double as_number() const;
  const std::string& as_string() const;
  const BigInt& as_bigint() const;
  const EMembers& members() const;
  const EArray& elements() const;

  const EJson* find(const std::string& key) const;
  const EJson& get(const std::string& key) const;

  // Scalar payload viewed as a SQL value; objects/arrays raise EvalError.
  Value scalar() const;
  static EJson from_scalar(const Value& v);

  bool operator==(const EJson& o) const;
  bool operator!=(const EJson& o) const { return !(*this == o); }

 private:
  std::variant<std::monostate, bool, double, std::string, BigInt,
               std::shared_ptr<const EMembers>, EArray>
      rep_;
};

int ejson_compare(const EJson& a, const EJson& b);

inline const char* kLeftKey = "$left";
inline const char* kRightKey = "$right";

EJson data_to_ejson(const Data& d);
Data ejson_to_data(const EJson& j);

// Standard JSON text. Integers without fraction/exponent parse as bigint.
EJson parse_ejson(const std::string& text);
std::string print_ejson(const EJson& j);

}  // namespace dbx

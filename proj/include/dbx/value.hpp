// SPDX-License-Identifier: MIT
#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace dbx {

using BigInt = mpz_class;

struct Null {
  bool operator==(const Null&) const { return true; }
};

// A SQL scalar. Also used as the atom payload of NRAe data.
class Value {
 public:
  using Rep = std::variant<Null, bool, BigInt, double, std::string>;

  Value() = default;
  Value(Null) {}
  Value(bool b) : rep_(b) {}
  Value(BigInt i) : rep_(std::move(i)) {}
  Value(int i) : rep_(BigInt(i)) {}
  Value(long i) : rep_(BigInt(i)) {}
  Value(double d) : rep_(d) {}
  Value(std::string s) : rep_(std::move(s)) {}
  Value(const char* s) : rep_(std::string(s)) {}

  bool is_null() const { return std::holds_alternative<Null>(rep_); }
  bool is_bool() const { return std::holds_alternative<bool>(rep_); }
  bool is_int() const { return std::holds_alternative<BigInt>(rep_); }
  bool is_double() const { return std::holds_alternative<double>(rep_); }
  bool is_text() const { return std::holds_alternative<std::string>(rep_); }
  bool is_numeric() const { return is_int() || is_double(); }

  bool as_bool() const { return std::get<bool>(rep_); }
  const BigInt& as_int() const { return std::get<BigInt>(rep_); }
  double as_double() const { return std::get<double>(rep_); }
  const std::string& as_text() const { return std::get<std::string>(rep_); }
  double to_double() const;

  const Rep& rep() const { return rep_; }

  // Structural equality: same variant and same payload.
  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }

 private:
  Rep rep_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// null < bool < numeric < text; integer and double compare numerically,
// ties broken integer before double.
int value_total_order(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const {
    return value_total_order(a, b) < 0;
  }
};

// Comparison used by SQL predicates on non-null operands. Numerics compare
// across integer and double; mismatched kinds raise EvalError.
int compare_values(const Value& a, const Value& b);

enum class ArithOp { Add, Sub, Mul, Div };

// Arithmetic on non-null numerics. Division by zero yields null.
Value arith(ArithOp op, const Value& a, const Value& b);
Value negate(const Value& a);
Value concat_text(const Value& a, const Value& b);

std::string format_double(double d);
// Literal form used by the printers: 'text', 1, 1.0, true, null.
std::string value_literal(const Value& v);

// Folds over non-null numerics in sequence order. sum starts from integer 0;
// avg is sum/count as a double; min/max keep the first extreme element.
// avg/min/max of an empty range raise EvalError.
Value sum_values(const Value* first, const Value* last);
Value avg_values(const Value* first, const Value* last);
Value min_values(const Value* first, const Value* last);
Value max_values(const Value* first, const Value* last);

}  // namespace dbx

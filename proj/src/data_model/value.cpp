// SPDX-License-Identifier: MIT
#include "dbx/value.hpp"

#include <charconv>
#include <cmath>

namespace dbx {

namespace {

int kind_rank(const Value& v) {
  if (v.is_null()) return 0;
  if (v.is_bool()) return 1;
  if (v.is_numeric()) return 2;
  return 3;
}

int sign(int c) { return (c > 0) - (c < 0); }

// Exact comparison of an integer against a finite double.
int compare_int_double(const BigInt& i, double d) {
  if (std::isnan(d)) return -1;
  if (std::isinf(d)) return d > 0 ? -1 : 1;
  double f = std::floor(d);
  BigInt fi(f);
  int c = sign(cmp(i, fi));
  if (c != 0) return c;
  return d > f ? -1 : 0;
}

int compare_numeric(const Value& a, const Value& b) {
  if (a.is_int() && b.is_int()) return sign(cmp(a.as_int(), b.as_int()));
  if (a.is_double() && b.is_double()) {
    double x = a.as_double(), y = b.as_double();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.is_int()) return compare_int_double(a.as_int(), b.as_double());
  return -compare_int_double(b.as_int(), a.as_double());
}

}  // namespace

double Value::to_double() const {
  if (is_double()) return as_double();
  if (is_int()) return as_int().get_d();
  throw EvalError("numeric value expected");
}

bool Value::operator==(const Value& o) const {
  if (rep_.index() != o.rep_.index()) return false;
  switch (rep_.index()) {
    case 0: return true;
    case 1: return as_bool() == o.as_bool();
    case 2: return as_int() == o.as_int();
    case 3: return as_double() == o.as_double();
    default: return as_text() == o.as_text();
  }
}

int value_total_order(const Value& a, const Value& b) {
  int ka = kind_rank(a), kb = kind_rank(b);
  if (ka != kb) return ka < kb ? -1 : 1;
  switch (ka) {
    case 0: return 0;
    case 1: return int(a.as_bool()) - int(b.as_bool());
    case 2: {
      int c = compare_numeric(a, b);
      if (c != 0) return c;
      if (a.is_int() != b.is_int()) return a.is_int() ? -1 : 1;
      return 0;
    }
    default: return sign(a.as_text().compare(b.as_text()));
  }
}

int compare_values(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric()) return compare_numeric(a, b);
  if (a.is_text() && b.is_text()) return sign(a.as_text().compare(b.as_text()));
  if (a.is_bool() && b.is_bool()) return int(a.as_bool()) - int(b.as_bool());
  throw EvalError("cannot compare " + value_literal(a) + " with " +
                  value_literal(b));
}

Value arith(ArithOp op, const Value& a, const Value& b) {
  if (!a.is_numeric() || !b.is_numeric())
    throw EvalError("arithmetic on non-numeric value");
  if (a.is_int() && b.is_int()) {
    const BigInt& x = a.as_int();
    const BigInt& y = b.as_int();
    switch (op) {
      case ArithOp::Add: return BigInt(x + y);
      case ArithOp::Sub: return BigInt(x - y);
      case ArithOp::Mul: return BigInt(x * y);
      case ArithOp::Div:
        if (y == 0) return Null{};
        return BigInt(x / y);  // truncates toward zero
    }
  }
  double x = a.to_double(), y = b.to_double();
  switch (op) {
    case ArithOp::Add: return x + y;
    case ArithOp::Sub: return x - y;
    case ArithOp::Mul: return x * y;
    case ArithOp::Div:
      if (y == 0) return Null{};
      return x / y;
  }
  return Null{};
}

Value negate(const Value& a) {
  if (a.is_int()) return BigInt(-a.as_int());
  if (a.is_double()) return -a.as_double();
  throw EvalError("negation of non-numeric value");
}

Value concat_text(const Value& a, const Value& b) {
  if (!a.is_text() || !b.is_text()) throw EvalError("|| on non-text value");
  return a.as_text() + b.as_text();
}

std::string format_double(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, r.ptr);
}

std::string value_literal(const Value& v) {
  if (v.is_null()) return "null";
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_int()) return v.as_int().get_str();
  if (v.is_double()) {
    std::string s = format_double(v.as_double());
    if (s.find_first_of(".eEnI") == std::string::npos) s += ".0";
    return s;
  }
  std::string out = "'";
  for (char c : v.as_text()) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

Value sum_values(const Value* first, const Value* last) {
  Value acc = BigInt(0);
  for (; first != last; ++first) acc = arith(ArithOp::Add, acc, *first);
  return acc;
}

Value avg_values(const Value* first, const Value* last) {
  if (first == last) throw EvalError("avg of empty input");
  double n = double(last - first);
  return sum_values(first, last).to_double() / n;
}

Value min_values(const Value* first, const Value* last) {
  if (first == last) throw EvalError("min of empty input");
  const Value* best = first;
  for (++first; first != last; ++first)
    if (compare_values(*first, *best) < 0) best = first;
  return *best;
}

Value max_values(const Value* first, const Value* last) {
  if (first == last) throw EvalError("max of empty input");
  const Value* best = first;
  for (++first; first != last; ++first)
    if (compare_values(*first, *best) > 0) best = first;
  return *best;
}

}  // namespace dbx

// SPDX-License-Identifier: MIT
#include "dbx/ops.hpp"

#include <map>
#include <set>

namespace dbx {

namespace {

std::vector<Value> atoms_of(const Data& bag) {
  std::vector<Value> out;
  out.reserve(bag.items().size());
  for (auto& x : bag.items()) out.push_back(x.atom());
  return out;
}

Data project(const Data& rec, const std::vector<std::string>& labels) {
  Fields fs;
  for (auto& l : labels) fs.emplace_back(l, rec.get(l));
  return Data::record(std::move(fs));
}

bool as_bool(const Data& d) {
  const Value& v = d.atom();
  if (!v.is_bool()) throw EvalError("boolean expected, got " + to_string(d));
  return v.as_bool();
}

Data multiset_op(BinaryKind op, const Data& a, const Data& b) {
  std::map<Data, std::size_t, DataLess> counts;
  for (auto& x : b.items()) ++counts[x];
  std::vector<Data> out;
  for (auto& x : a.items()) {
    auto it = counts.find(x);
    bool present = it != counts.end() && it->second > 0;
    if (present) --it->second;
    if ((op == BinaryKind::Minus) != present) out.push_back(x);
  }
  return Data::bag(std::move(out));
}

}  // namespace

Data group_by_builtin(const std::string& g, const std::vector<std::string>& attrs,
                      const Data& bag) {
  std::map<Data, std::size_t, DataLess> index;
  std::vector<Data> keys;
  std::vector<std::vector<Data>> groups;
  for (auto& x : bag.items()) {
    Data k = project(x, attrs);
    auto [it, fresh] = index.emplace(k, keys.size());
    if (fresh) {
      keys.push_back(k);
      groups.emplace_back();
    }
    groups[it->second].push_back(x);
  }
  std::vector<Data> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    Fields fs = keys[i].fields();
    fs.emplace_back(g, Data::bag(std::move(groups[i])));
    out.push_back(Data::record(std::move(fs)));
  }
  return Data::bag(std::move(out));
}

Data apply_unary(const UnaryOp& op, const Data& d) {
  switch (op.kind) {
    case UnaryKind::Not: return Data::atom(!as_bool(d));
    case UnaryKind::Neg: return Data::atom(negate(d.atom()));
    case UnaryKind::Dot: return d.get(op.label);
    case UnaryKind::Rec: return Data::record({{op.label, d}});
    case UnaryKind::Bag: return Data::bag(DataBag().push(d));
    case UnaryKind::Distinct: {
      std::set<Data, DataLess> seen;
      std::vector<Data> out;
      for (auto& x : d.items())
        if (seen.insert(x).second) out.push_back(x);
      return Data::bag(std::move(out));
    }
    case UnaryKind::Project: return project(d, op.labels);
    case UnaryKind::Count: return Data::atom(BigInt(static_cast<unsigned long>(d.items().size())));
    case UnaryKind::Sum: {
      auto xs = atoms_of(d);
      return Data::atom(sum_values(xs.data(), xs.data() + xs.size()));
    }
    case UnaryKind::Min: {
      auto xs = atoms_of(d);
      return Data::atom(min_values(xs.data(), xs.data() + xs.size()));
    }
    case UnaryKind::Max: {
      auto xs = atoms_of(d);
      return Data::atom(max_values(xs.data(), xs.data() + xs.size()));
    }
    case UnaryKind::Avg: {
      auto xs = atoms_of(d);
      return Data::atom(avg_values(xs.data(), xs.data() + xs.size()));
    }
    case UnaryKind::Flatten: {
      DataBag out;
      for (auto& x : d.items()) out = out.append(x.items());
      return Data::bag(out);
    }
    case UnaryKind::Left: return Data::left(d);
    case UnaryKind::Right: return Data::right(d);
    case UnaryKind::Single:
      if (d.items().size() == 1) return Data::left(d.items().front());
      return null_data();
    case UnaryKind::First:
      if (d.items().empty()) throw EvalError("first element of an empty bag");
      return d.items().front();
    case UnaryKind::GroupBy: return group_by_builtin(op.label, op.labels, d);
  }
  throw EvalError("unknown unary operator");
}

Data apply_binary(BinaryKind op, const Data& a, const Data& b) {
  switch (op) {
    case BinaryKind::Equal: return Data::atom(a == b);
    case BinaryKind::CmpEq: return Data::atom(compare_values(a.atom(), b.atom()) == 0);
    case BinaryKind::CmpNe: return Data::atom(compare_values(a.atom(), b.atom()) != 0);
    case BinaryKind::CmpLt: return Data::atom(compare_values(a.atom(), b.atom()) < 0);
    case BinaryKind::CmpLe: return Data::atom(compare_values(a.atom(), b.atom()) <= 0);
    case BinaryKind::CmpGt: return Data::atom(compare_values(a.atom(), b.atom()) > 0);
    case BinaryKind::CmpGe: return Data::atom(compare_values(a.atom(), b.atom()) >= 0);
    case BinaryKind::Add: return Data::atom(arith(ArithOp::Add, a.atom(), b.atom()));
    case BinaryKind::Sub: return Data::atom(arith(ArithOp::Sub, a.atom(), b.atom()));
    case BinaryKind::Mul: return Data::atom(arith(ArithOp::Mul, a.atom(), b.atom()));
    case BinaryKind::Div: {
      Value q = arith(ArithOp::Div, a.atom(), b.atom());
      if (q.is_null()) return null_data();
      return Data::left(Data::atom(std::move(q)));
    }
    case BinaryKind::StrConcat: return Data::atom(concat_text(a.atom(), b.atom()));
    case BinaryKind::Union: return Data::bag(a.items().append(b.items()));
    case BinaryKind::Minus:
    case BinaryKind::Inter: return multiset_op(op, a, b);
    case BinaryKind::RecConcat: {
      Fields fs = b.fields();
      for (auto& f : a.fields())
        if (!b.find(f.first)) fs.push_back(f);
      return Data::record(std::move(fs));
    }
    case BinaryKind::Contains: {
      for (auto& x : b.items())
        if (x == a) return Data::atom(true);
      return Data::atom(false);
    }
    case BinaryKind::And: return Data::atom(as_bool(a) && as_bool(b));
    case BinaryKind::Or: return Data::atom(as_bool(a) || as_bool(b));
  }
  throw EvalError("unknown binary operator");
}

namespace {

const std::vector<std::pair<UnaryKind, const char*>>& unary_names() {
  static const std::vector<std::pair<UnaryKind, const char*>> t = {
      {UnaryKind::Not, "not"},         {UnaryKind::Neg, "neg"},
      {UnaryKind::Dot, "dot"},         {UnaryKind::Rec, "rec"},
      {UnaryKind::Bag, "bag"},         {UnaryKind::Distinct, "distinct"},
      {UnaryKind::Project, "project"}, {UnaryKind::Count, "count"},
      {UnaryKind::Sum, "sum"},         {UnaryKind::Min, "min"},
      {UnaryKind::Max, "max"},         {UnaryKind::Avg, "avg"},
      {UnaryKind::Flatten, "flatten"}, {UnaryKind::Left, "left"},
      {UnaryKind::Right, "right"},     {UnaryKind::Single, "single"},
      {UnaryKind::First, "first"},     {UnaryKind::GroupBy, "group_by"},
  };
  return t;
}

const std::vector<std::pair<BinaryKind, const char*>>& binary_names() {
  static const std::vector<std::pair<BinaryKind, const char*>> t = {
      {BinaryKind::Equal, "equal"},         {BinaryKind::CmpEq, "eq"},
      {BinaryKind::CmpNe, "ne"},            {BinaryKind::CmpLt, "lt"},
      {BinaryKind::CmpLe, "le"},            {BinaryKind::CmpGt, "gt"},
      {BinaryKind::CmpGe, "ge"},            {BinaryKind::Add, "add"},
      {BinaryKind::Sub, "sub"},             {BinaryKind::Mul, "mul"},
      {BinaryKind::Div, "div"},             {BinaryKind::StrConcat, "strConcat"},
      {BinaryKind::Union, "union"},         {BinaryKind::Minus, "minus"},
      {BinaryKind::Inter, "intersect"},     {BinaryKind::RecConcat, "recordConcat"},
      {BinaryKind::Contains, "contains"},   {BinaryKind::And, "and"},
      {BinaryKind::Or, "or"},
  };
  return t;
}

}  // namespace

std::string unary_name(UnaryKind k) {
  for (auto& [kk, n] : unary_names())
    if (kk == k) return n;
  return "?";
}

std::string binary_name(BinaryKind k) {
  for (auto& [kk, n] : binary_names())
    if (kk == k) return n;
  return "?";
}

bool unary_from_name(const std::string& n, UnaryKind& out) {
  for (auto& [k, nn] : unary_names())
    if (n == nn) {
      out = k;
      return true;
    }
  return false;
}

bool binary_from_name(const std::string& n, BinaryKind& out) {
  for (auto& [k, nn] : binary_names())
    if (n == nn) {
      out = k;
      return true;
    }
  return false;
}

std::string binary_symbol(BinaryKind k) {
  switch (k) {
    case BinaryKind::Equal: return "==";
    case BinaryKind::CmpEq: return "=";
    case BinaryKind::CmpNe: return "<>";
    case BinaryKind::CmpLt: return "<";
    case BinaryKind::CmpLe: return "<=";
    case BinaryKind::CmpGt: return ">";
    case BinaryKind::CmpGe: return ">=";
    case BinaryKind::Add: return "+";
    case BinaryKind::Sub: return "-";
    case BinaryKind::Mul: return "*";
    case BinaryKind::Div: return "/";
    case BinaryKind::StrConcat: return "||";
    case BinaryKind::Union: return "U";
    case BinaryKind::Minus: return "\\";
    case BinaryKind::RecConcat: return "(+)";
    case BinaryKind::And: return "&&";
    case BinaryKind::Or: return "or";
    default: return "";
  }
}

}  // namespace dbx

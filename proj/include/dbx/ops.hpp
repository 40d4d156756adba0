// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <vector>

#include "dbx/data.hpp"

namespace dbx {

// Operators shared by NRAe and every lower stage that works on Data.
enum class UnaryKind {
  Not,
  Neg,
  Dot,       // field access .label
  Rec,       // {label: d}
  Bag,       // singleton bag [d]
  Distinct,
  Project,   // record projection on labels
  Count,
  Sum,
  Min,
  Max,
  Avg,
  Flatten,
  Left,
  Right,
  Single,    // [d] -> left(d), anything else -> right(())
  First,     // first element of a non-empty bag
  GroupBy,   // built-in group_by(label, labels)
};

struct UnaryOp {
  UnaryKind kind;
  std::string label;
  std::vector<std::string> labels;

  bool operator==(const UnaryOp& o) const {
    return kind == o.kind && label == o.label && labels == o.labels;
  }
};

enum class BinaryKind {
  Equal,      // structural equality
  CmpEq,
  CmpNe,
  CmpLt,
  CmpLe,
  CmpGt,
  CmpGe,
  Add,
  Sub,
  Mul,
  Div,        // left(quotient), right(()) on division by zero
  StrConcat,
  Union,
  Minus,
  Inter,
  RecConcat,  // right operand wins on shared labels
  Contains,   // d1 is an element of bag d2
  And,
  Or,
};

inline UnaryOp uop(UnaryKind k) { return UnaryOp{k, {}, {}}; }
inline UnaryOp uop(UnaryKind k, std::string l) { return UnaryOp{k, std::move(l), {}}; }

Data apply_unary(const UnaryOp& op, const Data& d);
Data apply_binary(BinaryKind op, const Data& a, const Data& b);

Data group_by_builtin(const std::string& g, const std::vector<std::string>& attrs,
                      const Data& bag);

// Printed operator names; also the Imp(Data) operator vocabulary.
std::string unary_name(UnaryKind k);
std::string binary_name(BinaryKind k);
bool unary_from_name(const std::string& n, UnaryKind& out);
bool binary_from_name(const std::string& n, BinaryKind& out);
// Infix symbol for printers, empty when the operator prints as a call.
std::string binary_symbol(BinaryKind k);

}  // namespace dbx

// SPDX-License-Identifier: MIT
// Brute-force evaluator for generated SQL queries. Works on the generator's
// AST, enumerating from-products row by row with three-valued predicates.
#pragma once

#include <vector>

#include "dbx/fuzz.hpp"
#include "dbx/instance.hpp"

namespace oracle {

using Row = std::vector<dbx::Value>;

// Result rows in select-item order.
std::vector<Row> evaluate(const dbx::fuzz::Case& c);

// Rows of a pipeline result, columns c0, c1, ... in order.
std::vector<Row> rows_of(const dbx::Bag& b);

// Bag equality with structural value equality.
bool same_bag(std::vector<Row> a, std::vector<Row> b);

std::string show(const std::vector<Row>& rows);

}  // namespace oracle

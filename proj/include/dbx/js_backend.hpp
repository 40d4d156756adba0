// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dbx/ejson.hpp"
#include "dbx/imp.hpp"
#include "dbx/instance.hpp"

namespace dbx::js {

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Ident, Null, Bool, Number, BigInt, String, Call, Object, Array } kind;
  std::string text;               // Ident, BigInt digits, String, Call callee
  bool flag = false;              // Bool
  double number = 0;              // Number
  std::vector<std::string> keys;  // Object
  std::vector<ExprP> args;        // Call arguments, Object values, Array items
};

struct Stmt;
using StmtP = std::shared_ptr<const Stmt>;

//   Let      let name [= e];
//   Assign   name = e;
//   ForOf    for (let name of iter(e)) { body }
//   If       if (toBool(e)) { body } else { orelse }
//   Block    { body }
//   Return   return e;
struct Stmt {
  enum class Kind { Let, Assign, ForOf, If, Block, Return } kind;
  std::string name;
  ExprP e;
  std::vector<StmtP> body, orelse;
};

struct Function {
  std::string name;
  std::vector<std::string> params;
  std::vector<StmtP> body;
};

struct Module {
  std::vector<std::string> imports;  // runtime names, sorted
  Function query;
};

inline const char* kRuntimeModule = "./dbcertRuntime.js";

// Imp blocks become braced blocks with let; names that would shadow a live
// binding, clash with a runtime import or are not ECMAScript identifiers are
// renamed apart. Field access calls member, records are object literals and
// arrays are built with array and push.
Module imp_to_js(const imp::EJsonFunction& f);

std::string print_function(const Function& f);
std::string print_js(const Module& m);

bool is_identifier(const std::string& s);
bool is_reserved_word(const std::string& s);
// Every runtime function the emitted code may import.
const std::vector<std::string>& runtime_names();

// Brackets balance and string literals close; on failure *why says where.
bool balanced_tokens(const std::string& src, std::string* why = nullptr);

// Table name -> column name -> column type name.
EJson schema_sidecar(const Schema& s);

}  // namespace dbx::js

// SPDX-License-Identifier: MIT
#include "dbx/js_backend.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dbx::js {

namespace {

ExprP make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprP ident(std::string s) {
  Expr e{};
  e.kind = Expr::Kind::Ident;
  e.text = std::move(s);
  return make(std::move(e));
}

ExprP str(std::string s) {
  Expr e{};
  e.kind = Expr::Kind::String;
  e.text = std::move(s);
  return make(std::move(e));
}

ExprP call(std::string f, std::vector<ExprP> args) {
  Expr e{};
  e.kind = Expr::Kind::Call;
  e.text = std::move(f);
  e.args = std::move(args);
  return make(std::move(e));
}

ExprP object(std::vector<std::string> keys, std::vector<ExprP> values) {
  Expr e{};
  e.kind = Expr::Kind::Object;
  e.keys = std::move(keys);
  e.args = std::move(values);
  return make(std::move(e));
}

ExprP string_array(const std::vector<std::string>& xs) {
  Expr e{};
  e.kind = Expr::Kind::Array;
  for (auto& x : xs) e.args.push_back(str(x));
  return make(std::move(e));
}

StmtP stmt(Stmt::Kind k, std::string name, ExprP e, std::vector<StmtP> body = {},
           std::vector<StmtP> orelse = {}) {
  Stmt s{};
  s.kind = k;
  s.name = std::move(name);
  s.e = std::move(e);
  s.body = std::move(body);
  s.orelse = std::move(orelse);
  return std::make_shared<const Stmt>(std::move(s));
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> r = {
      "arguments", "await",    "break",    "case",      "catch",     "class",   "const",
      "continue",  "debugger", "default",  "delete",    "do",        "else",    "enum",
      "eval",      "export",   "extends",  "false",     "finally",   "for",     "function",
      "if",        "implements", "import", "in",        "instanceof", "interface", "let",
      "new",       "null",     "package",  "private",   "protected", "public",  "return",
      "static",    "super",    "switch",   "this",      "throw",     "true",    "try",
      "typeof",    "undefined", "var",     "void",      "while",     "with",    "yield",
      "NaN",       "Infinity", "require",  "module",    "exports",   "query",
  };
  return r;
}

std::string js_name(const std::string& imp_name) { return imp_name == "dot" ? "member" : imp_name; }

class Emitter {
 public:
  explicit Emitter(const imp::EJsonFunction& f) { collect(*f.body, taken_); taken_.insert(f.param); taken_.insert(f.ret); }

  Module run(const imp::EJsonFunction& f) {
    Module m;
    m.query.name = "query";
    std::string param = bind(f.param);
    std::string ret = bind(f.ret);
    m.query.params = {param};
    m.query.body.push_back(stmt(Stmt::Kind::Let, ret, nullptr));
    if (f.body->kind == imp::Stmt<EJson>::Kind::Block)
      block_into(*f.body, m.query.body);
    else
      m.query.body.push_back(statement(*f.body));
    m.query.body.push_back(stmt(Stmt::Kind::Return, "", ident(ret)));
    m.imports.assign(used_.begin(), used_.end());
    return m;
  }

 private:
  using IE = imp::Expr<EJson>;
  using IS = imp::Stmt<EJson>;

  static void collect(const IE& e, std::set<std::string>& out) {
    if (e.kind == IE::Kind::Var) out.insert(e.name);
    for (auto& a : e.args) collect(*a, out);
  }
  static void collect(const IS& s, std::set<std::string>& out) {
    for (auto& [x, init] : s.decls) {
      out.insert(x);
      if (init) collect(*init, out);
    }
    for (auto& t : s.stmts) collect(*t, out);
    if (!s.x.empty()) out.insert(s.x);
    if (s.e) collect(*s.e, out);
    if (s.a) collect(*s.a, out);
    if (s.b) collect(*s.b, out);
  }

  bool usable(const std::string& x) const {
    if (!is_identifier(x) || is_reserved_word(x)) return false;
    const auto& rt = runtime_names();
    if (std::find(rt.begin(), rt.end(), x) != rt.end()) return false;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->second == x) return false;
    return true;
  }

  // Pushes a binding for x and returns its JavaScript name.
  std::string bind(const std::string& x) {
    std::string out = x;
    bool shadows = false;
    for (auto& b : scope_) shadows = shadows || b.first == x;
    if (shadows || !usable(x)) {
      std::string base;
      for (char c : x) base += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$') ? c : '_';
      if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0]))) base = "$" + base;
      do out = base + "$" + std::to_string(next_++);
      while (taken_.count(out) || !usable(out));
      taken_.insert(out);
    }
    scope_.emplace_back(x, out);
    return out;
  }

  std::string lookup(const std::string& x) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == x) return it->second;
    throw CompilerBug("unbound Imp variable " + x);
  }

  ExprP runtime(const std::string& f, std::vector<ExprP> args) {
    used_.insert(f);
    return call(f, std::move(args));
  }

  ExprP constant(const EJson& j) {
    Expr e{};
    switch (j.kind()) {
      case EJson::Kind::Null: e.kind = Expr::Kind::Null; break;
      case EJson::Kind::Bool:
        e.kind = Expr::Kind::Bool;
        e.flag = j.as_bool();
        break;
      case EJson::Kind::Number:
        e.kind = Expr::Kind::Number;
        e.number = j.as_number();
        break;
      case EJson::Kind::BigInt:
        e.kind = Expr::Kind::BigInt;
        e.text = j.as_bigint().get_str();
        break;
      case EJson::Kind::String:
        e.kind = Expr::Kind::String;
        e.text = j.as_string();
        break;
      case EJson::Kind::Object: {
        std::vector<std::string> keys;
        std::vector<ExprP> values;
        for (auto& [k, v] : j.members()) {
          keys.push_back(k);
          values.push_back(constant(v));
        }
        return object(std::move(keys), std::move(values));
      }
      case EJson::Kind::Array: {
        ExprP acc = runtime("array", {});
        for (auto& x : j.elements()) acc = runtime("push", {acc, constant(x)});
        return acc;
      }
    }
    return make(std::move(e));
  }

  ExprP expr(const IE& e) {
    switch (e.kind) {
      case IE::Kind::Const: return constant(e.value);
      case IE::Kind::Var: return ident(lookup(e.name));
      case IE::Kind::Op:
      case IE::Kind::Runtime: break;
    }
    std::vector<ExprP> args;
    for (auto& a : e.args) args.push_back(expr(*a));
    if (e.kind == IE::Kind::Op && e.name == "rec") return object({e.label}, std::move(args));
    if (e.name == "dot") args.push_back(str(e.label));
    if (e.name == "project") args.push_back(string_array(e.labels));
    if (e.name == "group_by") {
      args.push_back(str(e.label));
      args.push_back(string_array(e.labels));
    }
    return runtime(js_name(e.name), std::move(args));
  }

  void block_into(const IS& s, std::vector<StmtP>& out) {
    std::size_t mark = scope_.size();
    for (auto& [x, init] : s.decls) {
      ExprP v = init ? expr(*init) : nullptr;
      out.push_back(stmt(Stmt::Kind::Let, bind(x), v));
    }
    for (auto& t : s.stmts) out.push_back(statement(*t));
    scope_.resize(mark);
  }

  std::vector<StmtP> body(const IS& s) {
    std::vector<StmtP> out;
    if (s.kind == IS::Kind::Block)
      block_into(s, out);
    else
      out.push_back(statement(s));
    return out;
  }

  StmtP statement(const IS& s) {
    switch (s.kind) {
      case IS::Kind::Block: {
        std::vector<StmtP> inner;
        block_into(s, inner);
        return stmt(Stmt::Kind::Block, "", nullptr, std::move(inner));
      }
      case IS::Kind::Assign: return stmt(Stmt::Kind::Assign, lookup(s.x), expr(*s.e));
      case IS::Kind::For: {
        ExprP over = expr(*s.e);
        used_.insert("iter");
        std::size_t mark = scope_.size();
        std::string x = bind(s.x);
        auto inner = body(*s.a);
        scope_.resize(mark);
        return stmt(Stmt::Kind::ForOf, x, over, std::move(inner));
      }
      case IS::Kind::If: {
        ExprP c = expr(*s.e);
        used_.insert("toBool");
        auto a = body(*s.a);
        auto b = body(*s.b);
        return stmt(Stmt::Kind::If, "", c, std::move(a), std::move(b));
      }
    }
    throw CompilerBug("unknown Imp statement");
  }

  std::set<std::string> taken_;
  std::set<std::string> used_;
  std::vector<std::pair<std::string, std::string>> scope_;
  int next_ = 0;
};

// ---------------------------------------------------------------- printing

std::string quote(const std::string& s) { return nlohmann::json(s).dump(-1, ' ', true); }

std::string number(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, r.ptr);
}

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ident: os << e.text; return;
    case Expr::Kind::Null: os << "null"; return;
    case Expr::Kind::Bool: os << (e.flag ? "true" : "false"); return;
    case Expr::Kind::Number: os << number(e.number); return;
    case Expr::Kind::BigInt: os << e.text << "n"; return;
    case Expr::Kind::String: os << quote(e.text); return;
    case Expr::Kind::Call:
      os << e.text << "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, *e.args[i]);
      }
      os << ")";
      return;
    case Expr::Kind::Object:
      if (e.keys.empty()) {
        os << "{}";
        return;
      }
      os << "{ ";
      for (std::size_t i = 0; i < e.keys.size(); ++i) {
        if (i) os << ", ";
        os << quote(e.keys[i]) << ": ";
        print_expr(os, *e.args[i]);
      }
      os << " }";
      return;
    case Expr::Kind::Array:
      os << "[";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, *e.args[i]);
      }
      os << "]";
      return;
  }
}

void print_stmts(std::ostream& os, const std::vector<StmtP>& ss, int depth);

void print_braced(std::ostream& os, const std::vector<StmtP>& ss, int depth) {
  os << "{\n";
  print_stmts(os, ss, depth + 1);
  os << std::string(2 * depth, ' ') << "}";
}

void print_stmts(std::ostream& os, const std::vector<StmtP>& ss, int depth) {
  std::string pad(2 * depth, ' ');
  for (auto& sp : ss) {
    const Stmt& s = *sp;
    os << pad;
    switch (s.kind) {
      case Stmt::Kind::Let:
        os << "let " << s.name;
        if (s.e) {
          os << " = ";
          print_expr(os, *s.e);
        }
        os << ";\n";
        break;
      case Stmt::Kind::Assign:
        os << s.name << " = ";
        print_expr(os, *s.e);
        os << ";\n";
        break;
      case Stmt::Kind::ForOf:
        os << "for (let " << s.name << " of iter(";
        print_expr(os, *s.e);
        os << ")) ";
        print_braced(os, s.body, depth);
        os << "\n";
        break;
      case Stmt::Kind::If:
        os << "if (toBool(";
        print_expr(os, *s.e);
        os << ")) ";
        print_braced(os, s.body, depth);
        os << " else ";
        print_braced(os, s.orelse, depth);
        os << "\n";
        break;
      case Stmt::Kind::Block:
        print_braced(os, s.body, depth);
        os << "\n";
        break;
      case Stmt::Kind::Return:
        os << "return ";
        print_expr(os, *s.e);
        os << ";\n";
        break;
    }
  }
}

}  // namespace

Module imp_to_js(const imp::EJsonFunction& f) { return Emitter(f).run(f); }

std::string print_function(const Function& f) {
  std::ostringstream os;
  os << "function " << f.name << "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) os << (i ? ", " : "") << f.params[i];
  os << ") ";
  print_braced(os, f.body, 0);
  return os.str();
}

std::string print_js(const Module& m) {
  std::ostringstream os;
  os << "\"use strict\";\n";
  if (!m.imports.empty()) {
    os << "const { ";
    for (std::size_t i = 0; i < m.imports.size(); ++i) os << (i ? ", " : "") << m.imports[i];
    os << " } = require(" << quote(kRuntimeModule) << ");\n";
  }
  os << "\n" << print_function(m.query) << "\n\nmodule.exports = { query };\n";
  return os.str();
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; };
  if (!start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) {
    return start(c) || std::isdigit(static_cast<unsigned char>(c));
  });
}

bool is_reserved_word(const std::string& s) { return reserved().count(s) > 0; }

const std::vector<std::string>& runtime_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (auto& n : imp::ejson_operator_names())
      if (n != "rec") out.push_back(js_name(n));
    for (auto& n : imp::ejson_runtime_names())
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    out.push_back("iter");
    out.push_back("toBool");
    return out;
  }();
  return names;
}

bool balanced_tokens(const std::string& src, std::string* why) {
  std::vector<std::pair<char, std::size_t>> stack;
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  for (std::size_t i = 0; i < src.size(); ++i) {
    char c = src[i];
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t open = i;
      for (++i; i < src.size() && src[i] != c; ++i) {
        if (src[i] == '\\') ++i;
        if (i < src.size() && src[i] == '\n') return fail("newline in string at offset " + std::to_string(open));
      }
      if (i >= src.size()) return fail("unterminated string at offset " + std::to_string(open));
      continue;
    }
    if (c == '(' || c == '[' || c == '{') stack.emplace_back(c, i);
    if (c == ')' || c == ']' || c == '}') {
      char want = c == ')' ? '(' : (c == ']' ? '[' : '{');
      if (stack.empty() || stack.back().first != want)
        return fail(std::string("unmatched '") + c + "' at offset " + std::to_string(i));
      stack.pop_back();
    }
  }
  if (!stack.empty())
    return fail(std::string("unclosed '") + stack.back().first + "' at offset " +
                std::to_string(stack.back().second));
  return true;
}

EJson schema_sidecar(const Schema& s) {
  EMembers tables;
  for (auto& t : s.tables()) {
    EMembers cols;
    for (auto& c : t.columns) cols.emplace_back(c.name, EJson::string(column_type_name(c.type)));
    tables.emplace_back(t.name, EJson::object(std::move(cols)));
  }
  return EJson::object(std::move(tables));
}

}  // namespace dbx::js

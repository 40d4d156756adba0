// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "dbx/sql_front.hpp"

namespace dbx::sql {

SqlError::SqlError(const std::string& msg, Pos p)
    : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg),
      pos(p) {}

namespace {

struct Token {
  enum Kind { Word, QuotedWord, String, Integer, Decimal, Symbol, End } kind;
  std::string text;   // words are lower-cased in `lower`
  std::string lower;
  Pos pos;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  Pos p;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
      if (s[i] == '\n') {
        ++p.line;
        p.col = 1;
      } else {
        ++p.col;
      }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace((unsigned char)c)) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    Pos start = p;
    if (std::isalpha((unsigned char)c) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) ++j;
      std::string w = s.substr(i, j - i);
      std::string lw = w;
      for (auto& ch : lw) ch = char(std::tolower((unsigned char)ch));
      out.push_back({Token::Word, w, lw, start});
      advance(j - i);
      continue;
    }
    if (std::isdigit((unsigned char)c) ||
        (c == '.' && i + 1 < s.size() && std::isdigit((unsigned char)s[i + 1]))) {
      std::size_t j = i;
      bool dec = false;
      while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
      if (j < s.size() && s[j] == '.') {
        dec = true;
        ++j;
        while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit((unsigned char)s[k])) {
          dec = true;
          j = k;
          while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
        }
      }
      std::string t = s.substr(i, j - i);
      out.push_back({dec ? Token::Decimal : Token::Integer, t, t, start});
      advance(j - i);
      continue;
    }
    if (c == '\'' || c == '"') {
      std::string text;
      std::size_t j = i + 1;
      for (;;) {
        if (j >= s.size()) throw SqlError("unterminated quoted text", start);
        if (s[j] == c) {
          if (j + 1 < s.size() && s[j + 1] == c) {
            text += c;
            j += 2;
            continue;
          }
          break;
        }
        text += s[j++];
      }
      out.push_back({c == '\'' ? Token::String : Token::QuotedWord, text, text, start});
      advance(j + 1 - i);
      continue;
    }
    static const char* two[] = {"<>", "<=", ">=", "!=", "||"};
    bool matched = false;
    for (auto t : two)
      if (s.compare(i, 2, t) == 0) {
        out.push_back({Token::Symbol, t, t, start});
        advance(2);
        matched = true;
        break;
      }
    if (matched) continue;
    if (std::string("(),;.*+-/=<>").find(c) == std::string::npos)
      throw SqlError(std::string("unexpected character '") + c + "'", start);
    out.push_back({Token::Symbol, std::string(1, c), std::string(1, c), start});
    advance(1);
  }
  out.push_back({Token::End, "", "", p});
  return out;
}

const std::unordered_set<std::string>& reserved() {
  static const std::unordered_set<std::string> r = {
      "select", "from",   "where", "group", "by",     "having", "union",  "intersect",
      "except", "all",    "any",   "some",  "in",     "exists", "not",    "and",
      "or",     "as",     "null",  "true",  "false",  "create", "table",  "distinct",
      "order",  "limit",  "is",    "between", "like", "case",   "when",   "then",
      "else",   "end",    "on",    "join",  "with",   "recursive", "cast", "offset"};
  return r;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : toks_(lex(s)) {}

  std::vector<Statement> statements() {
    std::vector<Statement> out;
    while (!at_end()) {
      if (sym(";")) {
        ++i_;
        continue;
      }
      Statement st;
      if (kw("create")) {
        st.create = create_table();
      } else if (kw("with")) {
        unsupported("with/recursive queries");
      } else {
        st.query = query();
      }
      if (!at_end() && !sym(";")) fail("expected ';'");
      out.push_back(std::move(st));
    }
    return out;
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int next_ordinal_ = 0;

  const Token& tok(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  bool at_end() const { return tok().kind == Token::End; }
  bool kw(const char* w, std::size_t k = 0) const {
    return tok(k).kind == Token::Word && tok(k).lower == w;
  }
  bool sym(const char* s, std::size_t k = 0) const {
    return tok(k).kind == Token::Symbol && tok(k).text == s;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::string near = at_end() ? "end of input" : "'" + tok().text + "'";
    throw SqlError(msg + " near " + near, tok().pos);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedFeature("unsupported SQL feature: " + what, tok().pos);
  }

  void expect_kw(const char* w) {
    if (!kw(w)) fail(std::string("expected '") + w + "'");
    ++i_;
  }
  void expect_sym(const char* s) {
    if (!sym(s)) fail(std::string("expected '") + s + "'");
    ++i_;
  }

  std::string identifier() {
    const Token& t = tok();
    if (t.kind == Token::QuotedWord) {
      if (t.text.find('$') != std::string::npos) fail("'$' is not allowed in identifiers");
      ++i_;
      return t.text;
    }
    if (t.kind == Token::Word && !reserved().count(t.lower)) {
      ++i_;
      return t.text;
    }
    fail("expected an identifier");
  }

  bool at_identifier() const {
    return tok().kind == Token::QuotedWord ||
           (tok().kind == Token::Word && !reserved().count(tok().lower));
  }

  // -- DDL ------------------------------------------------------------------

  CreateTable create_table() {
    CreateTable ct;
    ct.pos = tok().pos;
    expect_kw("create");
    expect_kw("table");
    ct.table.name = identifier();
    expect_sym("(");
    for (;;) {
      Column c;
      c.name = identifier();
      c.type = column_type();
      for (auto& o : ct.table.columns)
        if (o.name == c.name) fail("duplicate column " + c.name);
      ct.table.columns.push_back(c);
      if (sym(",")) {
        ++i_;
        continue;
      }
      break;
    }
    expect_sym(")");
    return ct;
  }

  ColumnType column_type() {
    if (tok().kind != Token::Word) fail("expected a column type");
    std::string w = tok().lower;
    ++i_;
    ColumnType t;
    if (w == "int" || w == "integer" || w == "bigint" || w == "smallint") {
      t = ColumnType::Int;
    } else if (w == "text" || w == "varchar" || w == "char") {
      t = ColumnType::Text;
    } else if (w == "boolean" || w == "bool") {
      t = ColumnType::Boolean;
    } else if (w == "double") {
      if (kw("precision")) ++i_;
      t = ColumnType::Double;
    } else if (w == "float" || w == "real") {
      t = ColumnType::Double;
    } else {
      --i_;
      fail("unknown column type");
    }
    if (sym("(")) {
      ++i_;
      if (tok().kind != Token::Integer) fail("expected a length");
      ++i_;
      expect_sym(")");
    }
    return t;
  }

  // -- Queries --------------------------------------------------------------

  SQueryP query() {
    SQueryP q = query_term();
    for (;;) {
      SQuery::Kind k;
      if (kw("union")) k = SQuery::Kind::Union;
      else if (kw("except")) k = SQuery::Kind::Except;
      else break;
      q = set_op(k, q, &Parser::query_term);
    }
    return q;
  }

  SQueryP query_term() {
    SQueryP q = query_primary();
    while (kw("intersect")) q = set_op(SQuery::Kind::Intersect, q, &Parser::query_primary);
    return q;
  }

  SQueryP set_op(SQuery::Kind k, SQueryP lhs, SQueryP (Parser::*next)()) {
    auto q = std::make_shared<SQuery>();
    q->kind = k;
    q->pos = tok().pos;
    ++i_;
    if (kw("all")) {
      q->all = true;
      ++i_;
    } else if (kw("distinct")) {
      unsupported("distinct");
    }
    q->lhs = std::move(lhs);
    q->rhs = (this->*next)();
    return q;
  }

  SQueryP query_primary() {
    if (sym("(")) {
      ++i_;
      SQueryP q = query();
      expect_sym(")");
      return q;
    }
    return select_block();
  }

  SQueryP select_block() {
    auto q = std::make_shared<SQuery>();
    q->pos = tok().pos;
    expect_kw("select");
    if (kw("distinct")) unsupported("distinct");
    if (kw("all")) ++i_;
    if (sym("*")) {
      ++i_;
      q->star = true;
    } else {
      for (;;) {
        SelectItem it;
        it.expr = expr();
        if (kw("as")) {
          ++i_;
          it.alias = identifier();
        } else if (at_identifier()) {
          it.alias = identifier();
        }
        q->items.push_back(std::move(it));
        if (!sym(",")) break;
        ++i_;
      }
    }
    expect_kw("from");
    for (;;) {
      q->from.push_back(from_item());
      if (!sym(",")) break;
      ++i_;
    }
    if (kw("join")) unsupported("explicit join syntax");
    if (kw("where")) {
      ++i_;
      q->where = formula();
    }
    if (kw("group")) {
      ++i_;
      expect_kw("by");
      q->has_group_by = true;
      for (;;) {
        SExprP e = expr();
        if (e->kind != SExpr::Kind::Column)
          throw UnsupportedFeature("unsupported SQL feature: grouping by an expression", e->pos);
        q->group_by.push_back(e);
        if (!sym(",")) break;
        ++i_;
      }
    }
    if (kw("having")) {
      ++i_;
      q->having = formula();
    }
    if (kw("order")) unsupported("order by");
    if (kw("limit") || kw("offset")) unsupported("limit");
    return q;
  }

  FromItem from_item() {
    FromItem f;
    f.pos = tok().pos;
    f.ordinal = next_ordinal_++;
    if (sym("(")) {
      ++i_;
      f.subquery = query();
      expect_sym(")");
    } else {
      if (kw("table")) ++i_;
      f.table = identifier();
    }
    if (kw("as")) {
      ++i_;
      f.alias = identifier();
    } else if (at_identifier()) {
      f.alias = identifier();
    }
    if (!f.alias.empty() && sym("(")) {
      ++i_;
      for (;;) {
        f.columns.push_back(identifier());
        if (!sym(",")) break;
        ++i_;
      }
      expect_sym(")");
    }
    return f;
  }

  // -- Formulas -------------------------------------------------------------

  SFormulaP make_f(SFormula::Kind k, Pos p) {
    auto f = std::make_shared<SFormula>();
    f->kind = k;
    f->pos = p;
    return f;
  }

  SFormulaP formula() {
    SFormulaP f = conjunction();
    while (kw("or")) {
      auto g = make_f(SFormula::Kind::Or, tok().pos);
      ++i_;
      g->lhs = f;
      g->rhs = conjunction();
      f = g;
    }
    return f;
  }

  SFormulaP conjunction() {
    SFormulaP f = negation();
    while (kw("and")) {
      auto g = make_f(SFormula::Kind::And, tok().pos);
      ++i_;
      g->lhs = f;
      g->rhs = negation();
      f = g;
    }
    return f;
  }

  SFormulaP negation() {
    if (kw("not")) {
      auto g = make_f(SFormula::Kind::Not, tok().pos);
      ++i_;
      g->lhs = negation();
      return g;
    }
    return predicate();
  }

  bool comparison_at(alg::Pred& p, std::size_t k = 0) const {
    if (tok(k).kind != Token::Symbol) return false;
    const std::string& t = tok(k).text;
    if (t == "=") p = alg::Pred::Eq;
    else if (t == "<>" || t == "!=") p = alg::Pred::Ne;
    else if (t == "<") p = alg::Pred::Lt;
    else if (t == "<=") p = alg::Pred::Le;
    else if (t == ">") p = alg::Pred::Gt;
    else if (t == ">=") p = alg::Pred::Ge;
    else return false;
    return true;
  }

  bool continues_expression(std::size_t k = 0) const {
    alg::Pred p;
    return comparison_at(p, k) || sym("+", k) || sym("-", k) || sym("*", k) || sym("/", k) ||
           sym("||", k) || kw("in", k) || kw("not", k) || kw("is", k) || kw("between", k) ||
           kw("like", k);
  }

  // A query starts at k, possibly behind opening parentheses.
  bool query_at(std::size_t k) const {
    while (sym("(", k)) ++k;
    return kw("select", k);
  }

  SQueryP paren_query() {
    expect_sym("(");
    SQueryP q = query();
    expect_sym(")");
    return q;
  }

  SFormulaP predicate() {
    Pos p = tok().pos;
    if (kw("exists")) {
      ++i_;
      auto f = make_f(SFormula::Kind::Exists, p);
      f->query = paren_query();
      return f;
    }
    if ((kw("true") || kw("false")) && !continues_expression(1)) {
      auto f = make_f(kw("true") ? SFormula::Kind::True : SFormula::Kind::False, p);
      ++i_;
      return f;
    }
    if (sym("(") && !kw("select", 1)) {
      // Parenthesized formula, or a row / expression starting with '('.
      std::size_t save = i_;
      int save_ordinal = next_ordinal_;
      try {
        ++i_;
        SFormulaP f = formula();
        expect_sym(")");
        if (!continues_expression()) return f;
      } catch (const UnsupportedFeature&) {
        throw;
      } catch (const SqlError&) {
      }
      i_ = save;
      next_ordinal_ = save_ordinal;
      if (auto row = try_row()) return *row;
    }
    std::vector<SExprP> lhs{expr()};
    return predicate_tail(std::move(lhs), p);
  }

  // (e1, e2, ...) [not] in (subquery)
  std::optional<SFormulaP> try_row() {
    std::size_t save = i_;
    int save_ordinal = next_ordinal_;
    try {
      Pos p = tok().pos;
      expect_sym("(");
      std::vector<SExprP> row{expr()};
      if (!sym(",")) {
        i_ = save;
        return std::nullopt;
      }
      while (sym(",")) {
        ++i_;
        row.push_back(expr());
      }
      expect_sym(")");
      return predicate_tail(std::move(row), p);
    } catch (const UnsupportedFeature&) {
      throw;
    } catch (const SqlError&) {
      i_ = save;
      next_ordinal_ = save_ordinal;
      return std::nullopt;
    }
  }

  SFormulaP predicate_tail(std::vector<SExprP> lhs, Pos p) {
    bool negated = false;
    if (kw("not") && (kw("in", 1) || kw("between", 1) || kw("like", 1))) {
      negated = true;
      ++i_;
    }
    if (kw("is")) unsupported("is [not] null");
    if (kw("between")) unsupported("between");
    if (kw("like")) unsupported("like");
    SFormulaP f;
    if (kw("in")) {
      ++i_;
      f = make_f(SFormula::Kind::In, p);
      f->args = std::move(lhs);
      if (!sym("(") || !query_at(1)) unsupported("in with a value list");
      f->query = paren_query();
    } else {
      if (lhs.size() != 1) fail("row value must be followed by 'in'");
      alg::Pred pred;
      if (!comparison_at(pred)) fail("expected a comparison");
      ++i_;
      if (kw("all") || kw("any") || kw("some")) {
        f = make_f(SFormula::Kind::Quant, p);
        f->all = kw("all");
        ++i_;
        f->pred = pred;
        f->args = std::move(lhs);
        f->query = paren_query();
      } else {
        f = make_f(SFormula::Kind::Cmp, p);
        f->pred = pred;
        f->args = {lhs[0], expr()};
      }
    }
    if (negated) {
      auto g = make_f(SFormula::Kind::Not, p);
      g->lhs = f;
      return g;
    }
    return f;
  }

  // -- Expressions ----------------------------------------------------------

  SExprP make_e(SExpr::Kind k, Pos p) {
    auto e = std::make_shared<SExpr>();
    e->kind = k;
    e->pos = p;
    return e;
  }

  SExprP binary(alg::Fn f, SExprP a, SExprP b, Pos p) {
    auto e = make_e(SExpr::Kind::Binary, p);
    e->fn = f;
    e->args = {std::move(a), std::move(b)};
    return e;
  }

  SExprP expr() {
    SExprP e = additive();
    while (sym("||")) {
      Pos p = tok().pos;
      ++i_;
      e = binary(alg::Fn::Concat, e, additive(), p);
    }
    return e;
  }

  SExprP additive() {
    SExprP e = multiplicative();
    while (sym("+") || sym("-")) {
      Pos p = tok().pos;
      alg::Fn f = sym("+") ? alg::Fn::Add : alg::Fn::Sub;
      ++i_;
      e = binary(f, e, multiplicative(), p);
    }
    return e;
  }

  SExprP multiplicative() {
    SExprP e = unary();
    while (sym("*") || sym("/")) {
      Pos p = tok().pos;
      alg::Fn f = sym("*") ? alg::Fn::Mul : alg::Fn::Div;
      ++i_;
      e = binary(f, e, unary(), p);
    }
    return e;
  }

  SExprP unary() {
    if (sym("-")) {
      Pos p = tok().pos;
      ++i_;
      SExprP a = unary();
      if (a->kind == SExpr::Kind::Const && a->value.is_numeric()) {
        a->value = negate(a->value);
        a->pos = p;
        return a;
      }
      auto e = make_e(SExpr::Kind::Neg, p);
      e->args = {a};
      return e;
    }
    if (sym("+")) {
      ++i_;
      return unary();
    }
    return primary();
  }

  SExprP primary() {
    const Token& t = tok();
    Pos p = t.pos;
    if (t.kind == Token::Integer) {
      ++i_;
      auto e = make_e(SExpr::Kind::Const, p);
      e->value = Value(BigInt(t.text));
      return e;
    }
    if (t.kind == Token::Decimal) {
      ++i_;
      auto e = make_e(SExpr::Kind::Const, p);
      e->value = Value(std::stod(t.text));
      return e;
    }
    if (t.kind == Token::String) {
      ++i_;
      auto e = make_e(SExpr::Kind::Const, p);
      e->value = Value(t.text);
      return e;
    }
    if (sym("(")) {
      if (kw("select", 1)) unsupported("scalar subquery");
      ++i_;
      SExprP e = expr();
      expect_sym(")");
      return e;
    }
    if (t.kind == Token::Word) {
      if (t.lower == "null" || t.lower == "true" || t.lower == "false") {
        ++i_;
        auto e = make_e(SExpr::Kind::Const, p);
        if (t.lower != "null") e->value = Value(t.lower == "true");
        return e;
      }
      if (t.lower == "case") unsupported("case");
      if (t.lower == "cast") unsupported("cast");
      static const std::pair<const char*, alg::Agg> aggs[] = {
          {"sum", alg::Agg::Sum}, {"count", alg::Agg::Count}, {"avg", alg::Agg::Avg},
          {"min", alg::Agg::Min}, {"max", alg::Agg::Max}};
      for (auto& [n, a] : aggs)
        if (t.lower == n && sym("(", 1)) {
          i_ += 2;
          auto e = make_e(SExpr::Kind::Agg, p);
          e->agg = a;
          if (kw("distinct")) unsupported("distinct");
          if (a == alg::Agg::Count && sym("*")) {
            ++i_;
            e->agg = alg::Agg::CountStar;
          } else {
            e->args = {expr()};
          }
          expect_sym(")");
          return e;
        }
      if (at_identifier() && sym("(", 1)) unsupported("function " + t.text);
    }
    if (at_identifier()) {
      auto e = make_e(SExpr::Kind::Column, p);
      std::string first = identifier();
      if (sym(".")) {
        ++i_;
        e->qualifier = first;
        e->name = identifier();
      } else {
        e->name = first;
      }
      return e;
    }
    fail("expected an expression");
  }
};

}  // namespace

std::vector<Statement> parse(const std::string& sql_text) {
  return Parser(sql_text).statements();
}

Schema schema_of(const std::vector<Statement>& stmts) {
  Schema s;
  for (auto& st : stmts)
    if (st.create) {
      if (s.find(st.create->table.name))
        throw SqlError("table " + st.create->table.name + " declared twice", st.create->pos);
      s.add(st.create->table);
    }
  return s;
}

SQueryP query_of(const std::vector<Statement>& stmts) {
  SQueryP q;
  for (auto& st : stmts)
    if (st.query) {
      if (q) throw SqlError("expected exactly one query", st.query->pos);
      q = st.query;
    }
  if (!q) throw SqlError("no query found", Pos{});
  return q;
}

}  // namespace dbx::sql

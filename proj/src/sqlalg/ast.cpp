// SPDX-License-Identifier: MIT
#include <cctype>
#include <unordered_set>

#include "dbx/sqlalg.hpp"

namespace dbx::alg {

ExprP cst(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->value = std::move(v);
  return e;
}

ExprP attr(std::string a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Attr;
  e->attr = std::move(a);
  return e;
}

ExprP fn(Fn f, std::vector<ExprP> args) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Fn;
  e->fn = f;
  e->args = std::move(args);
  return e;
}

ExprP agg(Agg a, ExprP arg) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Agg;
  e->agg = a;
  e->args = {std::move(arg)};
  return e;
}

ExprP count_star() { return agg(Agg::CountStar, cst(Value(1))); }

namespace {

std::shared_ptr<Formula> formula(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

std::shared_ptr<Query> query(Query::Kind k) {
  auto q = std::make_shared<Query>();
  q->kind = k;
  return q;
}

}  // namespace

FormulaP f_true() { return formula(Formula::Kind::True); }

FormulaP f_and(FormulaP a, FormulaP b) {
  auto f = formula(Formula::Kind::And);
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaP f_or(FormulaP a, FormulaP b) {
  auto f = formula(Formula::Kind::Or);
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaP f_not(FormulaP a) {
  auto f = formula(Formula::Kind::Not);
  f->lhs = std::move(a);
  return f;
}

FormulaP f_pred(Pred p, ExprP a, ExprP b) {
  auto f = formula(Formula::Kind::Pred);
  f->pred = p;
  f->args = {std::move(a), std::move(b)};
  return f;
}

FormulaP f_quant(Pred p, bool all, ExprP a, QueryP q) {
  auto f = formula(Formula::Kind::Quant);
  f->pred = p;
  f->all = all;
  f->args = {std::move(a)};
  f->query = std::move(q);
  return f;
}

FormulaP f_in(std::vector<ExprP> args, std::vector<std::string> names, QueryP q) {
  auto f = formula(Formula::Kind::In);
  f->args = std::move(args);
  f->names = std::move(names);
  f->query = std::move(q);
  return f;
}

FormulaP f_exists(QueryP q) {
  auto f = formula(Formula::Kind::Exists);
  f->query = std::move(q);
  return f;
}

QueryP q_empty() { return query(Query::Kind::Empty); }

QueryP q_table(std::string name) {
  auto q = query(Query::Kind::Table);
  q->table = std::move(name);
  return q;
}

QueryP q_set(Query::Kind k, QueryP a, QueryP b) {
  auto q = query(k);
  q->lhs = std::move(a);
  q->rhs = std::move(b);
  return q;
}

QueryP q_join(QueryP a, QueryP b) { return q_set(Query::Kind::Join, std::move(a), std::move(b)); }

QueryP q_project(std::vector<Select> items, QueryP in) {
  auto q = query(Query::Kind::Project);
  q->items = std::move(items);
  q->lhs = std::move(in);
  return q;
}

QueryP q_sigma(FormulaP f, QueryP in) {
  auto q = query(Query::Kind::Sigma);
  q->formula = std::move(f);
  q->lhs = std::move(in);
  return q;
}

QueryP q_gamma(std::vector<Select> items, std::vector<ExprP> group, FormulaP f,
               QueryP in) {
  auto q = query(Query::Kind::Gamma);
  q->items = std::move(items);
  q->group = std::move(group);
  q->formula = std::move(f);
  q->lhs = std::move(in);
  return q;
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

bool equal_exprs(const std::vector<ExprP>& a, const std::vector<ExprP>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(*a[i], *b[i])) return false;
  return true;
}

template <class T>
bool equal_ptr(const std::shared_ptr<const T>& a, const std::shared_ptr<const T>& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

}  // namespace

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Const: return a.value == b.value;
    case Expr::Kind::Attr: return a.attr == b.attr;
    case Expr::Kind::Fn: return a.fn == b.fn && equal_exprs(a.args, b.args);
    case Expr::Kind::Agg: return a.agg == b.agg && equal_exprs(a.args, b.args);
  }
  return false;
}

bool equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  return a.pred == b.pred && a.all == b.all && a.names == b.names &&
         equal_exprs(a.args, b.args) && equal_ptr(a.lhs, b.lhs) &&
         equal_ptr(a.rhs, b.rhs) && equal_ptr(a.query, b.query);
}

bool equal(const Query& a, const Query& b) {
  if (a.kind != b.kind || a.table != b.table) return false;
  if (a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i)
    if (a.items[i].name != b.items[i].name || !equal(*a.items[i].expr, *b.items[i].expr))
      return false;
  return equal_exprs(a.group, b.group) && equal_ptr(a.formula, b.formula) &&
         equal_ptr(a.lhs, b.lhs) && equal_ptr(a.rhs, b.rhs);
}

std::vector<std::string> sort_of(const Query& q, const Schema& schema) {
  switch (q.kind) {
    case Query::Kind::Empty: return {};
    case Query::Kind::Table: {
      const TableSchema* t = schema.find(q.table);
      if (!t) throw WellFormedError("unknown table " + q.table);
      std::vector<std::string> out;
      for (auto& c : t->columns) out.push_back(qualify(t->name, c.name));
      return out;
    }
    case Query::Kind::Union:
    case Query::Kind::Inter:
    case Query::Kind::Except:
    case Query::Kind::Sigma: return sort_of(*q.lhs, schema);
    case Query::Kind::Join: {
      auto out = sort_of(*q.lhs, schema);
      for (auto& a : sort_of(*q.rhs, schema)) out.push_back(a);
      return out;
    }
    case Query::Kind::Project:
    case Query::Kind::Gamma: {
      std::vector<std::string> out;
      for (auto& s : q.items) out.push_back(s.name);
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Printer

namespace {

const std::unordered_set<std::string>& keywords() {
  static const std::unordered_set<std::string> k = {
      "union", "intersect", "except", "join",   "pi",    "sigma", "gamma",
      "as",    "and",       "or",     "not",    "true",  "false", "null",
      "all",   "any",       "in",     "exists", "count", "sum",   "avg",
      "min",   "max",       "table",  "neg"};
  return k;
}

bool plain_ident(const std::string& s) {
  if (s.empty() || !(std::isalpha((unsigned char)s[0]) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum((unsigned char)c) || c == '_' || c == '.' || c == '$')) return false;
  return !keywords().count(s);
}

std::string ident(const std::string& s) {
  if (plain_ident(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* fn_symbol(Fn f) {
  switch (f) {
    case Fn::Add: return "+";
    case Fn::Sub: return "-";
    case Fn::Mul: return "*";
    case Fn::Div: return "/";
    case Fn::Concat: return "||";
    case Fn::Neg: return "neg";
  }
  return "?";
}

const char* agg_name(Agg a) {
  switch (a) {
    case Agg::Sum: return "sum";
    case Agg::Count:
    case Agg::CountStar: return "count";
    case Agg::Avg: return "avg";
    case Agg::Min: return "min";
    case Agg::Max: return "max";
  }
  return "?";
}

const char* pred_symbol(Pred p) {
  switch (p) {
    case Pred::Eq: return "=";
    case Pred::Ne: return "<>";
    case Pred::Lt: return "<";
    case Pred::Le: return "<=";
    case Pred::Gt: return ">";
    case Pred::Ge: return ">=";
  }
  return "?";
}

std::string print_items(const std::vector<Select>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += print(*items[i].expr) + " as " + ident(items[i].name);
  }
  return out;
}

}  // namespace

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const: return value_literal(e.value);
    case Expr::Kind::Attr: return ident(e.attr);
    case Expr::Kind::Fn:
      if (e.fn == Fn::Neg) return "neg(" + print(*e.args[0]) + ")";
      return "(" + print(*e.args[0]) + " " + fn_symbol(e.fn) + " " + print(*e.args[1]) + ")";
    case Expr::Kind::Agg:
      if (e.agg == Agg::CountStar) return "count(*)";
      return std::string(agg_name(e.agg)) + "(" + print(*e.args[0]) + ")";
  }
  return "?";
}

std::string print(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::And: return "(" + print(*f.lhs) + " and " + print(*f.rhs) + ")";
    case Formula::Kind::Or: return "(" + print(*f.lhs) + " or " + print(*f.rhs) + ")";
    case Formula::Kind::Not: return "not " + print(*f.lhs);
    case Formula::Kind::Pred:
      return "(" + print(*f.args[0]) + " " + pred_symbol(f.pred) + " " + print(*f.args[1]) + ")";
    case Formula::Kind::Quant:
      return "(" + print(*f.args[0]) + " " + pred_symbol(f.pred) + (f.all ? " all " : " any ") +
             print(*f.query) + ")";
    case Formula::Kind::In: {
      std::string out = "((";
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) out += ", ";
        out += print(*f.args[i]) + " as " + ident(f.names[i]);
      }
      return out + ") in " + print(*f.query) + ")";
    }
    case Formula::Kind::Exists: return "exists " + print(*f.query);
  }
  return "?";
}

std::string print(const Query& q) {
  switch (q.kind) {
    case Query::Kind::Empty: return "()";
    case Query::Kind::Table: return "table " + ident(q.table);
    case Query::Kind::Union: return "(" + print(*q.lhs) + " union " + print(*q.rhs) + ")";
    case Query::Kind::Inter: return "(" + print(*q.lhs) + " intersect " + print(*q.rhs) + ")";
    case Query::Kind::Except: return "(" + print(*q.lhs) + " except " + print(*q.rhs) + ")";
    case Query::Kind::Join: return "(" + print(*q.lhs) + " join " + print(*q.rhs) + ")";
    case Query::Kind::Project: return "pi[" + print_items(q.items) + "](" + print(*q.lhs) + ")";
    case Query::Kind::Sigma: return "sigma[" + print(*q.formula) + "](" + print(*q.lhs) + ")";
    case Query::Kind::Gamma: {
      std::string g;
      for (std::size_t i = 0; i < q.group.size(); ++i) {
        if (i) g += ", ";
        g += print(*q.group[i]);
      }
      return "gamma[" + print_items(q.items) + "; " + g + "; " + print(*q.formula) + "](" +
             print(*q.lhs) + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser for the printed notation

namespace {

struct Tok {
  enum Kind { Ident, QIdent, Str, Int, Dbl, Punct, End } kind;
  std::string text;
};

class Parser {
 public:
  explicit Parser(const std::string& s) { lex(s); }

  QueryP parse_top() {
    QueryP q = parse_q();
    if (peek().kind != Tok::End) fail("trailing input");
    return q;
  }

 private:
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    std::string near = pos_ < toks_.size() ? toks_[pos_].text : "";
    throw WellFormedError("algebra parse error: " + msg + " near '" + near + "'");
  }

  void lex(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace((unsigned char)c)) {
        ++i;
      } else if (std::isalpha((unsigned char)c) || c == '_') {
        std::size_t j = i;
        while (j < s.size() &&
               (std::isalnum((unsigned char)s[j]) || s[j] == '_' || s[j] == '.' || s[j] == '$'))
          ++j;
        toks_.push_back({Tok::Ident, s.substr(i, j - i)});
        i = j;
      } else if (std::isdigit((unsigned char)c)) {
        std::size_t j = i;
        bool dbl = false;
        while (j < s.size()) {
          char d = s[j];
          if (std::isdigit((unsigned char)d)) {
            ++j;
          } else if (d == '.' || d == 'e' || d == 'E') {
            dbl = true;
            ++j;
            if ((d == 'e' || d == 'E') && j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
          } else {
            break;
          }
        }
        toks_.push_back({dbl ? Tok::Dbl : Tok::Int, s.substr(i, j - i)});
        i = j;
      } else if (c == '\'' || c == '"') {
        std::string text;
        std::size_t j = i + 1;
        for (;;) {
          if (j >= s.size()) throw WellFormedError("algebra parse error: unterminated quote");
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
        toks_.push_back({c == '\'' ? Tok::Str : Tok::QIdent, text});
        i = j + 1;
      } else {
        static const char* two[] = {"<>", "<=", ">=", "||"};
        bool matched = false;
        for (auto t : two)
          if (s.compare(i, 2, t) == 0) {
            toks_.push_back({Tok::Punct, t});
            i += 2;
            matched = true;
            break;
          }
        if (!matched) {
          if (std::string("()[],;+-*/=<>").find(c) == std::string::npos)
            throw WellFormedError(std::string("algebra parse error: bad character '") + c + "'");
          toks_.push_back({Tok::Punct, std::string(1, c)});
          ++i;
        }
      }
    }
    toks_.push_back({Tok::End, ""});
  }

  const Tok& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is_punct(const std::string& p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool is_kw(const std::string& w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }
  void expect_punct(const std::string& p) {
    if (!is_punct(p)) fail("expected '" + p + "'");
    ++pos_;
  }
  void expect_kw(const std::string& w) {
    if (!is_kw(w)) fail("expected '" + w + "'");
    ++pos_;
  }
  std::string name() {
    const Tok& t = peek();
    if (t.kind == Tok::QIdent || (t.kind == Tok::Ident && !keywords().count(t.text))) {
      ++pos_;
      return t.text;
    }
    fail("expected a name");
  }

  QueryP parse_q() {
    if (is_punct("(")) {
      if (is_punct(")", 1)) {
        pos_ += 2;
        return q_empty();
      }
      ++pos_;
      QueryP a = parse_q();
      Query::Kind k;
      if (is_kw("union")) k = Query::Kind::Union;
      else if (is_kw("intersect")) k = Query::Kind::Inter;
      else if (is_kw("except")) k = Query::Kind::Except;
      else if (is_kw("join")) k = Query::Kind::Join;
      else fail("expected a binary query operator");
      ++pos_;
      QueryP b = parse_q();
      expect_punct(")");
      return q_set(k, a, b);
    }
    if (is_kw("table")) {
      ++pos_;
      return q_table(name());
    }
    if (is_kw("pi")) {
      ++pos_;
      expect_punct("[");
      auto items = parse_items();
      expect_punct("]");
      return q_project(std::move(items), parse_paren_q());
    }
    if (is_kw("sigma")) {
      ++pos_;
      expect_punct("[");
      FormulaP f = parse_f();
      expect_punct("]");
      return q_sigma(f, parse_paren_q());
    }
    if (is_kw("gamma")) {
      ++pos_;
      expect_punct("[");
      auto items = parse_items();
      expect_punct(";");
      std::vector<ExprP> group;
      if (!is_punct(";")) {
        group.push_back(parse_e());
        while (is_punct(",")) {
          ++pos_;
          group.push_back(parse_e());
        }
      }
      expect_punct(";");
      FormulaP f = parse_f();
      expect_punct("]");
      return q_gamma(std::move(items), std::move(group), f, parse_paren_q());
    }
    fail("expected a query");
  }

  QueryP parse_paren_q() {
    expect_punct("(");
    QueryP q = parse_q();
    expect_punct(")");
    return q;
  }

  std::vector<Select> parse_items() {
    std::vector<Select> items;
    if (is_punct("]") || is_punct(";")) return items;
    for (;;) {
      ExprP e = parse_e();
      expect_kw("as");
      items.push_back({e, name()});
      if (!is_punct(",")) break;
      ++pos_;
    }
    return items;
  }

  bool pred_at(Pred& p) const {
    static const std::pair<const char*, Pred> preds[] = {
        {"=", Pred::Eq}, {"<>", Pred::Ne}, {"<", Pred::Lt},
        {"<=", Pred::Le}, {">", Pred::Gt}, {">=", Pred::Ge}};
    for (auto& [s, pp] : preds)
      if (is_punct(s)) {
        p = pp;
        return true;
      }
    return false;
  }

  FormulaP parse_f() {
    if (is_kw("true")) {
      ++pos_;
      return f_true();
    }
    if (is_kw("not")) {
      ++pos_;
      return f_not(parse_f());
    }
    if (is_kw("exists")) {
      ++pos_;
      return f_exists(parse_q());
    }
    if (!is_punct("(")) fail("expected a formula");
    std::size_t save = pos_;
    // ((e as a, ...) in Q)
    if (is_punct("(", 1)) {
      try {
        pos_ += 2;
        std::vector<ExprP> args;
        std::vector<std::string> names;
        for (;;) {
          args.push_back(parse_e());
          expect_kw("as");
          names.push_back(name());
          if (!is_punct(",")) break;
          ++pos_;
        }
        expect_punct(")");
        expect_kw("in");
        QueryP q = parse_q();
        expect_punct(")");
        return f_in(std::move(args), std::move(names), q);
      } catch (const WellFormedError&) {
        pos_ = save;
      }
    }
    // (f and f) / (f or f)
    try {
      ++pos_;
      FormulaP a = parse_f();
      bool is_and = is_kw("and");
      if (!is_and && !is_kw("or")) fail("expected and/or");
      ++pos_;
      FormulaP b = parse_f();
      expect_punct(")");
      return is_and ? f_and(a, b) : f_or(a, b);
    } catch (const WellFormedError&) {
      pos_ = save;
    }
    ++pos_;
    ExprP a = parse_e();
    Pred p;
    if (!pred_at(p)) fail("expected a comparison");
    ++pos_;
    if (is_kw("all") || is_kw("any")) {
      bool all = is_kw("all");
      ++pos_;
      QueryP q = parse_q();
      expect_punct(")");
      return f_quant(p, all, a, q);
    }
    ExprP b = parse_e();
    expect_punct(")");
    return f_pred(p, a, b);
  }

  ExprP parse_e() {
    const Tok& t = peek();
    if (t.kind == Tok::Int) {
      ++pos_;
      return cst(Value(BigInt(t.text)));
    }
    if (t.kind == Tok::Dbl) {
      ++pos_;
      return cst(Value(std::stod(t.text)));
    }
    if (t.kind == Tok::Str) {
      ++pos_;
      return cst(Value(t.text));
    }
    if (is_punct("-") && (peek(1).kind == Tok::Int || peek(1).kind == Tok::Dbl)) {
      ++pos_;
      ExprP e = parse_e();
      return cst(negate(e->value));
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "null") {
        ++pos_;
        return cst(Value());
      }
      if (t.text == "true" || t.text == "false") {
        ++pos_;
        return cst(Value(t.text == "true"));
      }
      if (t.text == "neg") {
        ++pos_;
        expect_punct("(");
        ExprP a = parse_e();
        expect_punct(")");
        return fn(Fn::Neg, {a});
      }
      static const std::pair<const char*, Agg> aggs[] = {
          {"sum", Agg::Sum}, {"count", Agg::Count}, {"avg", Agg::Avg},
          {"min", Agg::Min}, {"max", Agg::Max}};
      for (auto& [n, a] : aggs)
        if (t.text == n) {
          ++pos_;
          expect_punct("(");
          if (a == Agg::Count && is_punct("*")) {
            ++pos_;
            expect_punct(")");
            return count_star();
          }
          ExprP arg = parse_e();
          expect_punct(")");
          return agg(a, arg);
        }
    }
    if (t.kind == Tok::Ident || t.kind == Tok::QIdent) return attr(name());
    if (is_punct("(")) {
      ++pos_;
      ExprP a = parse_e();
      Fn f;
      if (is_punct("+")) f = Fn::Add;
      else if (is_punct("-")) f = Fn::Sub;
      else if (is_punct("*")) f = Fn::Mul;
      else if (is_punct("/")) f = Fn::Div;
      else if (is_punct("||")) f = Fn::Concat;
      else fail("expected an arithmetic operator");
      ++pos_;
      ExprP b = parse_e();
      expect_punct(")");
      return fn(f, {a, b});
    }
    fail("expected an expression");
  }
};

}  // namespace

QueryP parse_query(const std::string& text) { return Parser(text).parse_top(); }

}  // namespace dbx::alg

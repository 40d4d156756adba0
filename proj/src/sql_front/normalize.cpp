// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "dbx/sql_front.hpp"

namespace dbx::sql {

namespace {

using Type = std::optional<ColumnType>;

struct ScopeItem {
  std::string user_name;  // alias, or table name when unaliased
  std::string alias;      // generated tK
  std::vector<std::pair<std::string, Type>> columns;
};

struct Scope {
  std::vector<ScopeItem> items;
  const Scope* outer = nullptr;
};

struct Resolved {
  std::string alias, column;
  Type type;
};

bool has_aggregate(const SExpr& e) {
  if (e.kind == SExpr::Kind::Agg) return true;
  for (auto& a : e.args)
    if (has_aggregate(*a)) return true;
  return false;
}

// Aggregates directly in f, not inside nested subqueries.
bool has_aggregate(const SFormula& f) {
  if (f.lhs && has_aggregate(*f.lhs)) return true;
  if (f.rhs && has_aggregate(*f.rhs)) return true;
  for (auto& a : f.args)
    if (has_aggregate(*a)) return true;
  return false;
}

bool is_grouped(const SQuery& q) {
  if (q.has_group_by) return true;
  if (q.having) return true;
  for (auto& it : q.items)
    if (has_aggregate(*it.expr)) return true;
  return false;
}

const char* agg_name(alg::Agg a) {
  switch (a) {
    case alg::Agg::Sum: return "sum";
    case alg::Agg::Count:
    case alg::Agg::CountStar: return "count";
    case alg::Agg::Avg: return "avg";
    case alg::Agg::Min: return "min";
    case alg::Agg::Max: return "max";
  }
  return "agg";
}

// Output attribute names of a normalized query.
std::vector<std::string> output_names(const SQuery& q) {
  if (q.kind != SQuery::Kind::Select) return output_names(*q.lhs);
  std::vector<std::string> out;
  for (auto& it : q.items) out.push_back(it.alias);
  return out;
}

class Normalizer {
 public:
  explicit Normalizer(const Schema& s) : schema_(s) {}

  // Names must be distinct unless `dedupe`, which renames repeats.
  SQueryP query(const SQuery& q, const Scope* outer, bool dedupe,
                std::vector<Type>* types) {
    auto out = std::make_shared<SQuery>();
    out->kind = q.kind;
    out->pos = q.pos;
    if (q.kind != SQuery::Kind::Select) {
      std::vector<Type> lt, rt;
      out->all = q.all;
      out->lhs = query(*q.lhs, outer, dedupe, &lt);
      out->rhs = query(*q.rhs, outer, dedupe, &rt);
      if (output_names(*out->lhs).size() != output_names(*out->rhs).size())
        throw SqlError("set operation operands have different arity", q.pos);
      if (types) {
        for (std::size_t k = 0; k < lt.size(); ++k)
          if (!lt[k]) lt[k] = rt[k];
        *types = lt;
      }
      return out;
    }

    // Ordinals are source order; the generated aliases follow them.
    Scope scope;
    scope.outer = outer;
    for (auto& f : q.from) {
      FromItem nf;
      nf.pos = f.pos;
      nf.ordinal = f.ordinal;
      nf.alias = "t" + std::to_string(f.ordinal);
      nf.columns = f.columns;
      ScopeItem si;
      si.alias = nf.alias;
      if (f.subquery) {
        std::vector<Type> st;
        nf.subquery = query(*f.subquery, outer, false, &st);
        auto names = output_names(*nf.subquery);
        for (std::size_t k = 0; k < names.size(); ++k) si.columns.emplace_back(names[k], st[k]);
        si.user_name = f.alias;
      } else {
        const TableSchema* t = schema_.find(f.table);
        if (!t) throw SqlError("unknown table " + f.table, f.pos);
        nf.table = t->name;
        for (auto& c : t->columns) si.columns.emplace_back(c.name, c.type);
        si.user_name = f.alias.empty() ? f.table : f.alias;
      }
      if (!f.columns.empty()) {
        if (f.columns.size() != si.columns.size())
          throw SqlError("column alias list has the wrong length", f.pos);
        for (std::size_t k = 0; k < f.columns.size(); ++k) si.columns[k].first = f.columns[k];
        std::vector<std::string> sorted = f.columns;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
          throw SqlError("duplicate column alias", f.pos);
      }
      out->from.push_back(std::move(nf));
      scope.items.push_back(std::move(si));
    }

    if (q.where && has_aggregate(*q.where))
      throw SqlError("aggregates are not allowed in where", q.where->pos);
    out->where = q.where ? formula(*q.where, scope) : make_true(q.pos);

    out->has_group_by = q.has_group_by;
    for (auto& g : q.group_by) out->group_by.push_back(expr(*g, scope, false));
    if (q.having) out->having = formula(*q.having, scope);

    std::vector<Type> item_types;
    if (q.star) {
      for (auto& si : scope.items)
        for (auto& [c, t] : si.columns) {
          auto e = std::make_shared<SExpr>();
          e->kind = SExpr::Kind::Column;
          e->pos = q.pos;
          e->qualifier = si.alias;
          e->name = c;
          out->items.push_back({e, c});
          item_types.push_back(t);
        }
    } else {
      for (std::size_t k = 0; k < q.items.size(); ++k) {
        const SelectItem& it = q.items[k];
        SelectItem ni;
        ni.expr = expr(*it.expr, scope, false);
        if (!it.alias.empty()) ni.alias = it.alias;
        else if (it.expr->kind == SExpr::Kind::Column) ni.alias = it.expr->name;
        else if (it.expr->kind == SExpr::Kind::Agg) ni.alias = agg_name(it.expr->agg);
        else ni.alias = "col" + std::to_string(k + 1);
        out->items.push_back(std::move(ni));
        item_types.push_back(last_type_);
      }
    }
    std::unordered_set<std::string> seen;
    for (auto& it : out->items) {
      if (seen.count(it.alias)) {
        if (!dedupe) throw SqlError("duplicate output name " + it.alias, it.expr->pos);
        std::string base = it.alias;
        for (int n = 1; seen.count(it.alias); ++n) it.alias = base + "_" + std::to_string(n);
      }
      seen.insert(it.alias);
    }
    if (types) *types = item_types;
    return out;
  }

 private:
  const Schema& schema_;
  Type last_type_;

  static SFormulaP make_true(Pos p) {
    auto f = std::make_shared<SFormula>();
    f->kind = SFormula::Kind::True;
    f->pos = p;
    return f;
  }

  Resolved resolve(const SExpr& c, const Scope& scope) {
    for (const Scope* s = &scope; s; s = s->outer) {
      std::vector<Resolved> hits;
      for (auto& si : s->items) {
        if (!c.qualifier.empty() && c.qualifier != si.user_name) continue;
        for (auto& [name, t] : si.columns)
          if (name == c.name) hits.push_back({si.alias, name, t});
      }
      if (hits.size() > 1) throw SqlError("ambiguous column " + display(c), c.pos);
      if (hits.size() == 1) return hits[0];
      if (!c.qualifier.empty()) {
        bool known = std::any_of(s->items.begin(), s->items.end(),
                                 [&](const ScopeItem& si) { return si.user_name == c.qualifier; });
        if (known) throw SqlError("unknown column " + display(c), c.pos);
      }
    }
    throw SqlError("unknown column " + display(c), c.pos);
  }

  static std::string display(const SExpr& c) {
    return c.qualifier.empty() ? c.name : c.qualifier + "." + c.name;
  }

  SExprP expr(const SExpr& e, const Scope& scope, bool in_agg) {
    auto out = std::make_shared<SExpr>(e);
    switch (e.kind) {
      case SExpr::Kind::Const:
        last_type_ = e.value.is_null()     ? Type()
                     : e.value.is_bool()   ? Type(ColumnType::Boolean)
                     : e.value.is_int()    ? Type(ColumnType::Int)
                     : e.value.is_double() ? Type(ColumnType::Double)
                                           : Type(ColumnType::Text);
        return out;
      case SExpr::Kind::Column: {
        Resolved r = resolve(e, scope);
        out->qualifier = r.alias;
        out->name = r.column;
        last_type_ = r.type;
        return out;
      }
      case SExpr::Kind::Binary:
      case SExpr::Kind::Neg: {
        std::vector<Type> ts;
        for (auto& a : out->args) {
          a = expr(*a, scope, in_agg);
          ts.push_back(last_type_);
        }
        if (e.kind == SExpr::Kind::Binary && e.fn == alg::Fn::Concat) last_type_ = ColumnType::Text;
        else if (e.kind == SExpr::Kind::Neg) last_type_ = ts[0];
        else if (!ts[0] || !ts[1]) last_type_ = std::nullopt;
        else if (*ts[0] == ColumnType::Int && *ts[1] == ColumnType::Int) last_type_ = ColumnType::Int;
        else last_type_ = ColumnType::Double;
        return out;
      }
      case SExpr::Kind::Agg: {
        if (in_agg) throw SqlError("nested aggregate", e.pos);
        Type t;
        for (auto& a : out->args) {
          a = expr(*a, scope, true);
          t = last_type_;
        }
        switch (e.agg) {
          case alg::Agg::Count:
          case alg::Agg::CountStar: last_type_ = ColumnType::Int; break;
          case alg::Agg::Avg: last_type_ = ColumnType::Double; break;
          default: last_type_ = t;
        }
        return out;
      }
    }
    return out;
  }

  SFormulaP formula(const SFormula& f, const Scope& scope) {
    auto out = std::make_shared<SFormula>(f);
    if (f.lhs) out->lhs = formula(*f.lhs, scope);
    if (f.rhs) out->rhs = formula(*f.rhs, scope);
    for (auto& a : out->args) a = expr(*a, scope, false);
    if (f.query) {
      out->query = query(*f.query, &scope, true, nullptr);
      std::size_t arity = output_names(*out->query).size();
      if (f.kind == SFormula::Kind::In && arity != f.args.size())
        throw SqlError("in: subquery has " + std::to_string(arity) + " columns, expected " +
                           std::to_string(f.args.size()),
                       f.pos);
      if (f.kind == SFormula::Kind::Quant && arity != 1)
        throw SqlError("all/any subquery must return one column", f.pos);
    }
    return out;
  }
};

// -- Printing ---------------------------------------------------------------

bool plain(const std::string& s) {
  static const std::unordered_set<std::string> words = {
      "select", "from",   "where", "group", "by",     "having", "union",  "intersect",
      "except", "all",    "any",   "some",  "in",     "exists", "not",    "and",
      "or",     "as",     "null",  "true",  "false",  "create", "table",  "distinct",
      "order",  "limit",  "is",    "between", "like", "case",   "when",   "then",
      "else",   "end",    "on",    "join",  "with",   "recursive", "cast", "offset"};
  if (s.empty() || !(std::isalpha((unsigned char)s[0]) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum((unsigned char)c) || c == '_')) return false;
  std::string l = s;
  for (auto& c : l) c = char(std::tolower((unsigned char)c));
  return !words.count(l);
}

std::string ident(const std::string& s) {
  if (plain(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* fn_symbol(alg::Fn f) {
  switch (f) {
    case alg::Fn::Add: return "+";
    case alg::Fn::Sub: return "-";
    case alg::Fn::Mul: return "*";
    case alg::Fn::Div: return "/";
    case alg::Fn::Concat: return "||";
    case alg::Fn::Neg: return "-";
  }
  return "?";
}

const char* pred_symbol(alg::Pred p) {
  switch (p) {
    case alg::Pred::Eq: return "=";
    case alg::Pred::Ne: return "<>";
    case alg::Pred::Lt: return "<";
    case alg::Pred::Le: return "<=";
    case alg::Pred::Gt: return ">";
    case alg::Pred::Ge: return ">=";
  }
  return "?";
}

std::string print_expr(const SExpr& e) {
  switch (e.kind) {
    case SExpr::Kind::Const: {
      std::string s = value_literal(e.value);
      return s[0] == '-' ? "(" + s + ")" : s;
    }
    case SExpr::Kind::Column:
      return e.qualifier.empty() ? ident(e.name) : ident(e.qualifier) + "." + ident(e.name);
    case SExpr::Kind::Binary:
      return "(" + print_expr(*e.args[0]) + " " + fn_symbol(e.fn) + " " + print_expr(*e.args[1]) +
             ")";
    case SExpr::Kind::Neg: return "(-" + print_expr(*e.args[0]) + ")";
    case SExpr::Kind::Agg:
      if (e.agg == alg::Agg::CountStar) return "count(*)";
      return std::string(agg_name(e.agg)) + "(" + print_expr(*e.args[0]) + ")";
  }
  return "?";
}

std::string print_formula(const SFormula& f) {
  switch (f.kind) {
    case SFormula::Kind::True: return "true";
    case SFormula::Kind::False: return "false";
    case SFormula::Kind::And:
      return "(" + print_formula(*f.lhs) + " and " + print_formula(*f.rhs) + ")";
    case SFormula::Kind::Or:
      return "(" + print_formula(*f.lhs) + " or " + print_formula(*f.rhs) + ")";
    case SFormula::Kind::Not: return "(not " + print_formula(*f.lhs) + ")";
    case SFormula::Kind::Cmp:
      return "(" + print_expr(*f.args[0]) + " " + pred_symbol(f.pred) + " " +
             print_expr(*f.args[1]) + ")";
    case SFormula::Kind::Quant:
      return "(" + print_expr(*f.args[0]) + " " + pred_symbol(f.pred) +
             (f.all ? " all (" : " any (") + print_sql(*f.query) + "))";
    case SFormula::Kind::In: {
      std::string row;
      if (f.args.size() == 1) {
        row = print_expr(*f.args[0]);
      } else {
        row = "(";
        for (std::size_t k = 0; k < f.args.size(); ++k) {
          if (k) row += ", ";
          row += print_expr(*f.args[k]);
        }
        row += ")";
      }
      return "(" + row + " in (" + print_sql(*f.query) + "))";
    }
    case SFormula::Kind::Exists: return "exists (" + print_sql(*f.query) + ")";
  }
  return "?";
}

// -- Lowering ---------------------------------------------------------------

class Lowerer {
 public:
  explicit Lowerer(const Schema& s) : schema_(s) {}

  alg::QueryP query(const SQuery& q) {
    using K = alg::Query::Kind;
    if (q.kind != SQuery::Kind::Select) {
      alg::QueryP l = query(*q.lhs);
      alg::QueryP r = query(*q.rhs);
      auto ln = output_names(*q.lhs);
      auto rn = output_names(*q.rhs);
      if (ln != rn) {
        std::vector<alg::Select> ren;
        for (std::size_t k = 0; k < ln.size(); ++k) ren.push_back({alg::attr(rn[k]), ln[k]});
        r = alg::q_project(std::move(ren), r);
      }
      K k = q.kind == SQuery::Kind::Union       ? K::Union
            : q.kind == SQuery::Kind::Intersect ? K::Inter
                                                : K::Except;
      return alg::q_set(k, l, r);
    }
    alg::QueryP src;
    for (auto& f : q.from) {
      alg::QueryP item = from_item(f);
      src = src ? alg::q_join(src, item) : item;
    }
    if (!src) src = alg::q_empty();
    src = alg::q_sigma(q.where ? formula(*q.where) : alg::f_true(), src);
    std::vector<alg::Select> items;
    for (auto& it : q.items) items.push_back({expr(*it.expr), it.alias});
    if (!is_grouped(q)) return alg::q_project(std::move(items), src);
    std::vector<alg::ExprP> group;
    for (auto& g : q.group_by) group.push_back(expr(*g));
    return alg::q_gamma(std::move(items), std::move(group),
                        q.having ? formula(*q.having) : alg::f_true(), src);
  }

 private:
  const Schema& schema_;

  alg::QueryP from_item(const FromItem& f) {
    std::vector<std::string> src_names;
    alg::QueryP src;
    if (f.subquery) {
      src = query(*f.subquery);
      src_names = output_names(*f.subquery);
    } else {
      const TableSchema* t = schema_.find(f.table);
      if (!t) throw SqlError("unknown table " + f.table, f.pos);
      src = alg::q_table(t->name);
      for (auto& c : t->columns) src_names.push_back(qualify(t->name, c.name));
    }
    std::vector<alg::Select> ren;
    for (std::size_t k = 0; k < src_names.size(); ++k) {
      std::string col = f.columns.empty()
                            ? (f.subquery ? src_names[k] : schema_.find(f.table)->columns[k].name)
                            : f.columns[k];
      ren.push_back({alg::attr(src_names[k]), qualify(f.alias, col)});
    }
    return alg::q_project(std::move(ren), src);
  }

  alg::FormulaP formula(const SFormula& f) {
    switch (f.kind) {
      case SFormula::Kind::True: return alg::f_true();
      case SFormula::Kind::False: return alg::f_not(alg::f_true());
      case SFormula::Kind::And: return alg::f_and(formula(*f.lhs), formula(*f.rhs));
      case SFormula::Kind::Or: return alg::f_or(formula(*f.lhs), formula(*f.rhs));
      case SFormula::Kind::Not: return alg::f_not(formula(*f.lhs));
      case SFormula::Kind::Cmp: return alg::f_pred(f.pred, expr(*f.args[0]), expr(*f.args[1]));
      case SFormula::Kind::Quant:
        return alg::f_quant(f.pred, f.all, expr(*f.args[0]), query(*f.query));
      case SFormula::Kind::In: {
        std::vector<alg::ExprP> args;
        for (auto& a : f.args) args.push_back(expr(*a));
        return alg::f_in(std::move(args), output_names(*f.query), query(*f.query));
      }
      case SFormula::Kind::Exists: return alg::f_exists(query(*f.query));
    }
    return alg::f_true();
  }

  alg::ExprP expr(const SExpr& e) {
    switch (e.kind) {
      case SExpr::Kind::Const: return alg::cst(e.value);
      case SExpr::Kind::Column: return alg::attr(qualify(e.qualifier, e.name));
      case SExpr::Kind::Binary: return alg::fn(e.fn, {expr(*e.args[0]), expr(*e.args[1])});
      case SExpr::Kind::Neg: return alg::fn(alg::Fn::Neg, {expr(*e.args[0])});
      case SExpr::Kind::Agg:
        if (e.agg == alg::Agg::CountStar) return alg::count_star();
        return alg::agg(e.agg, expr(*e.args[0]));
    }
    return alg::cst(Value());
  }
};

}  // namespace

SQueryP normalize(const SQueryP& q, const Schema& schema) {
  return Normalizer(schema).query(*q, nullptr, false, nullptr);
}

std::string print_sql(const SQuery& q) {
  if (q.kind != SQuery::Kind::Select) {
    const char* op = q.kind == SQuery::Kind::Union       ? "union"
                     : q.kind == SQuery::Kind::Intersect ? "intersect"
                                                         : "except";
    return "(" + print_sql(*q.lhs) + ") " + op + (q.all ? " all (" : " (") + print_sql(*q.rhs) +
           ")";
  }
  std::string out = "select ";
  if (q.star) {
    out += "*";
  } else {
    for (std::size_t k = 0; k < q.items.size(); ++k) {
      if (k) out += ", ";
      out += print_expr(*q.items[k].expr);
      if (!q.items[k].alias.empty()) out += " as " + ident(q.items[k].alias);
    }
  }
  out += " from ";
  for (std::size_t k = 0; k < q.from.size(); ++k) {
    const FromItem& f = q.from[k];
    if (k) out += ", ";
    out += f.subquery ? "(" + print_sql(*f.subquery) + ")" : ident(f.table);
    if (!f.alias.empty()) out += " " + ident(f.alias);
    if (!f.columns.empty()) {
      out += "(";
      for (std::size_t j = 0; j < f.columns.size(); ++j) {
        if (j) out += ", ";
        out += ident(f.columns[j]);
      }
      out += ")";
    }
  }
  if (q.where) out += " where " + print_formula(*q.where);
  if (!q.group_by.empty()) {
    out += " group by ";
    for (std::size_t k = 0; k < q.group_by.size(); ++k) {
      if (k) out += ", ";
      out += print_expr(*q.group_by[k]);
    }
  }
  if (q.having) out += " having " + print_formula(*q.having);
  return out;
}

alg::QueryP to_sqlalg(const SQuery& q, const Schema& schema) {
  alg::QueryP a = Lowerer(schema).query(q);
  try {
    alg::check_well_formed(*a, {}, schema);
  } catch (const alg::WellFormedError& e) {
    throw SqlError(std::string("ill-formed query: ") + e.what(), q.pos);
  }
  return a;
}

Compiled compile_sql(const std::string& sql_text) {
  auto stmts = parse(sql_text);
  Compiled c;
  c.schema = schema_of(stmts);
  c.normalized = normalize(query_of(stmts), c.schema);
  c.algebra = to_sqlalg(*c.normalized, c.schema);
  return c;
}

}  // namespace dbx::sql

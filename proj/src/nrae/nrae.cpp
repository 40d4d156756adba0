// SPDX-License-Identifier: MIT
#include "dbx/nrae.hpp"

#include <cctype>
#include <sstream>

namespace dbx::nra {

namespace {

Q make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Node node(Node::Kind k) {
  Node n{};
  n.kind = k;
  return n;
}

Q pair_node(Node::Kind k, Q a, Q b) {
  Node n = node(k);
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

}  // namespace

Q cst(Data d) {
  Node n = node(Node::Kind::Const);
  n.value = std::move(d);
  return make(std::move(n));
}

Q in() {
  static const Q q = make(node(Node::Kind::In));
  return q;
}

Q env() {
  static const Q q = make(node(Node::Kind::Env));
  return q;
}

Q unary(UnaryOp op, Q a) {
  Node n = node(Node::Kind::Unary);
  n.uop = std::move(op);
  n.a = std::move(a);
  return make(std::move(n));
}

Q binary(BinaryKind op, Q a, Q b) {
  Node n = node(Node::Kind::Binary);
  n.bop = op;
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

Q comp(Q after, Q before) { return pair_node(Node::Kind::Comp, std::move(after), std::move(before)); }
Q map(Q body, Q over) { return pair_node(Node::Kind::Map, std::move(body), std::move(over)); }
Q select(Q pred, Q over) { return pair_node(Node::Kind::Select, std::move(pred), std::move(over)); }
Q product(Q a, Q b) { return pair_node(Node::Kind::Product, std::move(a), std::move(b)); }
Q default_(Q a, Q b) { return pair_node(Node::Kind::Default, std::move(a), std::move(b)); }
Q either(Q l, Q r) { return pair_node(Node::Kind::Either, std::move(l), std::move(r)); }
Q app_env(Q body, Q e) { return pair_node(Node::Kind::AppEnv, std::move(body), std::move(e)); }

Q map_env(Q body) {
  Node n = node(Node::Kind::MapEnv);
  n.a = std::move(body);
  return make(std::move(n));
}

Q group_by(std::string g, std::vector<std::string> keys, Q over) {
  Node n = node(Node::Kind::GroupBy);
  n.label = std::move(g);
  n.labels = std::move(keys);
  n.a = std::move(over);
  return make(std::move(n));
}

Q table(std::string name) {
  Node n = node(Node::Kind::Table);
  n.label = std::move(name);
  return make(std::move(n));
}

Q dot(Q a, std::string label) { return unary(uop(UnaryKind::Dot, std::move(label)), std::move(a)); }
Q rec(std::string label, Q a) { return unary(uop(UnaryKind::Rec, std::move(label)), std::move(a)); }
Q bag(Q a) { return unary(uop(UnaryKind::Bag), std::move(a)); }
Q left(Q a) { return unary(uop(UnaryKind::Left), std::move(a)); }
Q right(Q a) { return unary(uop(UnaryKind::Right), std::move(a)); }
Q concat(Q a, Q b) { return binary(BinaryKind::RecConcat, std::move(a), std::move(b)); }

bool equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  auto sub = [](const Q& x, const Q& y) {
    if (!x || !y) return !x && !y;
    return equal(*x, *y);
  };
  switch (a.kind) {
    case Node::Kind::Const: return a.value == b.value;
    case Node::Kind::In:
    case Node::Kind::Env: return true;
    case Node::Kind::Unary: return a.uop == b.uop && sub(a.a, b.a);
    case Node::Kind::Binary: return a.bop == b.bop && sub(a.a, b.a) && sub(a.b, b.b);
    case Node::Kind::GroupBy:
      return a.label == b.label && a.labels == b.labels && sub(a.a, b.a);
    case Node::Kind::Table: return a.label == b.label;
    default: return sub(a.a, b.a) && sub(a.b, b.b);
  }
}

std::size_t size(const Node& q) {
  std::size_t n = 1;
  if (q.a) n += size(*q.a);
  if (q.b) n += size(*q.b);
  return n;
}

// ---------------------------------------------------------------- printing

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

// Bare when identifier-like, quoted otherwise, so "t0.a" reads as one label.
std::string label_text(const std::string& l) {
  bool bare = !l.empty() && !std::isdigit(static_cast<unsigned char>(l[0]));
  for (char c : l) bare = bare && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$');
  return bare ? l : "\"" + l + "\"";
}

std::string labels_text(const std::vector<std::string>& ls) {
  std::vector<std::string> out;
  for (auto& l : ls) out.push_back(label_text(l));
  return join(out);
}

bool atomic(const Node& q) {
  return q.kind == Node::Kind::In || q.kind == Node::Kind::Env ||
         q.kind == Node::Kind::Const || q.kind == Node::Kind::Table ||
         (q.kind == Node::Kind::Unary && q.uop.kind == UnaryKind::Dot);
}

void print_to(std::ostream& os, const Node& q) {
  switch (q.kind) {
    case Node::Kind::Const: os << to_string(q.value); return;
    case Node::Kind::In: os << "In"; return;
    case Node::Kind::Env: os << "Env"; return;
    case Node::Kind::Table: os << "table(" << q.label << ")"; return;
    case Node::Kind::Unary:
      switch (q.uop.kind) {
        case UnaryKind::Dot:
          if (atomic(*q.a)) {
            print_to(os, *q.a);
          } else {
            os << "(";
            print_to(os, *q.a);
            os << ")";
          }
          os << "." << label_text(q.uop.label);
          return;
        case UnaryKind::Rec:
          os << "{" << label_text(q.uop.label) << ": ";
          print_to(os, *q.a);
          os << "}";
          return;
        case UnaryKind::Project:
          os << "project[" << labels_text(q.uop.labels) << "](";
          print_to(os, *q.a);
          os << ")";
          return;
        case UnaryKind::GroupBy:
          os << "group_by[" << label_text(q.uop.label) << "; " << labels_text(q.uop.labels) << "](";
          print_to(os, *q.a);
          os << ")";
          return;
        default:
          os << unary_name(q.uop.kind) << "(";
          print_to(os, *q.a);
          os << ")";
          return;
      }
    case Node::Kind::Binary: {
      std::string sym = binary_symbol(q.bop);
      if (sym.empty()) {
        os << binary_name(q.bop) << "(";
        print_to(os, *q.a);
        os << ", ";
        print_to(os, *q.b);
        os << ")";
      } else {
        os << "(";
        print_to(os, *q.a);
        os << " " << sym << " ";
        print_to(os, *q.b);
        os << ")";
      }
      return;
    }
    case Node::Kind::Comp:
    case Node::Kind::AppEnv:
    case Node::Kind::Product:
    case Node::Kind::Default: {
      const char* sym = q.kind == Node::Kind::Comp     ? " @ "
                        : q.kind == Node::Kind::AppEnv ? " @e "
                        : q.kind == Node::Kind::Product ? " x "
                                                        : " ?? ";
      os << "(";
      print_to(os, *q.a);
      os << sym;
      print_to(os, *q.b);
      os << ")";
      return;
    }
    case Node::Kind::Map:
    case Node::Kind::Select:
      os << (q.kind == Node::Kind::Map ? "chi<" : "sigma<");
      print_to(os, *q.a);
      os << ">(";
      print_to(os, *q.b);
      os << ")";
      return;
    case Node::Kind::Either:
      os << "either<";
      print_to(os, *q.a);
      os << "><";
      print_to(os, *q.b);
      os << ">";
      return;
    case Node::Kind::MapEnv:
      os << "chiE<";
      print_to(os, *q.a);
      os << ">";
      return;
    case Node::Kind::GroupBy:
      os << "group_by[" << label_text(q.label) << "; " << labels_text(q.labels) << "](";
      print_to(os, *q.a);
      os << ")";
      return;
  }
}

}  // namespace

std::string print(const Node& q) {
  std::ostringstream os;
  print_to(os, q);
  return os.str();
}

// -------------------------------------------------------------- evaluation

namespace {

[[noreturn]] void type_error(const Node& q, const std::string& what) {
  std::string term = print(q);
  if (term.size() > 160) term = term.substr(0, 157) + "...";
  throw NraError(what + " in " + term);
}

const DataBag& items_of(const Node& q, const Data& d) {
  if (!d.is_bag()) type_error(q, "expected a bag, got " + to_string(d));
  return d.items();
}

bool bool_of(const Node& q, const Data& d) {
  if (!d.is_atom() || !d.atom().is_bool())
    type_error(q, "expected a boolean, got " + to_string(d));
  return d.atom().as_bool();
}

Data eval_node(const Node& q, const Data& rho, const Data& d, const Data& db) {
  switch (q.kind) {
    case Node::Kind::Const: return q.value;
    case Node::Kind::In: return d;
    case Node::Kind::Env: return rho;
    case Node::Kind::Table: {
      const Data* t = db.is_record() ? db.find(q.label) : nullptr;
      if (!t) type_error(q, "unknown table " + q.label);
      return *t;
    }
    case Node::Kind::Unary: {
      Data x = eval_node(*q.a, rho, d, db);
      try {
        return apply_unary(q.uop, x);
      } catch (const NraError&) {
        throw;
      } catch (const EvalError& e) {
        type_error(q, e.what());
      }
    }
    case Node::Kind::Binary: {
      Data x = eval_node(*q.a, rho, d, db);
      Data y = eval_node(*q.b, rho, d, db);
      try {
        return apply_binary(q.bop, x, y);
      } catch (const NraError&) {
        throw;
      } catch (const EvalError& e) {
        type_error(q, e.what());
      }
    }
    case Node::Kind::Comp: return eval_node(*q.a, rho, eval_node(*q.b, rho, d, db), db);
    case Node::Kind::Map: {
      Data xs = eval_node(*q.b, rho, d, db);
      std::vector<Data> out;
      out.reserve(items_of(q, xs).size());
      for (auto& x : items_of(q, xs)) out.push_back(eval_node(*q.a, rho, x, db));
      return Data::bag(std::move(out));
    }
    case Node::Kind::Select: {
      Data xs = eval_node(*q.b, rho, d, db);
      std::vector<Data> out;
      for (auto& x : items_of(q, xs))
        if (bool_of(q, eval_node(*q.a, rho, x, db))) out.push_back(x);
      return Data::bag(std::move(out));
    }
    case Node::Kind::Product: {
      Data xs = eval_node(*q.a, rho, d, db);
      Data ys = eval_node(*q.b, rho, d, db);
      std::vector<Data> out;
      for (auto& x : items_of(q, xs))
        for (auto& y : items_of(q, ys)) {
          if (!x.is_record() || !y.is_record()) type_error(q, "product of non-records");
          out.push_back(apply_binary(BinaryKind::RecConcat, x, y));
        }
      return Data::bag(std::move(out));
    }
    case Node::Kind::Default: {
      Data x = eval_node(*q.a, rho, d, db);
      if (x.is_bag() && x.items().empty()) return eval_node(*q.b, rho, d, db);
      return x;
    }
    case Node::Kind::Either:
      if (d.is_left()) return eval_node(*q.a, rho, d.payload(), db);
      if (d.is_right()) return eval_node(*q.b, rho, d.payload(), db);
      type_error(q, "either applied to " + to_string(d));
    case Node::Kind::AppEnv: {
      Data rho2 = eval_node(*q.b, rho, d, db);
      return eval_node(*q.a, rho2, d, db);
    }
    case Node::Kind::MapEnv: {
      std::vector<Data> out;
      for (auto& r : items_of(q, rho)) out.push_back(eval_node(*q.a, r, d, db));
      return Data::bag(std::move(out));
    }
    case Node::Kind::GroupBy: {
      Data xs = eval_node(*q.a, rho, d, db);
      try {
        return group_by_builtin(q.label, q.labels, xs);
      } catch (const EvalError& e) {
        type_error(q, e.what());
      }
    }
  }
  type_error(q, "unknown node");
}

}  // namespace

Data eval(const Q& q, const Data& rho, const Data& d, const Data& db) {
  return eval_node(*q, rho, d, db);
}

Data eval_top(const Q& q, const Data& rho, const Data& instance) {
  return eval_node(*q, rho, instance, instance);
}

// ----------------------------------------------------------------- group_by

Q desugar_group_by(const std::string& g, const std::vector<std::string>& keys, Q over) {
  UnaryOp proj{UnaryKind::Project, {}, keys};
  Q key_of_in = unary(proj, in());
  Q input = dot(env(), "input");
  Q members = app_env(select(binary(BinaryKind::Equal, dot(env(), "key"), key_of_in), input),
                      concat(rec("key", in()), env()));
  Q distinct_keys = unary(uop(UnaryKind::Distinct), map(key_of_in, input));
  return app_env(map(concat(in(), rec(g, members)), distinct_keys),
                 rec("input", std::move(over)));
}

Q desugar_all(const Q& q) {
  if (!q) return q;
  Q a = desugar_all(q->a);
  Q b = desugar_all(q->b);
  if (q->kind == Node::Kind::GroupBy) return desugar_group_by(q->label, q->labels, a);
  if (a == q->a && b == q->b) return q;
  Node n = *q;
  n.a = a;
  n.b = b;
  return make(std::move(n));
}

// ---------------------------------------------------------------- optimizer

namespace {

bool is_unary(const Q& q, UnaryKind k) {
  return q && q->kind == Node::Kind::Unary && q->uop.kind == k;
}

bool is_true_const(const Q& q) {
  return q && q->kind == Node::Kind::Const && q->value.is_atom() &&
         q->value.atom().is_bool() && q->value.atom().as_bool();
}

// One rule at the root; returns null when it does not apply.
Q apply_rule(const Q& q, Rule r) {
  switch (r) {
    case Rule::EitherLeft:
    case Rule::EitherRight: {
      if (q->kind != Node::Kind::Comp || q->a->kind != Node::Kind::Either) return nullptr;
      UnaryKind tag = r == Rule::EitherLeft ? UnaryKind::Left : UnaryKind::Right;
      if (!is_unary(q->b, tag)) return nullptr;
      Q branch = r == Rule::EitherLeft ? q->a->a : q->a->b;
      return comp(branch, q->b->a);
    }
    case Rule::CompIn:
      if (q->kind != Node::Kind::Comp) return nullptr;
      if (q->b->kind == Node::Kind::In) return q->a;
      if (q->a->kind == Node::Kind::In) return q->b;
      return nullptr;
    case Rule::MapIn:
      if (q->kind == Node::Kind::Map && q->a->kind == Node::Kind::In) return q->b;
      return nullptr;
    case Rule::SelectTrue:
      if (q->kind == Node::Kind::Select && is_true_const(q->a)) return q->b;
      return nullptr;
    case Rule::FlattenBag:
      if (is_unary(q, UnaryKind::Flatten) && is_unary(q->a, UnaryKind::Bag)) return q->a->a;
      return nullptr;
  }
  return nullptr;
}

Q rewrite(const Q& q, const std::vector<Rule>& rules) {
  if (!q) return q;
  Q a = rewrite(q->a, rules);
  Q b = rewrite(q->b, rules);
  Q cur = q;
  if (a != q->a || b != q->b) {
    Node n = *q;
    n.a = a;
    n.b = b;
    cur = make(std::move(n));
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (Rule r : rules)
      if (Q next = apply_rule(cur, r)) {
        cur = next;
        changed = true;
      }
  }
  return cur;
}

}  // namespace

std::vector<Rule> all_rules() {
  return {Rule::EitherLeft, Rule::EitherRight, Rule::CompIn,
          Rule::MapIn,      Rule::SelectTrue,  Rule::FlattenBag};
}

Q rewrite_once(const Q& q, Rule r) { return rewrite(q, {r}); }

Q optimize(const Q& q) {
  Q cur = q;
  auto rules = all_rules();
  for (int pass = 0; pass < 100; ++pass) {
    Q next = rewrite(cur, rules);
    if (next == cur) break;
    cur = next;
  }
  return cur;
}

}  // namespace dbx::nra

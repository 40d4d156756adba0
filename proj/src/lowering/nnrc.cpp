// SPDX-License-Identifier: MIT
#include <algorithm>
#include <sstream>

#include "dbx/lowering.hpp"

namespace dbx::nnrc {

namespace {

E make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

Expr node(Expr::Kind k) {
  Expr e{};
  e.kind = k;
  return e;
}

}  // namespace

E var(std::string x) {
  Expr e = node(Expr::Kind::Var);
  e.x = std::move(x);
  return make(std::move(e));
}

E cst(Data d) {
  Expr e = node(Expr::Kind::Const);
  e.value = std::move(d);
  return make(std::move(e));
}

E let(std::string x, E a, E b) {
  Expr e = node(Expr::Kind::Let);
  e.x = std::move(x);
  e.a = std::move(a);
  e.b = std::move(b);
  return make(std::move(e));
}

E for_(std::string x, E a, E b) {
  Expr e = node(Expr::Kind::For);
  e.x = std::move(x);
  e.a = std::move(a);
  e.b = std::move(b);
  return make(std::move(e));
}

E if_(E a, E b, E c) {
  Expr e = node(Expr::Kind::If);
  e.a = std::move(a);
  e.b = std::move(b);
  e.c = std::move(c);
  return make(std::move(e));
}

E either(E a, std::string x, E b, std::string y, E c) {
  Expr e = node(Expr::Kind::Either);
  e.a = std::move(a);
  e.x = std::move(x);
  e.b = std::move(b);
  e.y = std::move(y);
  e.c = std::move(c);
  return make(std::move(e));
}

E unary(UnaryOp op, E a) {
  Expr e = node(Expr::Kind::Unary);
  e.uop = std::move(op);
  e.a = std::move(a);
  return make(std::move(e));
}

E binary(BinaryKind op, E a, E b) {
  Expr e = node(Expr::Kind::Binary);
  e.bop = op;
  e.a = std::move(a);
  e.b = std::move(b);
  return make(std::move(e));
}

bool equal(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.x != b.x || a.y != b.y) return false;
  auto sub = [](const E& p, const E& q) {
    if (!p || !q) return !p && !q;
    return equal(*p, *q);
  };
  switch (a.kind) {
    case Expr::Kind::Const: return a.value == b.value;
    case Expr::Kind::Unary: return a.uop == b.uop && sub(a.a, b.a);
    case Expr::Kind::Binary: return a.bop == b.bop && sub(a.a, b.a) && sub(a.b, b.b);
    default: return sub(a.a, b.a) && sub(a.b, b.b) && sub(a.c, b.c);
  }
}

// ----------------------------------------------------------------- printing

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
  return out;
}

void print_to(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var: os << e.x; return;
    case Expr::Kind::Const: os << to_string(e.value); return;
    case Expr::Kind::Let:
      os << "(let " << e.x << " = ";
      print_to(os, *e.a);
      os << " in ";
      print_to(os, *e.b);
      os << ")";
      return;
    case Expr::Kind::For:
      os << "{ ";
      print_to(os, *e.b);
      os << " | " << e.x << " in ";
      print_to(os, *e.a);
      os << " }";
      return;
    case Expr::Kind::If:
      os << "(if ";
      print_to(os, *e.a);
      os << " then ";
      print_to(os, *e.b);
      os << " else ";
      print_to(os, *e.c);
      os << ")";
      return;
    case Expr::Kind::Either:
      os << "(match ";
      print_to(os, *e.a);
      os << " with left(" << e.x << ") -> ";
      print_to(os, *e.b);
      os << " | right(" << e.y << ") -> ";
      print_to(os, *e.c);
      os << ")";
      return;
    case Expr::Kind::Unary:
      switch (e.uop.kind) {
        case UnaryKind::Dot:
          print_to(os, *e.a);
          os << "." << e.uop.label;
          return;
        case UnaryKind::Rec:
          os << "{" << e.uop.label << ": ";
          print_to(os, *e.a);
          os << "}";
          return;
        case UnaryKind::Project:
          os << "project[" << join(e.uop.labels) << "](";
          break;
        case UnaryKind::GroupBy:
          os << "group_by[" << e.uop.label << "; " << join(e.uop.labels) << "](";
          break;
        default: os << unary_name(e.uop.kind) << "("; break;
      }
      print_to(os, *e.a);
      os << ")";
      return;
    case Expr::Kind::Binary: {
      std::string sym = binary_symbol(e.bop);
      if (sym.empty()) {
        os << binary_name(e.bop) << "(";
        print_to(os, *e.a);
        os << ", ";
        print_to(os, *e.b);
        os << ")";
      } else {
        os << "(";
        print_to(os, *e.a);
        os << " " << sym << " ";
        print_to(os, *e.b);
        os << ")";
      }
      return;
    }
  }
}

void free_into(const Expr& e, std::vector<std::string>& bound, std::vector<std::string>& out) {
  auto visit = [&](const E& sub, const std::string* binder) {
    if (!sub) return;
    if (binder) bound.push_back(*binder);
    free_into(*sub, bound, out);
    if (binder) bound.pop_back();
  };
  switch (e.kind) {
    case Expr::Kind::Var:
      if (std::find(bound.begin(), bound.end(), e.x) == bound.end() &&
          std::find(out.begin(), out.end(), e.x) == out.end())
        out.push_back(e.x);
      return;
    case Expr::Kind::Const: return;
    case Expr::Kind::Let:
    case Expr::Kind::For:
      visit(e.a, nullptr);
      visit(e.b, &e.x);
      return;
    case Expr::Kind::Either:
      visit(e.a, nullptr);
      visit(e.b, &e.x);
      visit(e.c, &e.y);
      return;
    default:
      visit(e.a, nullptr);
      visit(e.b, nullptr);
      visit(e.c, nullptr);
      return;
  }
}

}  // namespace

std::string print(const Expr& e) {
  std::ostringstream os;
  print_to(os, e);
  return os.str();
}

std::vector<std::string> free_vars(const Expr& e) {
  std::vector<std::string> bound, out;
  free_into(e, bound, out);
  return out;
}

// --------------------------------------------------------------- evaluation

namespace {

struct Scope {
  struct Node {
    std::string name;
    Data value;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head;

  Scope bind(const std::string& x, Data d) const {
    return Scope{std::make_shared<const Node>(Node{x, std::move(d), head})};
  }
  const Data& lookup(const std::string& x) const {
    for (const Node* n = head.get(); n; n = n->next.get())
      if (n->name == x) return n->value;
    throw EvalError("unbound variable " + x);
  }
};

Data run(const Expr& e, const Scope& s) {
  switch (e.kind) {
    case Expr::Kind::Var: return s.lookup(e.x);
    case Expr::Kind::Const: return e.value;
    case Expr::Kind::Let: return run(*e.b, s.bind(e.x, run(*e.a, s)));
    case Expr::Kind::For: {
      Data xs = run(*e.a, s);
      if (!xs.is_bag()) throw EvalError("for over a non-bag in " + print(e));
      std::vector<Data> out;
      out.reserve(xs.items().size());
      for (auto& x : xs.items()) out.push_back(run(*e.b, s.bind(e.x, x)));
      return Data::bag(std::move(out));
    }
    case Expr::Kind::If: {
      Data c = run(*e.a, s);
      if (!c.is_atom() || !c.atom().is_bool()) throw EvalError("if on a non-boolean in " + print(e));
      return c.atom().as_bool() ? run(*e.b, s) : run(*e.c, s);
    }
    case Expr::Kind::Either: {
      Data d = run(*e.a, s);
      if (d.is_left()) return run(*e.b, s.bind(e.x, d.payload()));
      if (d.is_right()) return run(*e.c, s.bind(e.y, d.payload()));
      throw EvalError("match on an untagged value in " + print(e));
    }
    case Expr::Kind::Unary: return apply_unary(e.uop, run(*e.a, s));
    case Expr::Kind::Binary: {
      Data x = run(*e.a, s);
      return apply_binary(e.bop, x, run(*e.b, s));
    }
  }
  throw EvalError("unknown expression");
}

}  // namespace

Data eval_basic(const Expr& e, const std::function<const Data&(const std::string&)>& lookup) {
  switch (e.kind) {
    case Expr::Kind::Var: return lookup(e.x);
    case Expr::Kind::Const: return e.value;
    case Expr::Kind::Unary: return apply_unary(e.uop, eval_basic(*e.a, lookup));
    case Expr::Kind::Binary: {
      Data x = eval_basic(*e.a, lookup);
      return apply_binary(e.bop, x, eval_basic(*e.b, lookup));
    }
    default: throw CompilerBug("complex expression where a basic one is required: " + print(e));
  }
}

E rename_basic(const E& e, const std::function<std::string(const std::string&)>& rename) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      std::string n = rename(e->x);
      return n == e->x ? e : var(n);
    }
    case Expr::Kind::Const: return e;
    case Expr::Kind::Unary: {
      E a = rename_basic(e->a, rename);
      return a == e->a ? e : unary(e->uop, a);
    }
    case Expr::Kind::Binary: {
      E a = rename_basic(e->a, rename);
      E b = rename_basic(e->b, rename);
      return a == e->a && b == e->b ? e : binary(e->bop, a, b);
    }
    default: throw CompilerBug("complex expression where a basic one is required: " + print(*e));
  }
}

Data eval(const E& e, const Bindings& free) {
  Scope s;
  for (auto& [k, v] : free) s = s.bind(k, v);
  return run(*e, s);
}

// ------------------------------------------------------------ from NRAe

namespace {

class FromNra {
 public:
  std::string fresh(const std::string& prefix) { return prefix + "$" + std::to_string(next_++); }

  E go(const nra::Node& q, const std::string& in, const std::string& env) {
    using K = nra::Node::Kind;
    switch (q.kind) {
      case K::Const: return cst(q.value);
      case K::In: return var(in);
      case K::Env: return var(env);
      case K::Table: return unary(uop(UnaryKind::Dot, q.label), var(kDbVar));
      case K::Unary: return unary(q.uop, go(*q.a, in, env));
      case K::Binary: return binary(q.bop, go(*q.a, in, env), go(*q.b, in, env));
      case K::Comp: {
        std::string x = fresh("v");
        E before = go(*q.b, in, env);
        return let(x, before, go(*q.a, x, env));
      }
      case K::Map: {
        std::string x = fresh("v");
        E over = go(*q.b, in, env);
        return for_(x, over, go(*q.a, x, env));
      }
      case K::Select: {
        std::string x = fresh("v");
        E over = go(*q.b, in, env);
        E keep = if_(go(*q.a, x, env), unary(uop(UnaryKind::Bag), var(x)),
                     cst(Data::bag(std::vector<Data>{})));
        return unary(uop(UnaryKind::Flatten), for_(x, over, keep));
      }
      case K::Product: {
        std::string x = fresh("v");
        std::string y = fresh("v");
        E lhs = go(*q.a, in, env);
        E rhs = go(*q.b, in, env);
        E inner = for_(y, rhs, binary(BinaryKind::RecConcat, var(x), var(y)));
        return unary(uop(UnaryKind::Flatten), for_(x, lhs, inner));
      }
      case K::Default: {
        std::string x = fresh("v");
        E first = go(*q.a, in, env);
        E empty = binary(BinaryKind::Equal, var(x), cst(Data::bag(std::vector<Data>{})));
        return let(x, first, if_(empty, go(*q.b, in, env), var(x)));
      }
      case K::Either: {
        std::string x = fresh("v");
        std::string y = fresh("v");
        return either(var(in), x, go(*q.a, x, env), y, go(*q.b, y, env));
      }
      case K::AppEnv: {
        std::string x = fresh("env");
        E e2 = go(*q.b, in, env);
        return let(x, e2, go(*q.a, in, x));
      }
      case K::MapEnv: {
        std::string x = fresh("env");
        return for_(x, var(env), go(*q.a, in, x));
      }
      case K::GroupBy: {
        UnaryOp op{UnaryKind::GroupBy, q.label, q.labels};
        return unary(op, go(*q.a, in, env));
      }
    }
    throw CompilerBug("unknown NRAe node");
  }

 private:
  int next_ = 0;
};

}  // namespace

E nrae_to_nnrc(const nra::Q& q) {
  FromNra t;
  std::string env = t.fresh("env");
  E body = t.go(*q, kDbVar, env);
  return let(env, cst(Data::record({})), body);
}

E nrae_to_nnrc_open(const nra::Q& q, const std::string& in_var, const std::string& env_var) {
  FromNra t;
  return t.go(*q, in_var, env_var);
}

// ------------------------------------------------------------ stratification

bool is_basic(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::Const: return true;
    case Expr::Kind::Unary: return is_basic(*e.a);
    case Expr::Kind::Binary: return is_basic(*e.a) && is_basic(*e.b);
    default: return false;
  }
}

bool is_stratified(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Let: return is_stratified(*e.a) && is_stratified(*e.b);
    case Expr::Kind::For: return is_basic(*e.a) && is_stratified(*e.b);
    case Expr::Kind::If: return is_basic(*e.a) && is_stratified(*e.b) && is_stratified(*e.c);
    case Expr::Kind::Either: return is_basic(*e.a) && is_stratified(*e.b) && is_stratified(*e.c);
    default: return is_basic(e);
  }
}

namespace {

class Stratifier {
 public:
  explicit Stratifier(const Expr& root) { scan(root); }

  E stmt(const E& e) {
    switch (e->kind) {
      case Expr::Kind::Let: {
        E a = stmt(e->a);
        E b = stmt(e->b);
        if (a == e->a && b == e->b) return e;
        return let(e->x, a, b);
      }
      case Expr::Kind::For: {
        std::vector<std::pair<std::string, E>> hoisted;
        E src = basic(e->a, hoisted);
        E body = stmt(e->b);
        E out = (src == e->a && body == e->b) ? e : for_(e->x, src, body);
        return wrap(hoisted, out);
      }
      case Expr::Kind::If: {
        std::vector<std::pair<std::string, E>> hoisted;
        E c = basic(e->a, hoisted);
        E t = stmt(e->b);
        E f = stmt(e->c);
        E out = (c == e->a && t == e->b && f == e->c) ? e : if_(c, t, f);
        return wrap(hoisted, out);
      }
      case Expr::Kind::Either: {
        std::vector<std::pair<std::string, E>> hoisted;
        E s = basic(e->a, hoisted);
        E l = stmt(e->b);
        E r = stmt(e->c);
        E out = (s == e->a && l == e->b && r == e->c) ? e : either(s, e->x, l, e->y, r);
        return wrap(hoisted, out);
      }
      default: {
        std::vector<std::pair<std::string, E>> hoisted;
        E b = basic(e, hoisted);
        return wrap(hoisted, b);
      }
    }
  }

 private:
  E basic(const E& e, std::vector<std::pair<std::string, E>>& hoisted) {
    switch (e->kind) {
      case Expr::Kind::Var:
      case Expr::Kind::Const: return e;
      case Expr::Kind::Unary: {
        E a = basic(e->a, hoisted);
        return a == e->a ? e : unary(e->uop, a);
      }
      case Expr::Kind::Binary: {
        E a = basic(e->a, hoisted);
        E b = basic(e->b, hoisted);
        return (a == e->a && b == e->b) ? e : binary(e->bop, a, b);
      }
      default: {
        std::string t = "t$" + std::to_string(next_++);
        hoisted.emplace_back(t, stmt(e));
        return var(t);
      }
    }
  }

  static E wrap(const std::vector<std::pair<std::string, E>>& hoisted, E body) {
    for (auto it = hoisted.rbegin(); it != hoisted.rend(); ++it)
      body = let(it->first, it->second, body);
    return body;
  }

  // Temporaries start past any t$k already present.
  void scan(const Expr& e) {
    for (const std::string* n : {&e.x, &e.y}) {
      if (n->rfind("t$", 0) != 0) continue;
      try {
        next_ = std::max(next_, std::stoi(n->substr(2)) + 1);
      } catch (const std::exception&) {
      }
    }
    for (const E& s : {e.a, e.b, e.c})
      if (s) scan(*s);
  }

  int next_ = 0;
};

}  // namespace

E stratify(const E& e) {
  Stratifier s(*e);
  return s.stmt(e);
}

}  // namespace dbx::nnrc

// SPDX-License-Identifier: MIT
#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

#include "dbx/lowering.hpp"

namespace dbx::nnrs {

namespace {

S make(Stmt s) { return std::make_shared<const Stmt>(std::move(s)); }

Stmt node(Stmt::Kind k) {
  Stmt s{};
  s.kind = k;
  return s;
}

S binder(Stmt::Kind k, std::string x, nnrc::E e, S a, S b) {
  Stmt s = node(k);
  s.x = std::move(x);
  s.e = std::move(e);
  s.a = std::move(a);
  s.b = std::move(b);
  return make(std::move(s));
}

}  // namespace

S seq(S a, S b) { return binder(Stmt::Kind::Seq, "", nullptr, std::move(a), std::move(b)); }
S let(std::string x, nnrc::E e, S body) {
  return binder(Stmt::Kind::Let, std::move(x), std::move(e), std::move(body), nullptr);
}
S let_mut(std::string x, S w, S r) {
  return binder(Stmt::Kind::LetMut, std::move(x), nullptr, std::move(w), std::move(r));
}
S let_mut_coll(std::string x, S w, S r) {
  return binder(Stmt::Kind::LetMutColl, std::move(x), nullptr, std::move(w), std::move(r));
}
S assign(std::string x, nnrc::E e) {
  return binder(Stmt::Kind::Assign, std::move(x), std::move(e), nullptr, nullptr);
}
S push(std::string x, nnrc::E e) {
  return binder(Stmt::Kind::Push, std::move(x), std::move(e), nullptr, nullptr);
}
S for_(std::string x, nnrc::E e, S body) {
  return binder(Stmt::Kind::For, std::move(x), std::move(e), std::move(body), nullptr);
}
S if_(nnrc::E e, S a, S b) {
  return binder(Stmt::Kind::If, "", std::move(e), std::move(a), std::move(b));
}
S either(nnrc::E e, std::string x, S a, std::string y, S b) {
  Stmt s = node(Stmt::Kind::Either);
  s.e = std::move(e);
  s.x = std::move(x);
  s.a = std::move(a);
  s.y = std::move(y);
  s.b = std::move(b);
  return make(std::move(s));
}

bool equal(const Stmt& a, const Stmt& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.x != b.x || a.y != b.y) return false;
  if (!a.e != !b.e || (a.e && !nnrc::equal(*a.e, *b.e))) return false;
  auto sub = [](const S& p, const S& q) {
    if (!p || !q) return !p && !q;
    return equal(*p, *q);
  };
  return sub(a.a, b.a) && sub(a.b, b.b);
}

// ----------------------------------------------------------------- printing

namespace {

void print_to(std::ostream& os, const Stmt& s, int depth);

void block(std::ostream& os, const Stmt& s, int depth) {
  os << "{\n";
  print_to(os, s, depth + 1);
  os << std::string(2 * depth, ' ') << "}";
}

void print_to(std::ostream& os, const Stmt& s, int depth) {
  std::string pad(2 * depth, ' ');
  switch (s.kind) {
    case Stmt::Kind::Seq:
      if (s.a->kind == Stmt::Kind::Let || s.a->kind == Stmt::Kind::LetMut ||
          s.a->kind == Stmt::Kind::LetMutColl) {
        os << pad;
        block(os, *s.a, depth);
        os << "\n";
      } else {
        print_to(os, *s.a, depth);
      }
      print_to(os, *s.b, depth);
      return;
    case Stmt::Kind::Let:
      os << pad << "let " << s.x << " = " << nnrc::print(*s.e) << ";\n";
      print_to(os, *s.a, depth);
      return;
    case Stmt::Kind::LetMut:
    case Stmt::Kind::LetMutColl:
      os << pad << (s.kind == Stmt::Kind::LetMut ? "letMut " : "letMutColl ") << s.x << " from ";
      block(os, *s.a, depth);
      os << ";\n";
      print_to(os, *s.b, depth);
      return;
    case Stmt::Kind::Assign:
      os << pad << s.x << " := " << nnrc::print(*s.e) << ";\n";
      return;
    case Stmt::Kind::Push:
      os << pad << "push(" << s.x << ", " << nnrc::print(*s.e) << ");\n";
      return;
    case Stmt::Kind::For:
      os << pad << "for (" << s.x << " in " << nnrc::print(*s.e) << ") ";
      block(os, *s.a, depth);
      os << "\n";
      return;
    case Stmt::Kind::If:
      os << pad << "if (" << nnrc::print(*s.e) << ") ";
      block(os, *s.a, depth);
      os << " else ";
      block(os, *s.b, depth);
      os << "\n";
      return;
    case Stmt::Kind::Either:
      os << pad << "match " << nnrc::print(*s.e) << " with left(" << s.x << ") => ";
      block(os, *s.a, depth);
      os << " | right(" << s.y << ") => ";
      block(os, *s.b, depth);
      os << "\n";
      return;
  }
}

}  // namespace

std::string print(const Program& p) {
  std::ostringstream os;
  os << "fun(" << p.input << ") {\n";
  print_to(os, *p.body, 1);
  os << "  return " << p.ret << ";\n}\n";
  return os.str();
}

// ------------------------------------------------------------------- to NNRS

namespace {

struct Dest {
  bool push;
  std::string x;
};

S deliver(const Dest& d, nnrc::E e) { return d.push ? push(d.x, std::move(e)) : assign(d.x, std::move(e)); }

class ToNnrs {
 public:
  S term(const nnrc::E& e, const Dest& d) {
    using K = nnrc::Expr::Kind;
    switch (e->kind) {
      case K::Let: {
        if (nnrc::is_basic(*e->a)) return let(e->x, e->a, term(e->b, d));
        if (e->a->kind == K::For) {
          const nnrc::Expr& f = *e->a;
          return let_mut_coll(e->x, for_(f.x, f.a, term(f.b, Dest{true, e->x})), term(e->b, d));
        }
        return let_mut(e->x, term(e->a, Dest{false, e->x}), term(e->b, d));
      }
      case K::For: {
        std::string t = "coll$" + std::to_string(next_++);
        return let_mut_coll(t, for_(e->x, e->a, term(e->b, Dest{true, t})),
                            deliver(d, nnrc::var(t)));
      }
      case K::If: return if_(e->a, term(e->b, d), term(e->c, d));
      case K::Either: return either(e->a, e->x, term(e->b, d), e->y, term(e->c, d));
      default:
        if (!nnrc::is_basic(*e)) throw CompilerBug("unstratified input: " + nnrc::print(*e));
        return deliver(d, e);
    }
  }

 private:
  int next_ = 0;
};

}  // namespace

Program nnrc_to_nnrs(const nnrc::E& e, const std::string& input) {
  if (!nnrc::is_stratified(*e)) throw CompilerBug("nnrc_to_nnrs expects stratified input");
  Program p;
  p.input = input;
  p.body = ToNnrs().term(e, Dest{false, p.ret});
  return p;
}

// ---------------------------------------------------------------- validation

namespace {

enum class Ns { Imm, Data, Coll };

struct Scopes {
  std::vector<std::string> ns[3];

  bool has(Ns n, const std::string& x) const {
    auto& v = ns[int(n)];
    return std::find(v.begin(), v.end(), x) != v.end();
  }
  bool has_other(Ns n, const std::string& x) const {
    for (int k = 0; k < 3; ++k)
      if (k != int(n) && has(Ns(k), x)) return true;
    return false;
  }
  void push(Ns n, std::string x) { ns[int(n)].push_back(std::move(x)); }
  void pop(Ns n) { ns[int(n)].pop_back(); }
};

class Checker {
 public:
  std::string error;
  bool cross_free = true;

  void stmt(const Stmt& s, Scopes& sc) {
    if (!error.empty()) return;
    switch (s.kind) {
      case Stmt::Kind::Seq:
        stmt(*s.a, sc);
        stmt(*s.b, sc);
        return;
      case Stmt::Kind::Let:
        expr(*s.e, sc);
        bind(Ns::Imm, s.x, sc, *s.a);
        return;
      case Stmt::Kind::LetMut:
      case Stmt::Kind::LetMutColl: {
        Ns n = s.kind == Stmt::Kind::LetMut ? Ns::Data : Ns::Coll;
        bind(n, s.x, sc, *s.a);
        bind(Ns::Imm, s.x, sc, *s.b);
        return;
      }
      case Stmt::Kind::Assign:
      case Stmt::Kind::Push: {
        Ns n = s.kind == Stmt::Kind::Assign ? Ns::Data : Ns::Coll;
        if (!sc.has(n, s.x))
          fail(std::string(n == Ns::Data ? "assignment" : "push") + " to " + s.x +
               " outside its write phase");
        expr(*s.e, sc);
        return;
      }
      case Stmt::Kind::For:
        expr(*s.e, sc);
        bind(Ns::Imm, s.x, sc, *s.a);
        return;
      case Stmt::Kind::If:
        expr(*s.e, sc);
        stmt(*s.a, sc);
        stmt(*s.b, sc);
        return;
      case Stmt::Kind::Either:
        expr(*s.e, sc);
        bind(Ns::Imm, s.x, sc, *s.a);
        bind(Ns::Imm, s.y, sc, *s.b);
        return;
    }
  }

 private:
  void bind(Ns n, const std::string& x, Scopes& sc, const Stmt& body) {
    if (sc.has_other(n, x)) cross_free = false;
    sc.push(n, x);
    stmt(body, sc);
    sc.pop(n);
  }

  void expr(const nnrc::Expr& e, const Scopes& sc) {
    if (!nnrc::is_basic(e)) return fail("complex expression " + nnrc::print(e));
    for (auto& v : nnrc::free_vars(e))
      if (!sc.has(Ns::Imm, v)) return fail("read of " + v + " outside the immutable scope");
  }

  void fail(const std::string& m) {
    if (error.empty()) error = m;
  }
};

Checker check(const Program& p) {
  Checker c;
  Scopes sc;
  sc.push(Ns::Imm, p.input);
  sc.push(Ns::Data, p.ret);
  if (p.input == p.ret) c.cross_free = false;
  c.stmt(*p.body, sc);
  return c;
}

}  // namespace

std::string validate(const Program& p) { return check(p).error; }

bool is_cross_shadow_free(const Program& p) { return check(p).cross_free; }

// ----------------------------------------------------------------- renaming

namespace {

void collect_names(const Stmt& s, std::set<std::string>& out) {
  if (!s.x.empty()) out.insert(s.x);
  if (!s.y.empty()) out.insert(s.y);
  if (s.e)
    for (auto& v : nnrc::free_vars(*s.e)) out.insert(v);
  if (s.a) collect_names(*s.a, out);
  if (s.b) collect_names(*s.b, out);
}

class Uncross {
 public:
  explicit Uncross(std::set<std::string> used) : used_(std::move(used)) {}

  // Scopes hold renamed names; maps hold original -> renamed per namespace.
  Scopes sc;
  std::vector<std::pair<std::string, std::string>> map[3];

  S stmt(const S& s) {
    switch (s->kind) {
      case Stmt::Kind::Seq: return rebuild(s, s->x, s->y, s->e, stmt(s->a), stmt(s->b));
      case Stmt::Kind::Let: {
        nnrc::E e = expr(s->e);
        std::string x = open(Ns::Imm, s->x);
        S body = stmt(s->a);
        close(Ns::Imm);
        return rebuild(s, x, s->y, e, body, nullptr);
      }
      case Stmt::Kind::LetMut:
      case Stmt::Kind::LetMutColl: {
        Ns n = s->kind == Stmt::Kind::LetMut ? Ns::Data : Ns::Coll;
        std::string x = open(n, s->x);
        S w = stmt(s->a);
        close(n);
        enter(Ns::Imm, s->x, x);
        S r = stmt(s->b);
        close(Ns::Imm);
        return rebuild(s, x, s->y, nullptr, w, r);
      }
      case Stmt::Kind::Assign:
      case Stmt::Kind::Push: {
        Ns n = s->kind == Stmt::Kind::Assign ? Ns::Data : Ns::Coll;
        return rebuild(s, lookup(n, s->x), s->y, expr(s->e), nullptr, nullptr);
      }
      case Stmt::Kind::For: {
        nnrc::E e = expr(s->e);
        std::string x = open(Ns::Imm, s->x);
        S body = stmt(s->a);
        close(Ns::Imm);
        return rebuild(s, x, s->y, e, body, nullptr);
      }
      case Stmt::Kind::If: return rebuild(s, s->x, s->y, expr(s->e), stmt(s->a), stmt(s->b));
      case Stmt::Kind::Either: {
        nnrc::E e = expr(s->e);
        std::string x = open(Ns::Imm, s->x);
        S a = stmt(s->a);
        close(Ns::Imm);
        std::string y = open(Ns::Imm, s->y);
        S b = stmt(s->b);
        close(Ns::Imm);
        return rebuild(s, x, y, e, a, b);
      }
    }
    throw CompilerBug("unknown NNRS statement");
  }

  void enter(Ns n, const std::string& orig, const std::string& renamed) {
    map[int(n)].emplace_back(orig, renamed);
    sc.push(n, renamed);
  }

 private:
  std::string open(Ns n, const std::string& orig) {
    std::string x = orig;
    if (sc.has_other(n, x)) {
      for (int k = 0;; ++k) {
        std::string c = orig + "$" + std::to_string(k);
        if (!used_.count(c)) {
          x = c;
          break;
        }
      }
      used_.insert(x);
    }
    enter(n, orig, x);
    return x;
  }

  void close(Ns n) {
    map[int(n)].pop_back();
    sc.pop(n);
  }

  std::string lookup(Ns n, const std::string& orig) const {
    auto& m = map[int(n)];
    for (auto it = m.rbegin(); it != m.rend(); ++it)
      if (it->first == orig) return it->second;
    return orig;
  }

  nnrc::E expr(const nnrc::E& e) {
    return nnrc::rename_basic(e, [&](const std::string& v) { return lookup(Ns::Imm, v); });
  }

  static S rebuild(const S& s, const std::string& x, const std::string& y, const nnrc::E& e,
                   const S& a, const S& b) {
    if (x == s->x && y == s->y && e == s->e && a == s->a && b == s->b) return s;
    Stmt n = *s;
    n.x = x;
    n.y = y;
    n.e = e;
    n.a = a;
    n.b = b;
    return make(std::move(n));
  }

  std::set<std::string> used_;
};

}  // namespace

Program uncross_shadow(const Program& p) {
  std::set<std::string> used{p.input, p.ret};
  collect_names(*p.body, used);
  Uncross u(std::move(used));
  u.enter(Ns::Imm, p.input, p.input);
  u.enter(Ns::Data, p.ret, p.ret);
  Program out = p;
  out.body = u.stmt(p.body);
  return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

class Machine {
 public:
  std::vector<std::pair<std::string, Data>> imm;
  std::vector<std::pair<std::string, std::optional<Data>>> data;
  std::vector<std::pair<std::string, DataBag>> coll;

  void run(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Seq:
        run(*s.a);
        run(*s.b);
        return;
      case Stmt::Kind::Let:
        imm.emplace_back(s.x, value(*s.e));
        run(*s.a);
        imm.pop_back();
        return;
      case Stmt::Kind::LetMut: {
        data.emplace_back(s.x, std::nullopt);
        run(*s.a);
        std::optional<Data> v = std::move(data.back().second);
        data.pop_back();
        if (!v) throw EvalError("mutable variable " + s.x + " was never assigned");
        imm.emplace_back(s.x, std::move(*v));
        run(*s.b);
        imm.pop_back();
        return;
      }
      case Stmt::Kind::LetMutColl: {
        coll.emplace_back(s.x, DataBag());
        run(*s.a);
        DataBag b = std::move(coll.back().second);
        coll.pop_back();
        imm.emplace_back(s.x, Data::bag(std::move(b)));
        run(*s.b);
        imm.pop_back();
        return;
      }
      case Stmt::Kind::Assign: {
        Data v = value(*s.e);
        for (auto it = data.rbegin(); it != data.rend(); ++it)
          if (it->first == s.x) {
            it->second = std::move(v);
            return;
          }
        throw EvalError("assignment to unknown variable " + s.x);
      }
      case Stmt::Kind::Push: {
        Data v = value(*s.e);
        for (auto it = coll.rbegin(); it != coll.rend(); ++it)
          if (it->first == s.x) {
            it->second = it->second.push(std::move(v));
            return;
          }
        throw EvalError("push to unknown collection " + s.x);
      }
      case Stmt::Kind::For: {
        Data xs = value(*s.e);
        if (!xs.is_bag()) throw EvalError("for over a non-bag");
        for (auto& x : xs.items()) {
          imm.emplace_back(s.x, x);
          run(*s.a);
          imm.pop_back();
        }
        return;
      }
      case Stmt::Kind::If: {
        Data c = value(*s.e);
        if (!c.is_atom() || !c.atom().is_bool()) throw EvalError("if on a non-boolean");
        run(c.atom().as_bool() ? *s.a : *s.b);
        return;
      }
      case Stmt::Kind::Either: {
        Data d = value(*s.e);
        if (!d.is_left() && !d.is_right()) throw EvalError("match on an untagged value");
        imm.emplace_back(d.is_left() ? s.x : s.y, d.payload());
        run(d.is_left() ? *s.a : *s.b);
        imm.pop_back();
        return;
      }
    }
  }

 private:
  Data value(const nnrc::Expr& e) {
    return nnrc::eval_basic(e, [&](const std::string& x) -> const Data& {
      for (auto it = imm.rbegin(); it != imm.rend(); ++it)
        if (it->first == x) return it->second;
      throw EvalError("unbound variable " + x);
    });
  }
};

}  // namespace

Data eval(const Program& p, const Data& input) {
  Machine m;
  m.imm.emplace_back(p.input, input);
  m.data.emplace_back(p.ret, std::nullopt);
  m.run(*p.body);
  if (!m.data.front().second) throw EvalError("the program never assigned " + p.ret);
  return *m.data.front().second;
}

}  // namespace dbx::nnrs

// SPDX-License-Identifier: MIT
#include <algorithm>
#include <optional>
#include <sstream>

#include "dbx/lowering.hpp"

namespace dbx::nnrsimp {

namespace {

S make(Stmt::Kind k, std::string x, nnrc::E e, S a, S b) {
  Stmt s{};
  s.kind = k;
  s.x = std::move(x);
  s.e = std::move(e);
  s.a = std::move(a);
  s.b = std::move(b);
  return std::make_shared<const Stmt>(std::move(s));
}

}  // namespace

S seq(S a, S b) { return make(Stmt::Kind::Seq, "", nullptr, std::move(a), std::move(b)); }
S let(std::string x, nnrc::E init, S body) {
  return make(Stmt::Kind::Let, std::move(x), std::move(init), std::move(body), nullptr);
}
S assign(std::string x, nnrc::E e) {
  return make(Stmt::Kind::Assign, std::move(x), std::move(e), nullptr, nullptr);
}
S for_(std::string x, nnrc::E e, S body) {
  return make(Stmt::Kind::For, std::move(x), std::move(e), std::move(body), nullptr);
}
S if_(nnrc::E e, S a, S b) {
  return make(Stmt::Kind::If, "", std::move(e), std::move(a), std::move(b));
}
S either(nnrc::E e, std::string x, S a, std::string y, S b) {
  Stmt s{};
  s.kind = Stmt::Kind::Either;
  s.e = std::move(e);
  s.x = std::move(x);
  s.a = std::move(a);
  s.y = std::move(y);
  s.b = std::move(b);
  return std::make_shared<const Stmt>(std::move(s));
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
      if (s.a->kind == Stmt::Kind::Let) {
        os << pad;
        block(os, *s.a, depth);
        os << "\n";
      } else {
        print_to(os, *s.a, depth);
      }
      print_to(os, *s.b, depth);
      return;
    case Stmt::Kind::Let:
      os << pad << "var " << s.x;
      if (s.e) os << " = " << nnrc::print(*s.e);
      os << ";\n";
      print_to(os, *s.a, depth);
      return;
    case Stmt::Kind::Assign:
      os << pad << s.x << " := " << nnrc::print(*s.e) << ";\n";
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
  os << "fun(" << p.input << ") {\n  var " << p.ret << ";\n";
  print_to(os, *p.body, 1);
  os << "  return " << p.ret << ";\n}\n";
  return os.str();
}

// ---------------------------------------------------------------- validation

namespace {

class Checker {
 public:
  std::vector<std::string> scope;
  std::string error;

  void stmt(const Stmt& s) {
    if (!error.empty()) return;
    switch (s.kind) {
      case Stmt::Kind::Seq:
        stmt(*s.a);
        stmt(*s.b);
        return;
      case Stmt::Kind::Let:
        if (s.e) expr(*s.e);
        within(s.x, *s.a);
        return;
      case Stmt::Kind::Assign:
        if (!declared(s.x)) fail("assignment to undeclared " + s.x);
        expr(*s.e);
        return;
      case Stmt::Kind::For:
        expr(*s.e);
        within(s.x, *s.a);
        return;
      case Stmt::Kind::If:
        expr(*s.e);
        stmt(*s.a);
        stmt(*s.b);
        return;
      case Stmt::Kind::Either:
        expr(*s.e);
        within(s.x, *s.a);
        within(s.y, *s.b);
        return;
    }
  }

 private:
  bool declared(const std::string& x) const {
    return std::find(scope.begin(), scope.end(), x) != scope.end();
  }
  void within(const std::string& x, const Stmt& body) {
    scope.push_back(x);
    stmt(body);
    scope.pop_back();
  }
  void expr(const nnrc::Expr& e) {
    if (!nnrc::is_basic(e)) return fail("complex expression " + nnrc::print(e));
    for (auto& v : nnrc::free_vars(e))
      if (!declared(v)) return fail("read of undeclared " + v);
  }
  void fail(const std::string& m) {
    if (error.empty()) error = m;
  }
};

}  // namespace

std::string validate(const Program& p) {
  Checker c;
  c.scope = {p.input, p.ret};
  c.stmt(*p.body);
  return c.error;
}

// ------------------------------------------------------------ from NNRS

namespace {

S convert(const nnrs::Stmt& s) {
  using K = nnrs::Stmt::Kind;
  switch (s.kind) {
    case K::Seq: return seq(convert(*s.a), convert(*s.b));
    case K::Let: return let(s.x, s.e, convert(*s.a));
    case K::LetMut: return let(s.x, nullptr, seq(convert(*s.a), convert(*s.b)));
    case K::LetMutColl:
      return let(s.x, nnrc::cst(Data::bag(std::vector<Data>{})), seq(convert(*s.a), convert(*s.b)));
    case K::Assign: return assign(s.x, s.e);
    case K::Push:
      return assign(s.x, nnrc::binary(BinaryKind::Union, nnrc::var(s.x),
                                      nnrc::unary(uop(UnaryKind::Bag), s.e)));
    case K::For: return for_(s.x, s.e, convert(*s.a));
    case K::If: return if_(s.e, convert(*s.a), convert(*s.b));
    case K::Either: return either(s.e, s.x, convert(*s.a), s.y, convert(*s.b));
  }
  throw CompilerBug("unknown NNRS statement");
}

}  // namespace

Program nnrs_to_nnrsimp(const nnrs::Program& p) {
  if (!nnrs::is_cross_shadow_free(p)) throw CompilerBug("nnrs_to_nnrsimp expects cross-shadow-free input");
  Program out;
  out.input = p.input;
  out.ret = p.ret;
  out.body = convert(*p.body);
  return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

class Machine {
 public:
  std::vector<std::pair<std::string, std::optional<Data>>> vars;

  void run(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Seq:
        run(*s.a);
        run(*s.b);
        return;
      case Stmt::Kind::Let: {
        std::optional<Data> init;
        if (s.e) init = value(*s.e);
        scoped(s.x, std::move(init), *s.a);
        return;
      }
      case Stmt::Kind::Assign: {
        Data v = value(*s.e);
        for (auto it = vars.rbegin(); it != vars.rend(); ++it)
          if (it->first == s.x) {
            it->second = std::move(v);
            return;
          }
        throw EvalError("assignment to undeclared " + s.x);
      }
      case Stmt::Kind::For: {
        Data xs = value(*s.e);
        if (!xs.is_bag()) throw EvalError("for over a non-bag");
        for (auto& x : xs.items()) scoped(s.x, x, *s.a);
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
        if (d.is_left()) return scoped(s.x, d.payload(), *s.a);
        if (d.is_right()) return scoped(s.y, d.payload(), *s.b);
        throw EvalError("match on an untagged value");
      }
    }
  }

 private:
  void scoped(const std::string& x, std::optional<Data> v, const Stmt& body) {
    vars.emplace_back(x, std::move(v));
    run(body);
    vars.pop_back();
  }

  Data value(const nnrc::Expr& e) {
    return nnrc::eval_basic(e, [&](const std::string& x) -> const Data& {
      for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        if (it->first == x) {
          if (!it->second) throw EvalError("read of unassigned " + x);
          return *it->second;
        }
      throw EvalError("unbound variable " + x);
    });
  }
};

}  // namespace

Data eval(const Program& p, const Data& input) {
  Machine m;
  m.vars.emplace_back(p.input, input);
  m.vars.emplace_back(p.ret, std::nullopt);
  m.run(*p.body);
  if (!m.vars[1].second) throw EvalError("the program never assigned " + p.ret);
  return *m.vars[1].second;
}

}  // namespace dbx::nnrsimp

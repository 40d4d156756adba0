// SPDX-License-Identifier: MIT
#include "dbx/imp.hpp"

#include <map>
#include <set>
#include <sstream>

namespace dbx::imp {

// ------------------------------------------------------------- Data model

namespace {

using DK = Expr<Data>::Kind;
using DE = ExprP<Data>;
using DS = StmtP<Data>;

bool data_bool(const Data& d) {
  if (!d.is_atom() || !d.atom().is_bool()) throw ImpError("boolean expected, got " + to_string(d));
  return d.atom().as_bool();
}

Data data_op(const Expr<Data>& call, const std::vector<Data>& args) {
  UnaryKind u;
  BinaryKind b;
  if (args.size() == 1 && unary_from_name(call.name, u))
    return apply_unary(UnaryOp{u, call.label, call.labels}, args[0]);
  if (args.size() == 2 && binary_from_name(call.name, b)) return apply_binary(b, args[0], args[1]);
  throw ImpError("unknown operator " + call.name + "/" + std::to_string(args.size()));
}

Data data_runtime(const Expr<Data>& call, const std::vector<Data>& args) {
  const std::string& n = call.name;
  if (args.size() == 1) {
    const Data& d = args[0];
    if (n == "either") {
      if (d.is_left()) return Data::atom(true);
      if (d.is_right()) return Data::atom(false);
      throw ImpError("either of an untagged value " + to_string(d));
    }
    if (n == "getLeft") {
      if (!d.is_left()) throw ImpError("getLeft of " + to_string(d));
      return d.payload();
    }
    if (n == "getRight") {
      if (!d.is_right()) throw ImpError("getRight of " + to_string(d));
      return d.payload();
    }
    if (n == "group_by") return group_by_builtin(call.label, call.labels, d);
  }
  throw ImpError("unknown runtime function " + n + "/" + std::to_string(args.size()));
}

}  // namespace

const Instantiation<Data>& data_instantiation() {
  static const Instantiation<Data> inst{
      data_op,
      data_runtime,
      data_bool,
      [](const Data& d, const std::function<void(const Data&)>& k) {
        if (!d.is_bag()) throw ImpError("for over a non-bag " + to_string(d));
        for (auto& x : d.items()) k(x);
      },
  };
  return inst;
}

// ----------------------------------------------------------- EJson model

namespace {

struct EJsonLess {
  bool operator()(const EJson& a, const EJson& b) const { return ejson_compare(a, b) < 0; }
};

EJson scalar_out(Value v) {
  if (v.is_null()) throw ImpError("operator produced a null scalar");
  return EJson::from_scalar(v);
}

std::vector<Value> scalars_of(const EJson& a) {
  std::vector<Value> out;
  out.reserve(a.elements().size());
  for (auto& x : a.elements()) out.push_back(x.scalar());
  return out;
}

EJson tagged(const char* key, EJson v) { return EJson::object({{key, std::move(v)}}); }

const EJson* tag(const EJson& a, const char* key) {
  if (!a.is_object() || a.members().size() != 1 || a.members()[0].first != key) return nullptr;
  return &a.members()[0].second;
}

EJson project(const EJson& a, const std::vector<std::string>& labels) {
  EMembers ms;
  for (auto& l : labels) ms.emplace_back(l, a.get(l));
  return EJson::object(std::move(ms));
}

EJson multiset(bool minus, const EJson& a, const EJson& b) {
  std::map<EJson, std::size_t, EJsonLess> counts;
  for (auto& x : b.elements()) ++counts[x];
  std::vector<EJson> out;
  for (auto& x : a.elements()) {
    auto it = counts.find(x);
    bool present = it != counts.end() && it->second > 0;
    if (present) --it->second;
    if (minus != present) out.push_back(x);
  }
  return EJson::array(std::move(out));
}

EJson group_by(const std::string& g, const std::vector<std::string>& attrs, const EJson& a) {
  std::map<EJson, std::size_t, EJsonLess> index;
  std::vector<EJson> keys;
  std::vector<std::vector<EJson>> groups;
  for (auto& x : a.elements()) {
    EJson k = project(x, attrs);
    auto [it, fresh] = index.emplace(k, keys.size());
    if (fresh) {
      keys.push_back(k);
      groups.emplace_back();
    }
    groups[it->second].push_back(x);
  }
  std::vector<EJson> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    EMembers ms = keys[i].members();
    ms.emplace_back(g, EJson::array(std::move(groups[i])));
    out.push_back(EJson::object(std::move(ms)));
  }
  return EJson::array(std::move(out));
}

int cmp(const EJson& a, const EJson& b) { return compare_values(a.scalar(), b.scalar()); }

using Fn1 = EJson (*)(const std::string&, const std::vector<std::string>&, const EJson&);
using Fn2 = EJson (*)(const EJson&, const EJson&);

const std::vector<std::pair<std::string, Fn1>>& unary_table() {
  using L = const std::vector<std::string>&;
  using S = const std::string&;
  static const std::vector<std::pair<std::string, Fn1>> t = {
      {"not", [](S, L, const EJson& a) { return EJson::boolean(!a.as_bool()); }},
      {"neg", [](S, L, const EJson& a) { return scalar_out(negate(a.scalar())); }},
      {"dot", [](S l, L, const EJson& a) { return a.get(l); }},
      {"rec", [](S l, L, const EJson& a) { return EJson::object({{l, a}}); }},
      {"bag", [](S, L, const EJson& a) { return EJson::array(EArray().push(a)); }},
      {"distinct",
       [](S, L, const EJson& a) {
         std::set<EJson, EJsonLess> seen;
         std::vector<EJson> out;
         for (auto& x : a.elements())
           if (seen.insert(x).second) out.push_back(x);
         return EJson::array(std::move(out));
       }},
      {"project", [](S, L ls, const EJson& a) { return project(a, ls); }},
      {"count",
       [](S, L, const EJson& a) {
         return EJson::bigint(BigInt(static_cast<unsigned long>(a.elements().size())));
       }},
      {"sum",
       [](S, L, const EJson& a) {
         auto xs = scalars_of(a);
         return scalar_out(sum_values(xs.data(), xs.data() + xs.size()));
       }},
      {"min",
       [](S, L, const EJson& a) {
         auto xs = scalars_of(a);
         return scalar_out(min_values(xs.data(), xs.data() + xs.size()));
       }},
      {"max",
       [](S, L, const EJson& a) {
         auto xs = scalars_of(a);
         return scalar_out(max_values(xs.data(), xs.data() + xs.size()));
       }},
      {"avg",
       [](S, L, const EJson& a) {
         auto xs = scalars_of(a);
         return scalar_out(avg_values(xs.data(), xs.data() + xs.size()));
       }},
      {"flatten",
       [](S, L, const EJson& a) {
         EArray out;
         for (auto& x : a.elements()) out = out.append(x.elements());
         return EJson::array(out);
       }},
      {"left", [](S, L, const EJson& a) { return tagged(kLeftKey, a); }},
      {"right", [](S, L, const EJson& a) { return tagged(kRightKey, a); }},
      {"single",
       [](S, L, const EJson& a) {
         if (a.elements().size() == 1) return tagged(kLeftKey, a.elements().front());
         return tagged(kRightKey, EJson::null());
       }},
      {"first",
       [](S, L, const EJson& a) {
         if (a.elements().empty()) throw ImpError("first element of an empty array");
         return a.elements().front();
       }},
      {"group_by", [](S g, L ls, const EJson& a) { return group_by(g, ls, a); }},
  };
  return t;
}

const std::vector<std::pair<std::string, Fn2>>& binary_table() {
  using J = const EJson&;
  static const std::vector<std::pair<std::string, Fn2>> t = {
      {"equal", [](J a, J b) { return EJson::boolean(a == b); }},
      {"eq", [](J a, J b) { return EJson::boolean(cmp(a, b) == 0); }},
      {"ne", [](J a, J b) { return EJson::boolean(cmp(a, b) != 0); }},
      {"lt", [](J a, J b) { return EJson::boolean(cmp(a, b) < 0); }},
      {"le", [](J a, J b) { return EJson::boolean(cmp(a, b) <= 0); }},
      {"gt", [](J a, J b) { return EJson::boolean(cmp(a, b) > 0); }},
      {"ge", [](J a, J b) { return EJson::boolean(cmp(a, b) >= 0); }},
      {"add", [](J a, J b) { return scalar_out(arith(ArithOp::Add, a.scalar(), b.scalar())); }},
      {"sub", [](J a, J b) { return scalar_out(arith(ArithOp::Sub, a.scalar(), b.scalar())); }},
      {"mul", [](J a, J b) { return scalar_out(arith(ArithOp::Mul, a.scalar(), b.scalar())); }},
      {"div",
       [](J a, J b) {
         Value q = arith(ArithOp::Div, a.scalar(), b.scalar());
         if (q.is_null()) return tagged(kRightKey, EJson::null());
         return tagged(kLeftKey, EJson::from_scalar(q));
       }},
      {"strConcat", [](J a, J b) { return scalar_out(concat_text(a.scalar(), b.scalar())); }},
      {"union", [](J a, J b) { return EJson::array(a.elements().append(b.elements())); }},
      {"minus", [](J a, J b) { return multiset(true, a, b); }},
      {"intersect", [](J a, J b) { return multiset(false, a, b); }},
      {"recordConcat",
       [](J a, J b) {
         EMembers ms = b.members();
         for (auto& m : a.members())
           if (!b.find(m.first)) ms.push_back(m);
         return EJson::object(std::move(ms));
       }},
      {"contains",
       [](J a, J b) {
         for (auto& x : b.elements())
           if (x == a) return EJson::boolean(true);
         return EJson::boolean(false);
       }},
      {"and", [](J a, J b) { return EJson::boolean(a.as_bool() && b.as_bool()); }},
      {"or", [](J a, J b) { return EJson::boolean(a.as_bool() || b.as_bool()); }},
  };
  return t;
}

EJson ejson_runtime(const std::string& n, const std::string& label,
                    const std::vector<std::string>& labels, const std::vector<EJson>& args,
                    bool& found) {
  found = true;
  if (n == "array" && args.empty()) return EJson::array(EArray());
  if (n == "push" && args.size() == 2) return EJson::array(args[0].elements().push(args[1]));
  if (args.size() == 1) {
    const EJson& a = args[0];
    if (n == "either") {
      if (tag(a, kLeftKey)) return EJson::boolean(true);
      if (tag(a, kRightKey)) return EJson::boolean(false);
      throw ImpError("either of an untagged value " + print_ejson(a));
    }
    if (n == "getLeft") {
      if (auto* p = tag(a, kLeftKey)) return *p;
      throw ImpError("getLeft of " + print_ejson(a));
    }
    if (n == "getRight") {
      if (auto* p = tag(a, kRightKey)) return *p;
      throw ImpError("getRight of " + print_ejson(a));
    }
    if (n == "group_by") return group_by(label, labels, a);
  }
  found = false;
  return EJson();
}

}  // namespace

EJson ejson_call(const std::string& name, const std::string& label,
                 const std::vector<std::string>& labels, const std::vector<EJson>& args) {
  if (args.size() == 1)
    for (auto& [n, f] : unary_table())
      if (n == name) return f(label, labels, args[0]);
  if (args.size() == 2)
    for (auto& [n, f] : binary_table())
      if (n == name) return f(args[0], args[1]);
  bool found = false;
  EJson r = ejson_runtime(name, label, labels, args, found);
  if (!found) throw ImpError("unknown function " + name + "/" + std::to_string(args.size()));
  return r;
}

std::vector<std::string> ejson_operator_names() {
  std::vector<std::string> out;
  for (auto& [n, f] : unary_table()) out.push_back(n);
  for (auto& [n, f] : binary_table()) out.push_back(n);
  return out;
}

std::vector<std::string> ejson_runtime_names() {
  return {"either", "getLeft", "getRight", "group_by", "push", "array"};
}

const Instantiation<EJson>& ejson_instantiation() {
  static const Instantiation<EJson> inst{
      [](const Expr<EJson>& c, const std::vector<EJson>& args) {
        return ejson_call(c.name, c.label, c.labels, args);
      },
      [](const Expr<EJson>& c, const std::vector<EJson>& args) {
        bool found = false;
        EJson r = ejson_runtime(c.name, c.label, c.labels, args, found);
        if (!found) throw ImpError("unknown runtime function " + c.name);
        return r;
      },
      [](const EJson& d) {
        if (!d.is_bool()) throw ImpError("boolean expected, got " + print_ejson(d));
        return d.as_bool();
      },
      [](const EJson& d, const std::function<void(const EJson&)>& k) {
        for (auto& x : d.elements()) k(x);
      },
  };
  return inst;
}

// ------------------------------------------------------------ from NNRSimp

namespace {

class FromNnrsimp {
 public:
  DE expr(const nnrc::Expr& e) {
    using K = nnrc::Expr::Kind;
    switch (e.kind) {
      case K::Var: return e_var<Data>(e.x);
      case K::Const: return e_const(e.value);
      case K::Unary:
        if (e.uop.kind == UnaryKind::GroupBy)
          return e_call<Data>(DK::Runtime, "group_by", {expr(*e.a)}, e.uop.label, e.uop.labels);
        return e_call<Data>(DK::Op, unary_name(e.uop.kind), {expr(*e.a)}, e.uop.label,
                            e.uop.labels);
      case K::Binary:
        return e_call<Data>(DK::Op, binary_name(e.bop), {expr(*e.a), expr(*e.b)});
      default: throw CompilerBug("non-basic expression in NNRSimp: " + nnrc::print(e));
    }
  }

  void stmts(const nnrsimp::Stmt& s, std::vector<DS>& out) {
    using K = nnrsimp::Stmt::Kind;
    switch (s.kind) {
      case K::Seq:
        stmts(*s.a, out);
        stmts(*s.b, out);
        return;
      case K::Let:
        out.push_back(s_block<Data>({{s.x, s.e ? expr(*s.e) : nullptr}}, body(*s.a)));
        return;
      case K::Assign: out.push_back(s_assign(s.x, expr(*s.e))); return;
      case K::For: out.push_back(s_for(s.x, expr(*s.e), block(*s.a))); return;
      case K::If: out.push_back(s_if(expr(*s.e), block(*s.a), block(*s.b))); return;
      case K::Either: {
        DE scrutinee = expr(*s.e);
        std::string v;
        std::vector<std::pair<std::string, DE>> decls;
        if (scrutinee->kind == DK::Var) {
          v = scrutinee->name;
        } else {
          v = "m$" + std::to_string(next_++);
          decls.emplace_back(v, scrutinee);
        }
        auto branch = [&](const char* get, const std::string& x, const nnrsimp::Stmt& b) {
          return s_block<Data>({{x, e_call<Data>(DK::Runtime, get, {e_var<Data>(v)})}}, body(b));
        };
        DS test = s_if(e_call<Data>(DK::Runtime, "either", {e_var<Data>(v)}),
                       branch("getLeft", s.x, *s.a), branch("getRight", s.y, *s.b));
        if (decls.empty())
          out.push_back(test);
        else
          out.push_back(s_block<Data>(std::move(decls), {test}));
        return;
      }
    }
    throw CompilerBug("unknown NNRSimp statement");
  }

  std::vector<DS> body(const nnrsimp::Stmt& s) {
    std::vector<DS> out;
    stmts(s, out);
    return out;
  }

  DS block(const nnrsimp::Stmt& s) { return s_block<Data>({}, body(s)); }

 private:
  int next_ = 0;
};

}  // namespace

DataFunction nnrsimp_to_imp_data(const nnrsimp::Program& p) {
  FromNnrsimp t;
  DataFunction f;
  f.param = p.input;
  f.ret = p.ret;
  f.body = t.block(*p.body);
  return f;
}

// -------------------------------------------------------------- to EJson

namespace {

using EK = Expr<EJson>::Kind;
using EE = ExprP<EJson>;
using ES = StmtP<EJson>;

EE to_ejson(const Expr<Data>& e) {
  switch (e.kind) {
    case DK::Const:
      if (e.value.is_bag() && e.value.items().empty())
        return e_call<EJson>(EK::Runtime, "array", {});
      return e_const(data_to_ejson(e.value));
    case DK::Var: return e_var<EJson>(e.name);
    case DK::Op:
    case DK::Runtime: {
      if (e.kind == DK::Op && e.name == "union" && e.args[1]->kind == DK::Op &&
          e.args[1]->name == "bag")
        return e_call<EJson>(EK::Runtime, "push",
                             {to_ejson(*e.args[0]), to_ejson(*e.args[1]->args[0])});
      std::vector<EE> args;
      for (auto& a : e.args) args.push_back(to_ejson(*a));
      return e_call<EJson>(e.kind == DK::Op ? EK::Op : EK::Runtime, e.name, std::move(args),
                           e.label, e.labels);
    }
  }
  throw CompilerBug("unknown Imp expression");
}

ES to_ejson(const Stmt<Data>& s) {
  using K = Stmt<Data>::Kind;
  switch (s.kind) {
    case K::Block: {
      std::vector<std::pair<std::string, EE>> decls;
      for (auto& [x, init] : s.decls) decls.emplace_back(x, init ? to_ejson(*init) : nullptr);
      std::vector<ES> body;
      for (auto& t : s.stmts) body.push_back(to_ejson(*t));
      return s_block<EJson>(std::move(decls), std::move(body));
    }
    case K::Assign: return s_assign(s.x, to_ejson(*s.e));
    case K::For: return s_for(s.x, to_ejson(*s.e), to_ejson(*s.a));
    case K::If: return s_if(to_ejson(*s.e), to_ejson(*s.a), to_ejson(*s.b));
  }
  throw CompilerBug("unknown Imp statement");
}

}  // namespace

EJsonFunction imp_data_to_imp_ejson(const DataFunction& f) {
  EJsonFunction g;
  g.param = f.param;
  g.ret = f.ret;
  g.body = to_ejson(*f.body);
  return g;
}

// ---------------------------------------------------------------- printing

namespace {

std::string constant(const Data& d) { return to_string(d); }
std::string constant(const EJson& j) { return print_ejson(j); }

template <class D>
void print_expr(std::ostream& os, const Expr<D>& e) {
  switch (e.kind) {
    case Expr<D>::Kind::Const: os << constant(e.value); return;
    case Expr<D>::Kind::Var: os << e.name; return;
    default: break;
  }
  os << e.name;
  if (!e.label.empty() || !e.labels.empty()) {
    os << "[";
    if (!e.label.empty()) os << e.label << (e.labels.empty() ? "" : "; ");
    for (std::size_t i = 0; i < e.labels.size(); ++i) os << (i ? ", " : "") << e.labels[i];
    os << "]";
  }
  os << "(";
  for (std::size_t i = 0; i < e.args.size(); ++i) {
    if (i) os << ", ";
    print_expr(os, *e.args[i]);
  }
  os << ")";
}

template <class D>
void print_stmt(std::ostream& os, const Stmt<D>& s, int depth);

template <class D>
void print_block_body(std::ostream& os, const Stmt<D>& s, int depth) {
  std::string pad(2 * depth, ' ');
  for (auto& [x, init] : s.decls) {
    os << pad << "var " << x;
    if (init) {
      os << " = ";
      print_expr(os, *init);
    }
    os << ";\n";
  }
  for (auto& t : s.stmts) print_stmt(os, *t, depth);
}

template <class D>
void print_braced(std::ostream& os, const Stmt<D>& s, int depth) {
  os << "{\n";
  if (s.kind == Stmt<D>::Kind::Block)
    print_block_body(os, s, depth + 1);
  else
    print_stmt(os, s, depth + 1);
  os << std::string(2 * depth, ' ') << "}";
}

template <class D>
void print_stmt(std::ostream& os, const Stmt<D>& s, int depth) {
  std::string pad(2 * depth, ' ');
  switch (s.kind) {
    case Stmt<D>::Kind::Block:
      os << pad;
      print_braced(os, s, depth);
      os << "\n";
      return;
    case Stmt<D>::Kind::Assign:
      os << pad << s.x << " = ";
      print_expr(os, *s.e);
      os << ";\n";
      return;
    case Stmt<D>::Kind::For:
      os << pad << "for (" << s.x << " in ";
      print_expr(os, *s.e);
      os << ") ";
      print_braced(os, *s.a, depth);
      os << "\n";
      return;
    case Stmt<D>::Kind::If:
      os << pad << "if (";
      print_expr(os, *s.e);
      os << ") ";
      print_braced(os, *s.a, depth);
      os << " else ";
      print_braced(os, *s.b, depth);
      os << "\n";
      return;
  }
}

template <class D>
std::string print_function(const Function<D>& f) {
  std::ostringstream os;
  os << "fun(" << f.param << ") {\n  var " << f.ret << ";\n";
  if (f.body->kind == Stmt<D>::Kind::Block)
    print_block_body(os, *f.body, 1);
  else
    print_stmt(os, *f.body, 1);
  os << "  return " << f.ret << ";\n}\n";
  return os.str();
}

}  // namespace

std::string print(const DataFunction& f) { return print_function(f); }
std::string print(const EJsonFunction& f) { return print_function(f); }

}  // namespace dbx::imp

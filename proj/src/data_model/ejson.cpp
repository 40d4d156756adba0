// SPDX-License-Identifier: MIT
#include "dbx/ejson.hpp"

#include <algorithm>
#include <json.hpp>

namespace dbx {

EJson EJson::boolean(bool b) {
  EJson j;
  j.rep_ = b;
  return j;
}

EJson EJson::number(double d) {
  EJson j;
  j.rep_ = d;
  return j;
}

EJson EJson::string(std::string s) {
  EJson j;
  j.rep_ = std::move(s);
  return j;
}

EJson EJson::bigint(BigInt i) {
  EJson j;
  j.rep_ = std::move(i);
  return j;
}

EJson EJson::object(EMembers members) {
  std::sort(members.begin(), members.end(),
            [](const EMember& a, const EMember& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < members.size(); ++i)
    if (members[i].first == members[i - 1].first)
      throw EvalError("duplicate object key " + members[i].first);
  EJson j;
  j.rep_ = std::make_shared<const EMembers>(std::move(members));
  return j;
}

EJson EJson::array(std::vector<EJson> items) { return array(EArray(std::move(items))); }

EJson EJson::array(EArray items) {
  EJson j;
  j.rep_ = std::move(items);
  return j;
}

bool EJson::as_bool() const {
  if (!is_bool()) throw EvalError("boolean expected, got " + print_ejson(*this));
  return std::get<bool>(rep_);
}

double EJson::as_number() const {
  if (!is_number()) throw EvalError("number expected, got " + print_ejson(*this));
  return std::get<double>(rep_);
}

const std::string& EJson::as_string() const {
  if (!is_string()) throw EvalError("string expected, got " + print_ejson(*this));
  return std::get<std::string>(rep_);
}

const BigInt& EJson::as_bigint() const {
  if (!is_bigint()) throw EvalError("bigint expected, got " + print_ejson(*this));
  return std::get<BigInt>(rep_);
}

const EMembers& EJson::members() const {
  if (!is_object()) throw EvalError("object expected, got " + print_ejson(*this));
  return *std::get<std::shared_ptr<const EMembers>>(rep_);
}

const EArray& EJson::elements() const {
  if (!is_array()) throw EvalError("array expected, got " + print_ejson(*this));
  return std::get<EArray>(rep_);
}

const EJson* EJson::find(const std::string& key) const {
  const EMembers& ms = members();
  auto it = std::lower_bound(
      ms.begin(), ms.end(), key,
      [](const EMember& m, const std::string& k) { return m.first < k; });
  if (it == ms.end() || it->first != key) return nullptr;
  return &it->second;
}

const EJson& EJson::get(const std::string& key) const {
  const EJson* j = find(key);
  if (!j) throw EvalError("missing key " + key + " in " + print_ejson(*this));
  return *j;
}

Value EJson::scalar() const {
  switch (kind()) {
    case Kind::Bool: return as_bool();
    case Kind::Number: return as_number();
    case Kind::String: return as_string();
    case Kind::BigInt: return as_bigint();
    default: throw EvalError("scalar expected, got " + print_ejson(*this));
  }
}

EJson EJson::from_scalar(const Value& v) {
  if (v.is_bool()) return boolean(v.as_bool());
  if (v.is_int()) return bigint(v.as_int());
  if (v.is_double()) return number(v.as_double());
  if (v.is_text()) return string(v.as_text());
  return null();
}

bool EJson::operator==(const EJson& o) const { return ejson_compare(*this, o) == 0; }

int ejson_compare(const EJson& a, const EJson& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case EJson::Kind::Null: return 0;
    case EJson::Kind::Bool: return int(a.as_bool()) - int(b.as_bool());
    case EJson::Kind::Number: {
      double x = a.as_number(), y = b.as_number();
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    case EJson::Kind::String: {
      int c = a.as_string().compare(b.as_string());
      return (c > 0) - (c < 0);
    }
    case EJson::Kind::BigInt: {
      int c = cmp(a.as_bigint(), b.as_bigint());
      return (c > 0) - (c < 0);
    }
    case EJson::Kind::Object: {
      const EMembers& x = a.members();
      const EMembers& y = b.members();
      std::size_t n = std::min(x.size(), y.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = x[i].first.compare(y[i].first);
        if (c != 0) return c < 0 ? -1 : 1;
        c = ejson_compare(x[i].second, y[i].second);
        if (c != 0) return c;
      }
      return x.size() == y.size() ? 0 : (x.size() < y.size() ? -1 : 1);
    }
    case EJson::Kind::Array: {
      const EArray& x = a.elements();
      const EArray& y = b.elements();
      auto i = x.begin(), j = y.begin();
      for (; i != x.end() && j != y.end(); ++i, ++j) {
        int c = ejson_compare(*i, *j);
        if (c != 0) return c;
      }
      return x.size() == y.size() ? 0 : (x.size() < y.size() ? -1 : 1);
    }
  }
  return 0;
}

EJson data_to_ejson(const Data& d) {
  switch (d.kind()) {
    case Data::Kind::Unit: return EJson::null();
    case Data::Kind::Atom: {
      const Value& v = d.atom();
      if (v.is_null()) throw EvalError("null atom has no encoding");
      return EJson::from_scalar(v);
    }
    case Data::Kind::Record: {
      EMembers ms;
      for (auto& [k, v] : d.fields()) {
        if (k == kLeftKey || k == kRightKey)
          throw EvalError("reserved label " + k + " in record");
        ms.emplace_back(k, data_to_ejson(v));
      }
      return EJson::object(std::move(ms));
    }
    case Data::Kind::Bag: {
      std::vector<EJson> xs;
      xs.reserve(d.items().size());
      for (auto& x : d.items()) xs.push_back(data_to_ejson(x));
      return EJson::array(std::move(xs));
    }
    case Data::Kind::Left:
      return EJson::object({{kLeftKey, data_to_ejson(d.payload())}});
    case Data::Kind::Right:
      return EJson::object({{kRightKey, data_to_ejson(d.payload())}});
  }
  return EJson::null();
}

Data ejson_to_data(const EJson& j) {
  switch (j.kind()) {
    case EJson::Kind::Null: return Data::unit();
    case EJson::Kind::Object: {
      const EMembers& ms = j.members();
      if (ms.size() == 1 && ms[0].first == kLeftKey)
        return Data::left(ejson_to_data(ms[0].second));
      if (ms.size() == 1 && ms[0].first == kRightKey)
        return Data::right(ejson_to_data(ms[0].second));
      Fields fs;
      for (auto& [k, v] : ms) {
        if (k == kLeftKey || k == kRightKey)
          throw EvalError("reserved key " + k + " in object");
        fs.emplace_back(k, ejson_to_data(v));
      }
      return Data::record(std::move(fs));
    }
    case EJson::Kind::Array: {
      std::vector<Data> xs;
      for (auto& x : j.elements()) xs.push_back(ejson_to_data(x));
      return Data::bag(std::move(xs));
    }
    default: return Data::atom(j.scalar());
  }
}

namespace {

// Builds EJson straight from the token stream so integer literals of any
// size stay exact.
class Builder : public nlohmann::json_sax<nlohmann::json> {
 public:
  EJson result;

  bool null() override { return put(EJson::null()); }
  bool boolean(bool b) override { return put(EJson::boolean(b)); }
  bool number_integer(number_integer_t v) override {
    return put(EJson::bigint(BigInt(std::to_string(v))));
  }
  bool number_unsigned(number_unsigned_t v) override {
    return put(EJson::bigint(BigInt(std::to_string(v))));
  }
  bool number_float(number_float_t v, const string_t& raw) override {
    if (raw.find_first_of(".eE") == std::string::npos)
      return put(EJson::bigint(BigInt(raw)));
    return put(EJson::number(v));
  }
  bool string(string_t& s) override { return put(EJson::string(s)); }
  bool binary(binary_t&) override { return false; }
  bool start_object(std::size_t) override {
    frames_.push_back({true, {}, {}, {}});
    return true;
  }
  bool key(string_t& k) override {
    frames_.back().key = k;
    return true;
  }
  bool end_object() override {
    Frame f = std::move(frames_.back());
    frames_.pop_back();
    return put(EJson::object(std::move(f.members)));
  }
  bool start_array(std::size_t) override {
    frames_.push_back({false, {}, {}, {}});
    return true;
  }
  bool end_array() override {
    Frame f = std::move(frames_.back());
    frames_.pop_back();
    return put(EJson::array(std::move(f.items)));
  }
  bool parse_error(std::size_t pos, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    throw EvalError("JSON parse error at byte " + std::to_string(pos) + ": " +
                    ex.what());
  }

 private:
  struct Frame {
    bool object;
    std::string key;
    EMembers members;
    std::vector<EJson> items;
  };
  std::vector<Frame> frames_;

  bool put(EJson v) {
    if (frames_.empty()) {
      result = std::move(v);
    } else if (frames_.back().object) {
      frames_.back().members.emplace_back(frames_.back().key, std::move(v));
    } else {
      frames_.back().items.push_back(std::move(v));
    }
    return true;
  }
};

void print_string(std::string& out, const std::string& s) {
  out += nlohmann::json(s).dump(-1, ' ', false,
                                nlohmann::json::error_handler_t::replace);
}

void print_to(std::string& out, const EJson& j) {
  switch (j.kind()) {
    case EJson::Kind::Null: out += "null"; break;
    case EJson::Kind::Bool: out += j.as_bool() ? "true" : "false"; break;
    case EJson::Kind::Number: {
      std::string d = format_double(j.as_number());
      if (d.find_first_of(".eEnI") == std::string::npos) d += ".0";
      out += d;
      break;
    }
    case EJson::Kind::String: print_string(out, j.as_string()); break;
    case EJson::Kind::BigInt: out += j.as_bigint().get_str(); break;
    case EJson::Kind::Object: {
      out += '{';
      bool first = true;
      for (auto& [k, v] : j.members()) {
        if (!first) out += ',';
        first = false;
        print_string(out, k);
        out += ':';
        print_to(out, v);
      }
      out += '}';
      break;
    }
    case EJson::Kind::Array: {
      out += '[';
      bool first = true;
      for (auto& x : j.elements()) {
        if (!first) out += ',';
        first = false;
        print_to(out, x);
      }
      out += ']';
      break;
    }
  }
}

}  // namespace

EJson parse_ejson(const std::string& text) {
  Builder b;
  nlohmann::json::sax_parse(text, &b);
  return std::move(b.result);
}

std::string print_ejson(const EJson& j) {
  std::string out;
  print_to(out, j);
  return out;
}

}  // namespace dbx

// SPDX-License-Identifier: MIT
#include "dbx/data.hpp"

#include <algorithm>

namespace dbx {

Data Data::atom(Value v) {
  if (v.is_null()) throw EvalError("null is not an atom");
  Data d;
  d.rep_ = std::move(v);
  return d;
}

Data Data::record(Fields fields) {
  std::sort(fields.begin(), fields.end(),
            [](const Field& a, const Field& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < fields.size(); ++i)
    if (fields[i].first == fields[i - 1].first)
      throw EvalError("duplicate record label " + fields[i].first);
  Data d;
  d.rep_ = std::make_shared<const Fields>(std::move(fields));
  return d;
}

Data Data::bag(std::vector<Data> items) { return bag(DataBag(std::move(items))); }

Data Data::bag(DataBag items) {
  Data d;
  d.rep_ = std::move(items);
  return d;
}

Data Data::left(Data v) {
  Data d;
  d.rep_ = LeftTag{{std::make_shared<const Data>(std::move(v))}};
  return d;
}

Data Data::right(Data v) {
  Data d;
  d.rep_ = RightTag{{std::make_shared<const Data>(std::move(v))}};
  return d;
}

Data null_data() {
  static const Data n = Data::right(Data::unit());
  return n;
}

const Value& Data::atom() const {
  if (!is_atom()) throw EvalError("atom expected, got " + to_string(*this));
  return std::get<Value>(rep_);
}

const Fields& Data::fields() const {
  if (!is_record()) throw EvalError("record expected, got " + to_string(*this));
  return *std::get<std::shared_ptr<const Fields>>(rep_);
}

const DataBag& Data::items() const {
  if (!is_bag()) throw EvalError("bag expected, got " + to_string(*this));
  return std::get<DataBag>(rep_);
}

const Data& Data::payload() const {
  if (is_left()) return *std::get<LeftTag>(rep_).d;
  if (is_right()) return *std::get<RightTag>(rep_).d;
  throw EvalError("either value expected, got " + to_string(*this));
}

const Data* Data::find(const std::string& label) const {
  const Fields& fs = fields();
  auto it = std::lower_bound(
      fs.begin(), fs.end(), label,
      [](const Field& f, const std::string& l) { return f.first < l; });
  if (it == fs.end() || it->first != label) return nullptr;
  return &it->second;
}

const Data& Data::get(const std::string& label) const {
  const Data* d = find(label);
  if (!d) throw EvalError("missing field " + label + " in " + to_string(*this));
  return *d;
}

bool Data::operator==(const Data& o) const { return data_compare(*this, o) == 0; }

int data_compare(const Data& a, const Data& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Data::Kind::Unit: return 0;
    case Data::Kind::Atom: {
      const Value& x = a.atom();
      const Value& y = b.atom();
      int c = value_total_order(x, y);
      if (c == 0 && x.rep().index() != y.rep().index())
        return x.rep().index() < y.rep().index() ? -1 : 1;
      return c;
    }
    case Data::Kind::Record: {
      const Fields& x = a.fields();
      const Fields& y = b.fields();
      std::size_t n = std::min(x.size(), y.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = x[i].first.compare(y[i].first);
        if (c != 0) return c < 0 ? -1 : 1;
        c = data_compare(x[i].second, y[i].second);
        if (c != 0) return c;
      }
      return x.size() == y.size() ? 0 : (x.size() < y.size() ? -1 : 1);
    }
    case Data::Kind::Bag: {
      const DataBag& x = a.items();
      const DataBag& y = b.items();
      auto i = x.begin(), j = y.begin();
      for (; i != x.end() && j != y.end(); ++i, ++j) {
        int c = data_compare(*i, *j);
        if (c != 0) return c;
      }
      return x.size() == y.size() ? 0 : (x.size() < y.size() ? -1 : 1);
    }
    default: return data_compare(a.payload(), b.payload());
  }
}

Data canonical(const Data& d) {
  switch (d.kind()) {
    case Data::Kind::Record: {
      Fields fs;
      for (auto& [k, v] : d.fields()) fs.emplace_back(k, canonical(v));
      return Data::record(std::move(fs));
    }
    case Data::Kind::Bag: {
      std::vector<Data> xs;
      for (auto& x : d.items()) xs.push_back(canonical(x));
      std::sort(xs.begin(), xs.end(), DataLess());
      return Data::bag(std::move(xs));
    }
    case Data::Kind::Left: return Data::left(canonical(d.payload()));
    case Data::Kind::Right: return Data::right(canonical(d.payload()));
    default: return d;
  }
}

bool bag_equal(const Data& a, const Data& b) { return canonical(a) == canonical(b); }

std::string to_string(const Data& d) {
  switch (d.kind()) {
    case Data::Kind::Unit: return "()";
    case Data::Kind::Atom: return value_literal(d.atom());
    case Data::Kind::Record: {
      std::string s = "{";
      bool first = true;
      for (auto& [k, v] : d.fields()) {
        if (!first) s += ", ";
        first = false;
        s += k + ": " + to_string(v);
      }
      return s + "}";
    }
    case Data::Kind::Bag: {
      std::string s = "[";
      bool first = true;
      for (auto& x : d.items()) {
        if (!first) s += ", ";
        first = false;
        s += to_string(x);
      }
      return s + "]";
    }
    case Data::Kind::Left: return "left(" + to_string(d.payload()) + ")";
    case Data::Kind::Right: return "right(" + to_string(d.payload()) + ")";
  }
  return "?";
}

}  // namespace dbx

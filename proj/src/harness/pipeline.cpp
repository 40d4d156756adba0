// SPDX-License-Identifier: MIT
#include "dbx/pipeline.hpp"

#include <stdexcept>

#include "dbx/alg2nra.hpp"

namespace dbx::pipeline {

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> n = {"sqlalg", "nrae", "nnrc", "nnrs",
                                             "nnrsimp", "imp", "js"};
  return n;
}

bool parse_stage(const std::string& name, Stage& out) {
  const auto& n = stage_names();
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] == name) {
      out = Stage(i);
      return true;
    }
  return false;
}

std::string stage_name(Stage s) { return stage_names().at(std::size_t(s)); }

const std::vector<Point>& all_points() {
  static const std::vector<Point> p = {Point::SqlAlg, Point::Nrae,     Point::Nnrc,
                                       Point::Stratified, Point::Nnrs, Point::NoShadow,
                                       Point::Nnrsimp, Point::ImpData, Point::ImpEJson};
  return p;
}

std::string point_name(Point p) {
  switch (p) {
    case Point::SqlAlg: return "sqlalg";
    case Point::Nrae: return "nrae";
    case Point::Nnrc: return "nnrc";
    case Point::Stratified: return "stratified";
    case Point::Nnrs: return "nnrs";
    case Point::NoShadow: return "no-shadow";
    case Point::Nnrsimp: return "nnrsimp";
    case Point::ImpData: return "imp-data";
    case Point::ImpEJson: return "imp-ejson";
  }
  return "?";
}

namespace {

void check(bool ok, const std::string& stage, const std::string& why) {
  if (!ok) throw CompilerBug(stage + " validator: " + why);
}

void lower_nrae(Artifacts& a, const Options& opts) {
  a.nnrc = nnrc::nrae_to_nnrc(a.nrae);
  a.stratified = nnrc::stratify(a.nnrc);
  a.nnrs = nnrs::nnrc_to_nnrs(a.stratified);
  a.no_shadow = nnrs::uncross_shadow(a.nnrs);
  a.nnrsimp = nnrsimp::nnrs_to_nnrsimp(a.no_shadow);
  a.imp_data = imp::nnrsimp_to_imp_data(a.nnrsimp);
  a.imp_ejson = imp::imp_data_to_imp_ejson(a.imp_data);
  if (opts.validate) {
    check(nnrc::is_stratified(*a.stratified), "stratified", "operator over a complex expression");
    std::string why = nnrs::validate(a.nnrs);
    check(why.empty(), "nnrs", why);
    why = nnrs::validate(a.no_shadow);
    check(why.empty(), "nnrs", why);
    check(nnrs::is_cross_shadow_free(a.no_shadow), "no-shadow", "binder crosses namespaces");
    why = nnrsimp::validate(a.nnrsimp);
    check(why.empty(), "nnrsimp", why);
    why = imp::validate(a.imp_data);
    check(why.empty(), "imp", why);
    why = imp::validate(a.imp_ejson);
    check(why.empty(), "imp", why);
  }
  a.js = js::imp_to_js(a.imp_ejson);
}

void lower(Artifacts& a, const Options& opts) {
  a.nrae = alg2nra::translate_query({}, *a.front.algebra, a.front.schema);
  if (opts.optimize) a.nrae = nra::optimize(a.nrae);
  lower_nrae(a, opts);
}

}  // namespace

Artifacts compile(const std::string& sql_text, const Options& opts) {
  Artifacts a;
  a.front = sql::compile_sql(sql_text);
  lower(a, opts);
  return a;
}

Artifacts compile_algebra(const alg::QueryP& q, const Schema& schema, const Options& opts) {
  alg::check_well_formed(*q, {}, schema);
  Artifacts a;
  a.front.schema = schema;
  a.front.algebra = q;
  lower(a, opts);
  return a;
}

Artifacts from_nrae(const sql::Compiled& front, const nra::Q& q, const Options& opts) {
  Artifacts a;
  a.front = front;
  a.nrae = q;
  lower_nrae(a, opts);
  return a;
}

std::string emit(const Artifacts& a, Stage s) {
  switch (s) {
    case Stage::SqlAlg: return alg::print(*a.front.algebra) + "\n";
    case Stage::Nrae: return nra::print(*a.nrae) + "\n";
    case Stage::Nnrc: return nnrc::print(*a.stratified) + "\n";
    case Stage::Nnrs: return nnrs::print(a.no_shadow);
    case Stage::Nnrsimp: return nnrsimp::print(a.nnrsimp);
    case Stage::Imp: return imp::print(a.imp_ejson);
    case Stage::Js: return js::print_js(a.js);
  }
  return "";
}

Data eval_at(const Artifacts& a, Point p, const Instance& db) {
  if (p == Point::SqlAlg) return bag_to_data(alg::eval_query(*a.front.algebra, {}, db));
  Data input = instance_to_data(db);
  switch (p) {
    case Point::SqlAlg: break;
    case Point::Nrae: return nra::eval_top(a.nrae, Data::record({}), input);
    case Point::Nnrc: return nnrc::eval(a.nnrc, {{kDbVar, input}});
    case Point::Stratified: return nnrc::eval(a.stratified, {{kDbVar, input}});
    case Point::Nnrs: return nnrs::eval(a.nnrs, input);
    case Point::NoShadow: return nnrs::eval(a.no_shadow, input);
    case Point::Nnrsimp: return nnrsimp::eval(a.nnrsimp, input);
    case Point::ImpData: return imp::eval_imp(a.imp_data, imp::data_instantiation(), input);
    case Point::ImpEJson:
      return ejson_to_data(
          imp::eval_imp(a.imp_ejson, imp::ejson_instantiation(), data_to_ejson(input)));
  }
  throw std::logic_error("unknown evaluation point");
}

Point point_of(Stage s) {
  switch (s) {
    case Stage::SqlAlg: return Point::SqlAlg;
    case Stage::Nrae: return Point::Nrae;
    case Stage::Nnrc: return Point::Stratified;
    case Stage::Nnrs: return Point::NoShadow;
    case Stage::Nnrsimp: return Point::Nnrsimp;
    case Stage::Imp: return Point::ImpEJson;
    case Stage::Js: break;
  }
  throw std::invalid_argument("the js stage runs under Node, not in process");
}

}  // namespace dbx::pipeline

// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <vector>

#include "dbx/imp.hpp"
#include "dbx/instance.hpp"
#include "dbx/js_backend.hpp"
#include "dbx/lowering.hpp"
#include "dbx/nrae.hpp"
#include "dbx/sql_front.hpp"

namespace dbx::pipeline {

// Emission stages, in pipeline order.
enum class Stage { SqlAlg, Nrae, Nnrc, Nnrs, Nnrsimp, Imp, Js };

const std::vector<std::string>& stage_names();
bool parse_stage(const std::string& name, Stage& out);
std::string stage_name(Stage s);

// Every point at which a compiled query can be evaluated in process.
enum class Point {
  SqlAlg,
  Nrae,
  Nnrc,
  Stratified,
  Nnrs,
  NoShadow,
  Nnrsimp,
  ImpData,
  ImpEJson,
};

const std::vector<Point>& all_points();
std::string point_name(Point p);

struct Artifacts {
  sql::Compiled front;
  nra::Q nrae;  // optimized when requested
  nnrc::E nnrc;
  nnrc::E stratified;
  nnrs::Program nnrs;
  nnrs::Program no_shadow;
  nnrsimp::Program nnrsimp;
  imp::DataFunction imp_data;
  imp::EJsonFunction imp_ejson;
  js::Module js;
};

struct Options {
  bool optimize = false;
  // Run every stage validator; failures raise CompilerBug.
  bool validate = true;
};

Artifacts compile(const std::string& sql_text, const Options& opts = {});
// Compiles an algebra term directly, skipping the SQL front end.
Artifacts compile_algebra(const alg::QueryP& q, const Schema& schema, const Options& opts = {});

// Lowers a given NRAe term; front supplies the schema and algebra.
Artifacts from_nrae(const sql::Compiled& front, const nra::Q& q, const Options& opts = {});

// Pretty-printed artifact of a stage.
std::string emit(const Artifacts& a, Stage s);

// The query result as a boxed bag of records.
Data eval_at(const Artifacts& a, Point p, const Instance& db);

// The stage used by `run` for a given --stage argument.
Point point_of(Stage s);

}  // namespace dbx::pipeline

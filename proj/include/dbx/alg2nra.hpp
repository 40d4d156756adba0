// SPDX-License-Identifier: MIT
#pragma once

#include <string>

#include "dbx/instance.hpp"
#include "dbx/nrae.hpp"
#include "dbx/sqlalg.hpp"

namespace dbx::alg2nra {

// Label of the group field produced by group_by; "$" keeps it out of user
// schemas.
inline const char* kGroupLabel = "$group";

// {slice: [In], tail: Env}
nra::Q push_one();
// {slice: In, tail: Env}
nra::Q push_bag();

// Boxed three-valued logic: left(true), left(false), right(()).
Data box(alg::Bool3 b);
nra::Q and_b(nra::Q a, nra::Q b);
nra::Q or_b(nra::Q a, nra::Q b);
nra::Q not_b(nra::Q a);
// either(In, false) o q
nra::Q is_true_b(nra::Q q);

// Translations are functions of Env and the instance; In is never read at
// their top level. The schema supplies subquery sorts.
nra::Q translate_query(const alg::StaticEnv& a, const alg::Query& q, const Schema& schema);
nra::Q translate_formula(const alg::StaticEnv& a, const alg::Formula& f, const Schema& schema);
nra::Q translate_expr(const alg::StaticEnv& a, const alg::Expr& e, const Schema& schema);

// Runtime image of an environment: {} for the empty stack, otherwise
// {slice: bag_to_data(T), tail: runtime_of(rest)}.
Data runtime_of(const alg::Env& e);

}  // namespace dbx::alg2nra

#pragma once

// Random generators and fixed fixtures shared by the test binaries.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/model.hpp"

namespace testgen {

using vcsp::CostFn;
using vcsp::ExtRat;
using vcsp::Instance;
using vcsp::Label;
using vcsp::Language;
using vcsp::Rational;
using vcsp::Tuple;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(eng); }

  Rational rational(int max_abs = 6, int max_den = 3) {
    return Rational(static_cast<long>(uniform(-max_abs, max_abs)), static_cast<long>(uniform(1, max_den)));
  }
  Rational nonneg_rational(int max = 6, int max_den = 3) {
    return Rational(static_cast<long>(uniform(0, max)), static_cast<long>(uniform(1, max_den)));
  }
};

/// Table with each tuple infinite with probability p_inf, else a small rational.
inline CostFn random_fn(Rng& rng, std::string name, int arity, int k, double p_inf, bool crisp = false) {
  CostFn f(std::move(name), arity, k);
  vcsp::for_each_tuple(k, arity, [&](const Tuple& x) {
    if (rng.coin(p_inf)) return;
    f.set(x, crisp ? ExtRat(0) : ExtRat(rng.nonneg_rational(5, 2)));
  });
  return f;
}

inline Language random_language(Rng& rng, int k, int nfuncs, int max_arity, double p_inf, bool crisp = false) {
  Language lang(k);
  for (int i = 0; i < nfuncs; ++i)
    lang.add(random_fn(rng, "f" + std::to_string(i), rng.uniform(1, max_arity), k, p_inf, crisp));
  return lang;
}

inline Instance random_instance(Rng& rng, const Language& lang, int n, int m) {
  std::vector<const CostFn*> fns;
  for (const auto& [name, f] : lang.functions()) fns.push_back(&f);
  Instance inst;
  inst.num_vars = n;
  for (int t = 0; t < m; ++t) {
    const CostFn& f = *fns[rng.uniform(0, static_cast<int>(fns.size()) - 1)];
    std::vector<int> scope;
    for (int i = 0; i < f.arity(); ++i) scope.push_back(rng.uniform(0, n - 1));
    inst.add(f.name(), scope);
  }
  return inst;
}

/// Sublattices of {0,1}^2 (closed under coordinatewise min and max), as sets
/// of tuple indices 2*x0 + x1. The empty family is left out.
inline const std::vector<std::vector<int>>& boolean_ring_families() {
  static const std::vector<std::vector<int>> fams = {
      {0}, {1}, {2}, {3}, {0, 3}, {0, 1}, {0, 2}, {1, 3}, {2, 3}, {0, 1, 3}, {0, 2, 3}, {0, 1, 2, 3},
  };
  return fams;
}

/// a + b*x0 + c*x1 - d*x0*x1 with d >= 0, restricted to a random ring family.
inline CostFn random_submodular_binary(Rng& rng, std::string name, bool full_domain = false) {
  Rational a = rng.nonneg_rational(4, 2), b = rng.rational(4, 2), c = rng.rational(4, 2);
  Rational d = rng.nonneg_rational(4, 2);
  const auto& fams = boolean_ring_families();
  const auto& fam = full_domain ? fams.back() : (rng.coin(0.4) ? fams.back() : fams[rng.uniform(0, 11)]);
  CostFn f(std::move(name), 2, 2);
  for (int idx : fam) {
    Label x0 = idx / 2, x1 = idx % 2;
    Rational v = a;
    if (x0) v += b;
    if (x1) v += c;
    if (x0 && x1) v -= d;
    f.set({x0, x1}, ExtRat(v));
  }
  return f;
}

inline CostFn random_unary(Rng& rng, std::string name, int k, double p_inf) {
  CostFn u(std::move(name), 1, k);
  for (Label a = 0; a < k; ++a)
    if (!rng.coin(p_inf)) u.set({a}, ExtRat(rng.rational(4, 2)));
  return u;
}

/// Boolean submodular instance; every constraint gets its own function.
inline std::pair<Language, Instance> random_submodular_instance(Rng& rng, int n, int m) {
  Language lang(2);
  Instance inst;
  inst.num_vars = n;
  for (int t = 0; t < m; ++t) {
    std::string name = "c" + std::to_string(t);
    if (n >= 2 && rng.coin(0.6)) {
      int v0 = rng.uniform(0, n - 1), v1 = rng.uniform(0, n - 2);
      if (v1 >= v0) ++v1;
      lang.add(random_submodular_binary(rng, name));
      inst.add(name, {v0, v1});
    } else {
      lang.add(random_unary(rng, name, 2, 0.15));
      inst.add(name, {rng.uniform(0, n - 1)});
    }
  }
  return {std::move(lang), std::move(inst)};
}

// ---- fixtures ---------------------------------------------------------------

/// Crisp x ^ y = 0 and x ^ y = 1 over {0,1}.
inline Language parity_language() {
  Language lang(2);
  CostFn eq("xor0", 2, 2), ne("xor1", 2, 2);
  eq.set({0, 0}, 0);
  eq.set({1, 1}, 0);
  ne.set({0, 1}, 0);
  ne.set({1, 0}, 0);
  lang.add(eq);
  lang.add(ne);
  return lang;
}

/// x+y=0 (mod 2), y+z=0, x+z=1: no solution.
inline Instance parity_instance() {
  Instance inst;
  inst.num_vars = 3;
  inst.add("xor0", {0, 1});
  inst.add("xor0", {1, 2});
  inst.add("xor1", {0, 2});
  return inst;
}

/// Disequality over k plus every constant unary u_d.
inline Language diseq_with_constants(int k) {
  Language lang(k);
  CostFn ne("neq", 2, k);
  for (Label a = 0; a < k; ++a)
    for (Label b = 0; b < k; ++b)
      if (a != b) ne.set({a, b}, 0);
  lang.add(ne);
  for (Label d = 0; d < k; ++d) lang.add(vcsp::unary_set_fn("const" + std::to_string(d), k, {d}));
  return lang;
}

/// f(1,...,1,0) = inf, 0 elsewhere.
inline CostFn horn_clause(std::string name, int arity) {
  CostFn f(std::move(name), arity, 2);
  vcsp::for_each_tuple(2, arity, [&](const Tuple& x) {
    bool bad = x.back() == 0;
    for (int i = 0; i + 1 < arity; ++i) bad = bad && x[i] == 1;
    if (!bad) f.set(x, 0);
  });
  return f;
}

inline bool is_submodular_2x2(const CostFn& f) {
  return f({0, 1}) + f({1, 0}) >= f({0, 0}) + f({1, 1});
}

}  // namespace testgen

#pragma once

// Exhaustive ground truth: optimum with all minimizers, and min-projection of
// an instance onto a prefix of its variables.

#include <cstddef>
#include <vector>

#include "vcsp/caps.hpp"
#include "vcsp/model.hpp"

namespace vcsp {

struct OptReport {
  ExtRat value = ExtRat::infinity();
  std::vector<Assignment> argmin;  // lexicographic; empty iff value is inf
};

namespace detail {

// Depth-first scan in lexicographic order. A constraint is charged at its
// highest-index variable; a partial sum of inf prunes the subtree.
class Scanner {
 public:
  Scanner(const Language& lang, const Instance& inst, const Caps& caps) : lang_(lang), inst_(inst) {
    validate(lang, inst);
    const std::size_t space = checked_pow(static_cast<std::size_t>(lang.domain_size()),
                                          static_cast<std::size_t>(inst.num_vars));
    Caps::check("brute_evals", space, caps.brute_evals);
    due_.resize(inst.num_vars);
    for (std::size_t t = 0; t < inst.constraints.size(); ++t) {
      const auto& c = inst.constraints[t];
      int last = 0;
      for (int v : c.scope) last = std::max(last, v);
      due_[last].push_back(t);
    }
  }

  /// fn(x, value) for every assignment with finite value.
  template <class Fn>
  void scan(Fn&& fn) {
    x_.assign(inst_.num_vars, 0);
    if (inst_.num_vars == 0) {
      ExtRat total;
      for (const auto& c : inst_.constraints) total += lang_.at(c.fn)(std::span<const Label>{});
      if (total.is_finite()) fn(std::as_const(x_), total.value());
      return;
    }
    rec(0, Rational(), fn);
  }

 private:
  template <class Fn>
  void rec(int v, const Rational& partial, Fn& fn) {
    for (Label a = 0; a < lang_.domain_size(); ++a) {
      x_[v] = a;
      Rational sum = partial;
      bool finite = true;
      for (std::size_t t : due_[v]) {
        const auto& c = inst_.constraints[t];
        buf_.resize(c.scope.size());
        for (std::size_t i = 0; i < c.scope.size(); ++i) buf_[i] = x_[c.scope[i]];
        const Rational* val = lang_.at(c.fn).find(buf_);
        if (!val) {
          finite = false;
          break;
        }
        sum += *val;
      }
      if (!finite) continue;
      if (v + 1 == inst_.num_vars) {
        fn(std::as_const(x_), std::as_const(sum));
      } else {
        rec(v + 1, sum, fn);
      }
    }
  }

  const Language& lang_;
  const Instance& inst_;
  std::vector<std::vector<std::size_t>> due_;
  Assignment x_;
  Tuple buf_;
};

}  // namespace detail

inline OptReport brute_opt(const Language& lang, const Instance& inst, const Caps& caps = {}) {
  OptReport rep;
  detail::Scanner scanner(lang, inst, caps);
  scanner.scan([&](const Assignment& x, const Rational& value) {
    if (rep.value.is_finite() && value > rep.value.value()) return;
    if (rep.value.is_inf() || value < rep.value.value()) {
      rep.value = ExtRat(value);
      rep.argmin.clear();
    }
    rep.argmin.push_back(x);
  });
  return rep;
}

/// f(x_0..x_{p-1}) = min over the remaining variables of the objective,
/// tabulated densely. With p = 0 the result is unary: f(0) = Opt, inf elsewhere.
inline CostFn express(const Language& lang, const Instance& inst, int kept_vars, const Caps& caps = {}) {
  if (kept_vars < 0 || kept_vars > inst.num_vars)
    throw ModelError("kept_vars must lie in [0, " + std::to_string(inst.num_vars) + "]");
  const int arity = kept_vars == 0 ? 1 : kept_vars;
  CostFn out("expressed", arity, lang.domain_size());
  std::map<Tuple, Rational, TupleLess> best;
  detail::Scanner scanner(lang, inst, caps);
  scanner.scan([&](const Assignment& x, const Rational& value) {
    Tuple key = kept_vars == 0 ? Tuple{0} : Tuple(x.begin(), x.begin() + kept_vars);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), value);
    } else if (value < it->second) {
      it->second = value;
    }
  });
  for (const auto& [key, value] : best) out.set(key, ExtRat(value));
  return out;
}

}  // namespace vcsp

#pragma once

// Basic LP relaxation and the solving pipeline: (1,inf)-minimize, solve the
// relaxation, then pin variables one label at a time while the optimum holds.
//
//   min  sum_t sum_{x in dom f_t} mu_t(x) f_t(x)
//   s.t. sum_{x : x_i = a} mu_t(x) = alpha_{v(t,i)}(a)   for all t, i, a
//        sum_x mu_t(x) = 1, sum_a alpha_v(a) = 1, mu, alpha >= 0

#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vcsp/caps.hpp"
#include "vcsp/exactlp.hpp"
#include "vcsp/feasibility.hpp"
#include "vcsp/model.hpp"

namespace vcsp {

class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column layout of the relaxation.
struct BlpLayout {
  int k = 0;
  int num_vars = 0;
  std::vector<std::vector<Tuple>> mu_tuples;  // dom f_t in lexicographic order
  std::vector<std::size_t> mu_base;           // first column of mu_t
  std::size_t alpha_base = 0;

  std::size_t alpha_col(int v, Label a) const {
    return alpha_base + static_cast<std::size_t>(v) * static_cast<std::size_t>(k) + static_cast<std::size_t>(a);
  }
};

struct BlpProgram {
  lp::LinearProgram lp;
  BlpLayout layout;
};

struct BlpSolution {
  ExtRat value;
  std::vector<std::vector<Rational>> alpha;                   // [v][a]
  std::vector<std::vector<std::pair<Tuple, Rational>>> mu;    // [t] over dom f_t
};

inline BlpProgram build_blp(const Language& lang, const Instance& inst) {
  validate(lang, inst);
  BlpProgram out;
  BlpLayout& L = out.layout;
  L.k = lang.domain_size();
  L.num_vars = inst.num_vars;
  std::size_t col = 0;
  for (const auto& c : inst.constraints) {
    L.mu_base.push_back(col);
    std::vector<Tuple> tuples;
    for (const auto& [x, v] : lang.at(c.fn).entries()) tuples.push_back(x);
    col += tuples.size();
    L.mu_tuples.push_back(std::move(tuples));
  }
  L.alpha_base = col;
  col += static_cast<std::size_t>(inst.num_vars) * static_cast<std::size_t>(L.k);

  lp::LinearProgram& lp = out.lp;
  lp = lp::LinearProgram(col);
  for (std::size_t t = 0; t < inst.constraints.size(); ++t) {
    const CostFn& f = lang.at(inst.constraints[t].fn);
    for (std::size_t j = 0; j < L.mu_tuples[t].size(); ++j) lp.objective[L.mu_base[t] + j] = *f.find(L.mu_tuples[t][j]);
  }
  for (std::size_t t = 0; t < inst.constraints.size(); ++t) {
    const auto& c = inst.constraints[t];
    for (std::size_t i = 0; i < c.scope.size(); ++i)
      for (Label a = 0; a < L.k; ++a) {
        std::vector<Rational> row(col);
        for (std::size_t j = 0; j < L.mu_tuples[t].size(); ++j)
          if (L.mu_tuples[t][j][i] == a) row[L.mu_base[t] + j] = Rational(1);
        row[L.alpha_col(c.scope[i], a)] -= Rational(1);
        lp.add_row(std::move(row), lp::Relation::Equal, Rational(0));
      }
  }
  for (std::size_t t = 0; t < inst.constraints.size(); ++t) {
    std::vector<Rational> row(col);
    for (std::size_t j = 0; j < L.mu_tuples[t].size(); ++j) row[L.mu_base[t] + j] = Rational(1);
    lp.add_row(std::move(row), lp::Relation::Equal, Rational(1));
  }
  for (int v = 0; v < inst.num_vars; ++v) {
    std::vector<Rational> row(col);
    for (Label a = 0; a < L.k; ++a) row[L.alpha_col(v, a)] = Rational(1);
    lp.add_row(std::move(row), lp::Relation::Equal, Rational(1));
  }
  return out;
}

/// Rechecks simplices, support, marginals and the value from scratch.
inline bool check_blp_solution(const Language& lang, const Instance& inst, const BlpSolution& s) {
  const int k = lang.domain_size();
  if (s.value.is_inf()) return false;
  if (static_cast<int>(s.alpha.size()) != inst.num_vars || s.mu.size() != inst.constraints.size()) return false;
  for (const auto& a : s.alpha) {
    if (static_cast<int>(a.size()) != k) return false;
    Rational sum;
    for (const auto& p : a) {
      if (p.sign() < 0) return false;
      sum += p;
    }
    if (sum != Rational(1)) return false;
  }
  Rational value;
  for (std::size_t t = 0; t < inst.constraints.size(); ++t) {
    const auto& c = inst.constraints[t];
    const CostFn& f = lang.at(c.fn);
    Rational sum;
    std::vector<std::vector<Rational>> marg(c.scope.size(), std::vector<Rational>(k));
    for (const auto& [x, p] : s.mu[t]) {
      if (p.sign() < 0) return false;
      if (static_cast<int>(x.size()) != f.arity()) return false;
      const Rational* fx = f.find(x);
      if (!fx) {
        if (!p.is_zero()) return false;
        continue;
      }
      sum += p;
      value += p * *fx;
      for (std::size_t i = 0; i < x.size(); ++i) marg[i][x[i]] += p;
    }
    if (sum != Rational(1)) return false;
    for (std::size_t i = 0; i < c.scope.size(); ++i)
      if (marg[i] != s.alpha[c.scope[i]]) return false;
  }
  return value == s.value.value();
}

struct BlpResult {
  ExtRat value = ExtRat::infinity();
  std::optional<BlpSolution> solution;
  std::optional<std::vector<Rational>> farkas;  // when infeasible
  std::size_t lp_rows = 0;
  std::size_t lp_cols = 0;
};

/// BLP(I): inf iff the relaxation is infeasible. Every outcome is rechecked
/// (LP certificate and the decoded solution); a failed check throws.
inline BlpResult blp_value(const Language& lang, const Instance& inst, const Caps& caps = {}) {
  BlpProgram prog = build_blp(lang, inst);
  BlpResult res;
  res.lp_rows = prog.lp.rows.size();
  res.lp_cols = prog.lp.num_vars;
  lp::LPOutcome out = lp::solve_lp(prog.lp, caps);
  if (!lp::verify_outcome(prog.lp, out)) throw CertificationError("relaxation LP certificate failed verification");
  if (auto* inf = std::get_if<lp::Infeasible>(&out)) {
    res.farkas = std::move(inf->farkas);
    return res;
  }
  if (lp::is_unbounded(out)) throw CertificationError("relaxation LP reported unbounded");
  const auto& opt = std::get<lp::Optimal>(out);
  const BlpLayout& L = prog.layout;
  BlpSolution sol;
  sol.value = ExtRat(opt.value);
  sol.alpha.assign(inst.num_vars, std::vector<Rational>(L.k));
  for (int v = 0; v < inst.num_vars; ++v)
    for (Label a = 0; a < L.k; ++a) sol.alpha[v][a] = opt.primal[L.alpha_col(v, a)];
  sol.mu.resize(inst.constraints.size());
  for (std::size_t t = 0; t < inst.constraints.size(); ++t)
    for (std::size_t j = 0; j < L.mu_tuples[t].size(); ++j)
      sol.mu[t].emplace_back(L.mu_tuples[t][j], opt.primal[L.mu_base[t] + j]);
  if (!check_blp_solution(lang, inst, sol)) throw CertificationError("decoded relaxation solution failed verification");
  res.value = sol.value;
  res.solution = std::move(sol);
  return res;
}

struct SolveOptions {
  bool raw = false;  ///< skip (1,inf)-minimization; self-reduce on BLP(I)
  unsigned threads = 1;
  Caps caps;
};

struct SolveResult {
  ExtRat value = ExtRat::infinity();
  std::optional<Assignment> assignment;
  bool certified = false;
  std::string diagnostics;
  std::size_t lp_solves = 0;
};

/// Pipeline: I -> I-bar -> v* = BLP(I-bar) -> self-reduction -> x-hat.
/// certified iff evaluate(I, x-hat) = v*, which makes x-hat optimal since
/// v* <= Opt(I-bar) = Opt(I) <= evaluate(I, x-hat).
inline SolveResult solve_vcsp(const Language& lang, const Instance& inst, const SolveOptions& opts = {}) {
  validate(lang, inst);
  SolveResult res;
  const int k = lang.domain_size();
  Language work_lang = lang;
  Instance work = inst;
  SupportedLabels dv(inst.num_vars);
  if (opts.raw) {
    for (auto& s : dv)
      for (Label a = 0; a < k; ++a) s.insert(a);
  } else {
    MinimalInstance mi = one_infty_minimize(lang, inst, opts.threads);
    work_lang = std::move(mi.lang);
    work = std::move(mi.inst);
    dv = std::move(mi.supported);
  }

  BlpResult base = blp_value(work_lang, work, opts.caps);
  ++res.lp_solves;
  res.value = base.value;
  if (base.value.is_inf()) {
    // I-bar infeasible exactly when I is; the raw relaxation only proves it
    res.certified = true;
    return res;
  }
  const Rational vstar = base.value.value();
  BlpSolution current = std::move(*base.solution);

  Assignment x(inst.num_vars, 0);
  for (int v = 0; v < inst.num_vars; ++v) {
    auto with_pin = [&](Label d) {
      Language l2 = work_lang;
      l2.add_or_reuse(unary_set_fn(pin_name(d), k, {d}));
      Instance i2 = work;
      i2.add(pin_name(d), {v});
      return std::pair{std::move(l2), std::move(i2)};
    };
    std::vector<Label> cands(dv[v].begin(), dv[v].end());
    std::optional<Label> chosen;
    if (cands.size() == 1) {
      chosen = cands[0];
    } else if (opts.threads > 1 && cands.size() > 1) {
      // solve every candidate up front, then take the first in label order
      std::vector<std::future<BlpResult>> jobs;
      for (Label d : cands) {
        bool integral_here = current.alpha[v][d] == Rational(1);
        jobs.push_back(std::async(integral_here ? std::launch::deferred : std::launch::async, [&, d] {
          auto [l2, i2] = with_pin(d);
          return blp_value(l2, i2, opts.caps);
        }));
      }
      for (std::size_t i = 0; i < cands.size() && !chosen; ++i) {
        if (current.alpha[v][cands[i]] == Rational(1)) {
          chosen = cands[i];
          break;
        }
        BlpResult r = jobs[i].get();
        ++res.lp_solves;
        if (r.value == ExtRat(vstar)) {
          chosen = cands[i];
          current = std::move(*r.solution);
        }
      }
    } else {
      for (Label d : cands) {
        if (current.alpha[v][d] == Rational(1)) {
          // the current optimum already satisfies the pin
          chosen = d;
          break;
        }
        auto [l2, i2] = with_pin(d);
        BlpResult r = blp_value(l2, i2, opts.caps);
        ++res.lp_solves;
        if (r.value == ExtRat(vstar)) {
          chosen = d;
          current = std::move(*r.solution);
          break;
        }
      }
    }
    if (!chosen) {
      std::ostringstream os;
      os << "self-reduction dead end at variable " << v << ": no label keeps the relaxation value " << vstar;
      res.diagnostics = os.str();
      res.certified = false;
      return res;
    }
    x[v] = *chosen;
    work_lang.add_or_reuse(unary_set_fn(pin_name(*chosen), k, {*chosen}));
    work.add(pin_name(*chosen), {v});
  }
  res.assignment = x;
  ExtRat achieved = evaluate(lang, inst, x);
  res.certified = achieved == ExtRat(vstar);
  if (!res.certified)
    res.diagnostics = "assignment evaluates to " + achieved.to_string() + ", relaxation value is " + vstar.to_string();
  return res;
}

}  // namespace vcsp

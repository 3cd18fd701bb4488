#pragma once

// Crisp feasibility: Feas(I), a backtracking CSP solver with generalized arc
// consistency, supported labels D_v, and the (1,inf)-minimal instance.

#include <algorithm>
#include <cstddef>
#include <future>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "vcsp/model.hpp"

namespace vcsp {

/// D_v per variable.
using SupportedLabels = std::vector<std::set<Label>>;

inline std::pair<Language, Instance> feas_instance(const Language& lang, const Instance& inst) {
  validate(lang, inst);
  return {feas_language(lang), inst};
}

namespace detail {

using Domains = std::vector<std::vector<char>>;

/// Constraint tables flattened once; reused across probes.
class CspModel {
 public:
  CspModel(const Language& lang, const Instance& inst) : k_(lang.domain_size()), n_(inst.num_vars) {
    validate(lang, inst);
    cons_.reserve(inst.constraints.size());
    watch_.resize(n_);
    for (std::size_t t = 0; t < inst.constraints.size(); ++t) {
      const auto& c = inst.constraints[t];
      Con con;
      con.scope = c.scope;
      for (const auto& [x, v] : lang.at(c.fn).entries()) con.tuples.push_back(x);
      cons_.push_back(std::move(con));
      std::vector<int> vars = c.scope;
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
      for (int v : vars) watch_[v].push_back(t);
    }
  }

  int num_vars() const { return n_; }
  int domain_size() const { return k_; }

  Domains full_domains() const { return Domains(n_, std::vector<char>(k_, 1)); }

  /// Lexicographically least solution within `doms`, if any.
  std::optional<Assignment> solve(Domains doms) const {
    std::vector<std::size_t> all(cons_.size());
    for (std::size_t t = 0; t < all.size(); ++t) all[t] = t;
    if (!propagate(doms, all)) return std::nullopt;
    return search(doms);
  }

 private:
  struct Con {
    std::vector<int> scope;
    std::vector<Tuple> tuples;
  };

  bool valid(const Con& c, const Tuple& x, const Domains& doms) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!doms[c.scope[i]][x[i]]) return false;
      for (std::size_t j = 0; j < i; ++j)
        if (c.scope[j] == c.scope[i] && x[j] != x[i]) return false;
    }
    return true;
  }

  // Removes every label without a support; false on a wipe-out.
  bool propagate(Domains& doms, std::vector<std::size_t> queue) const {
    std::vector<char> queued(cons_.size(), 0);
    for (std::size_t t : queue) queued[t] = 1;
    std::vector<std::vector<char>> seen;
    while (!queue.empty()) {
      std::size_t t = queue.back();
      queue.pop_back();
      queued[t] = 0;
      const Con& c = cons_[t];
      seen.assign(c.scope.size(), std::vector<char>(k_, 0));
      for (const Tuple& x : c.tuples)
        if (valid(c, x, doms))
          for (std::size_t i = 0; i < x.size(); ++i) seen[i][x[i]] = 1;
      for (std::size_t i = 0; i < c.scope.size(); ++i) {
        int v = c.scope[i];
        bool changed = false, any = false;
        for (Label a = 0; a < k_; ++a) {
          if (doms[v][a] && !seen[i][a]) {
            doms[v][a] = 0;
            changed = true;
          }
          any = any || doms[v][a];
        }
        if (!any) return false;
        if (!changed) continue;
        for (std::size_t t2 : watch_[v])
          if (!queued[t2] && t2 != t) {
            queued[t2] = 1;
            queue.push_back(t2);
          }
      }
    }
    return true;
  }

  std::optional<Assignment> search(const Domains& doms) const {
    int branch = -1;
    for (int v = 0; v < n_; ++v)
      if (std::count(doms[v].begin(), doms[v].end(), 1) > 1) {
        branch = v;
        break;
      }
    if (branch < 0) {
      Assignment x(n_);
      for (int v = 0; v < n_; ++v)
        x[v] = static_cast<Label>(std::find(doms[v].begin(), doms[v].end(), 1) - doms[v].begin());
      return x;
    }
    for (Label a = 0; a < k_; ++a) {
      if (!doms[branch][a]) continue;
      Domains next = doms;
      std::fill(next[branch].begin(), next[branch].end(), 0);
      next[branch][a] = 1;
      if (!propagate(next, watch_[branch])) continue;
      if (auto x = search(next)) return x;
    }
    return std::nullopt;
  }

  int k_;
  int n_;
  std::vector<Con> cons_;
  std::vector<std::vector<std::size_t>> watch_;
};

}  // namespace detail

/// Lexicographically least assignment (variables 0..n-1, labels ascending)
/// with every constraint tuple inside dom f, or nullopt.
inline std::optional<Assignment> solve_csp(const Language& lang, const Instance& inst) {
  detail::CspModel model(lang, inst);
  return model.solve(model.full_domains());
}

/// D_v = labels taken by v in some feasible assignment. Each found solution
/// marks all of its (variable, label) pairs, so most probes are skipped.
/// Probes for different variables may run on up to `threads` workers.
inline SupportedLabels supported_labels(const Language& lang, const Instance& inst, unsigned threads = 1) {
  detail::CspModel model(lang, inst);
  const int n = inst.num_vars, k = lang.domain_size();
  SupportedLabels out(n);
  auto first = model.solve(model.full_domains());
  if (!first) return out;

  auto probe_vars = [&](const std::vector<int>& vars, std::vector<std::vector<char>>& mark) {
    for (int v : vars)
      for (Label d = 0; d < k; ++d) {
        if (mark[v][d]) continue;
        auto doms = model.full_domains();
        std::fill(doms[v].begin(), doms[v].end(), 0);
        doms[v][d] = 1;
        if (auto x = model.solve(std::move(doms)))
          for (int u = 0; u < n; ++u) mark[u][(*x)[u]] = 1;
      }
  };

  std::vector<std::vector<char>> mark(n, std::vector<char>(k, 0));
  for (int u = 0; u < n; ++u) mark[u][(*first)[u]] = 1;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1))));
  if (threads == 1) {
    std::vector<int> vars(n);
    for (int v = 0; v < n; ++v) vars[v] = v;
    probe_vars(vars, mark);
  } else {
    std::vector<std::vector<std::vector<char>>> marks(threads, mark);
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < threads; ++w) {
      std::vector<int> vars;
      for (int v = static_cast<int>(w); v < n; v += static_cast<int>(threads)) vars.push_back(v);
      jobs.push_back(std::async(std::launch::async, [&, w, vars] { probe_vars(vars, marks[w]); }));
    }
    for (auto& j : jobs) j.get();
    for (const auto& m : marks)
      for (int u = 0; u < n; ++u)
        for (Label d = 0; d < k; ++d) mark[u][d] = mark[u][d] || m[u][d];
  }
  for (int v = 0; v < n; ++v)
    for (Label d = 0; d < k; ++d)
      if (mark[v][d]) out[v].insert(d);
  return out;
}

struct MinimalInstance {
  Language lang;
  Instance inst;
  SupportedLabels supported;
};

/// Adds u_{D_v}(x_v) for every variable. The unary functions get reserved
/// names derived from D_v and are shared between variables with equal D_v.
inline MinimalInstance one_infty_minimize(const Language& lang, const Instance& inst, unsigned threads = 1) {
  MinimalInstance out{lang, inst, supported_labels(lang, inst, threads)};
  for (int v = 0; v < inst.num_vars; ++v) {
    const auto& dv = out.supported[v];
    std::string name = support_name(dv);
    out.lang.add_or_reuse(unary_set_fn(name, lang.domain_size(), dv));
    out.inst.add(name, {v});
  }
  return out;
}

}  // namespace vcsp

#pragma once

// Generalized operations D^m -> D^m and the graph they generate.
//
// A GenOp is m operations of arity m applied jointly. Nodes of the graph are
// the maps reachable from the identity by left composition with generators;
// an edge g -> s o g carries the generator weight.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/algebra.hpp"
#include "vcsp/blp.hpp"
#include "vcsp/caps.hpp"
#include "vcsp/exactlp.hpp"

namespace vcsp {

class GenOp {
 public:
  explicit GenOp(std::vector<Operation> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw std::invalid_argument("GenOp needs at least one component");
    const int m = static_cast<int>(comps_.size()), k = comps_[0].domain_size();
    for (const auto& c : comps_)
      if (c.arity() != m || c.domain_size() != k) throw std::invalid_argument("GenOp components must all be m-ary over one domain");
  }

  static GenOp identity(int k, int m) {
    std::vector<Operation> c;
    for (int i = 0; i < m; ++i) c.push_back(Operation::projection(k, m, i));
    return GenOp(std::move(c));
  }

  /// (s(x without x_1), ..., s(x without x_m)) for an (m-1)-ary s.
  static GenOp drop_one(const Operation& s) {
    const int k = s.domain_size(), m = s.arity() + 1;
    std::vector<Operation> c;
    Tuple rest(m - 1);
    for (int i = 0; i < m; ++i)
      c.push_back(Operation::from_fn(k, m, [&](const Tuple& x) {
        for (int j = 0, r = 0; j < m; ++j)
          if (j != i) rest[r++] = x[j];
        return s(rest);
      }));
    return GenOp(std::move(c));
  }

  int domain_size() const { return comps_[0].domain_size(); }
  int arity() const { return static_cast<int>(comps_.size()); }
  const std::vector<Operation>& components() const { return comps_; }
  const Operation& operator[](int i) const { return comps_[i]; }

  /// Image of one column a in D^m.
  Tuple operator()(const Tuple& a) const {
    Tuple out(comps_.size());
    for (std::size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i](a);
    return out;
  }

  /// Image of m tuples, column by column.
  std::vector<Tuple> apply(std::span<const Tuple* const> xs) const {
    std::vector<Tuple> out(comps_.size());
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i].apply(xs, out[i]);
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < comps_.size(); ++i) s += (i ? " | " : "") + comps_[i].to_string();
    return s;
  }

  friend bool operator==(const GenOp&, const GenOp&) = default;
  friend auto operator<=>(const GenOp&, const GenOp&) = default;

 private:
  std::vector<Operation> comps_;
};

/// g o h
inline GenOp compose(const GenOp& g, const GenOp& h) {
  if (g.arity() != h.arity() || g.domain_size() != h.domain_size())
    throw std::invalid_argument("composing GenOps of different shape");
  const int k = g.domain_size(), m = g.arity();
  std::vector<std::vector<Label>> tables(m);
  for_each_tuple(k, m, [&](const Tuple& a) {
    Tuple b = h(a);
    for (int i = 0; i < m; ++i) tables[i].push_back(g[i](b));
  });
  std::vector<Operation> comps;
  for (auto& t : tables) comps.emplace_back(k, m, std::move(t));
  return GenOp(std::move(comps));
}

struct GenFracOp {
  int domain_size = 0;
  int arity = 0;
  std::vector<std::pair<GenOp, Rational>> support;

  static GenFracOp point(GenOp g) {
    GenFracOp r{g.domain_size(), g.arity(), {}};
    r.support.emplace_back(std::move(g), Rational(1));
    return r;
  }

  /// Generators drop_one(s) weighted by w(s).
  static GenFracOp from_fracop(const FracOp& w) {
    GenFracOp r{w.domain_size, w.arity + 1, {}};
    for (const auto& [s, p] : w.support) r.support.emplace_back(GenOp::drop_one(s), p);
    r.normalize();
    return r;
  }

  void normalize() {
    std::map<GenOp, Rational> acc;
    for (auto& [g, p] : support) acc[g] += p;
    support.clear();
    for (auto& [g, p] : acc)
      if (!p.is_zero()) support.emplace_back(g, p);
  }

  bool is_distribution() const {
    Rational sum;
    for (const auto& [g, p] : support) {
      if (p.sign() <= 0 || g.arity() != arity || g.domain_size() != domain_size) return false;
      sum += p;
    }
    return !support.empty() && sum == Rational(1);
  }

  Rational weight(const GenOp& g) const {
    for (const auto& [h, p] : support)
      if (h == g) return p;
    return Rational(0);
  }
};

/// sum_g rho(g) f^m(g(x)) <= f^m(x) for all f and x in (dom f)^m, where
/// f^m(x) = f(x^1) + ... + f(x^m).
inline bool verify_gen_fracpol(const GenFracOp& rho, const Language& lang) {
  if (rho.domain_size != lang.domain_size()) throw std::invalid_argument("GenFracOp and language domains differ");
  if (!rho.is_distribution()) return false;
  const int m = rho.arity;
  std::vector<const Tuple*> fam(m);
  for (const auto& [name, f] : lang.functions()) {
    auto tuples = detail::dom_tuples(f);
    bool ok = detail::for_each_family(tuples.size(), m, [&](const std::vector<std::size_t>& idx) {
      Rational rhs;
      for (int i = 0; i < m; ++i) {
        fam[i] = &tuples[idx[i]];
        rhs += *f.find(tuples[idx[i]]);
      }
      Rational lhs;
      for (const auto& [g, p] : rho.support) {
        for (const Tuple& y : g.apply(fam)) {
          const Rational* fy = f.find(y);
          if (!fy) return false;
          lhs += p * *fy;
        }
      }
      return lhs <= rhs;
    });
    if (!ok) return false;
  }
  return true;
}

/// rho' = sum_g rho(g) (1/m)(chi_{g_1} + ... + chi_{g_m})
inline FracOp to_fracop(const GenFracOp& rho) {
  FracOp w{rho.domain_size, rho.arity, {}};
  const Rational inv_m(1, rho.arity);
  for (const auto& [g, p] : rho.support)
    for (const auto& c : g.components()) w.support.emplace_back(c, p * inv_m);
  w.normalize();
  return w;
}

struct OpGraph {
  struct Edge {
    std::size_t from;
    std::size_t to;
    std::size_t generator;  ///< index into generators.support
    Rational weight;
  };

  GenFracOp generators;
  std::vector<GenOp> nodes;            ///< BFS order, node 0 is the identity
  std::map<GenOp, std::size_t> index;
  std::vector<Edge> edges;             ///< one per (node, generator), grouped by node
  std::vector<std::size_t> scc;        ///< component id per node
  std::vector<bool> scc_is_sink;
  std::map<std::pair<std::size_t, std::size_t>, Rational> weights;  ///< w(g, h)

  std::size_t size() const { return nodes.size(); }
  std::optional<std::size_t> find(const GenOp& g) const {
    auto it = index.find(g);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  bool in_sink(std::size_t v) const { return scc_is_sink[scc[v]]; }
  std::vector<std::size_t> sink_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < nodes.size(); ++v)
      if (in_sink(v)) out.push_back(v);
    return out;
  }
  std::size_t num_sccs() const { return scc_is_sink.size(); }
};

namespace detail {

/// Iterative Tarjan; components renumbered by their smallest node.
inline void condense(OpGraph& G) {
  const std::size_t n = G.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : G.edges) adj[e.from].push_back(e.to);
  const std::size_t NONE = SIZE_MAX;
  std::vector<std::size_t> idx(n, NONE), low(n, 0), comp(n, NONE), stack;
  std::vector<bool> on_stack(n, false);
  std::size_t counter = 0, ncomp = 0;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // node, next child position
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] != NONE) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos == 0 && idx[v] == NONE) {
        idx[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (pos < adj[v].size()) {
        std::size_t w = adj[v][pos++];
        if (idx[w] == NONE) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      if (low[v] == idx[v]) {
        while (true) {
          std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
      std::size_t done = v;
      call.pop_back();
      if (!call.empty()) {
        std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  std::vector<std::size_t> renum(ncomp, NONE);
  std::size_t next = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (renum[comp[v]] == NONE) renum[comp[v]] = next++;
  G.scc.resize(n);
  for (std::size_t v = 0; v < n; ++v) G.scc[v] = renum[comp[v]];
  G.scc_is_sink.assign(ncomp, true);
  for (const auto& e : G.edges)
    if (G.scc[e.from] != G.scc[e.to]) G.scc_is_sink[G.scc[e.from]] = false;
}

}  // namespace detail

/// BFS closure of the identity under g -> s o g for every generator s.
inline OpGraph build_graph(const GenFracOp& generators, const Caps& caps = {}) {
  if (!generators.is_distribution()) throw std::invalid_argument("generators must form a distribution");
  OpGraph G;
  G.generators = generators;
  G.generators.normalize();
  const auto& gens = G.generators.support;
  auto add = [&](GenOp g) {
    auto [it, fresh] = G.index.emplace(g, G.nodes.size());
    if (fresh) {
      Caps::check("graph_nodes", G.nodes.size() + 1, caps.graph_nodes);
      G.nodes.push_back(std::move(g));
    }
    return it->second;
  };
  add(GenOp::identity(generators.domain_size, generators.arity));
  for (std::size_t v = 0; v < G.nodes.size(); ++v)
    for (std::size_t s = 0; s < gens.size(); ++s) {
      std::size_t to = add(compose(gens[s].first, G.nodes[v]));
      G.edges.push_back({v, to, s, gens[s].second});
      G.weights[{v, to}] += gens[s].second;
    }
  detail::condense(G);
  return G;
}

inline void dump_graph(std::ostream& os, const OpGraph& G) {
  os << "graph k " << G.generators.domain_size << " m " << G.generators.arity << " nodes " << G.size() << " edges "
     << G.edges.size() << "\n";
  for (std::size_t s = 0; s < G.generators.support.size(); ++s)
    os << "generator " << s << " weight " << G.generators.support[s].second << " : "
       << G.generators.support[s].first.to_string() << "\n";
  for (std::size_t v = 0; v < G.size(); ++v) os << "node " << v << " : " << G.nodes[v].to_string() << "\n";
  for (const auto& e : G.edges)
    os << "edge " << e.from << " " << e.to << " generator " << e.generator << " weight " << e.weight << "\n";
  std::vector<std::vector<std::size_t>> members(G.num_sccs());
  for (std::size_t v = 0; v < G.size(); ++v) members[G.scc[v]].push_back(v);
  for (std::size_t c = 0; c < members.size(); ++c) {
    os << "scc " << c << " sink " << (G.scc_is_sink[c] ? 1 : 0) << " :";
    for (std::size_t v : members[c]) os << " " << v;
    os << "\n";
  }
}

struct ExpandOptions {
  /// Passes of phase B over the off-target nodes.
  int rebalance_rounds = 8;
  /// Called with rho after every update.
  std::function<void(const GenFracOp&)> on_step;
};

struct ExpandResult {
  GenFracOp rho;
  std::size_t growth_updates = 0;     ///< phase A
  std::size_t rebalance_updates = 0;  ///< phase B
  Rational residual;                  ///< mass outside the target
};

/// Phase A applies rho[g] = rho + (rho(g)/2)(-chi_g + sum_s w(s) chi_{s o g})
/// at nodes in BFS order until the target is inside the support; phase B
/// repeats the update at every off-target node carrying mass. Each update
/// keeps the total mass and the generalized inequality.
inline ExpandResult expand_support(const OpGraph& G, const GenFracOp& rho0, const std::set<std::size_t>& target,
                                   const ExpandOptions& opts = {}) {
  const std::size_t n = G.size();
  for (std::size_t t : target)
    if (t >= n) throw std::invalid_argument("target node outside the graph");
  // hypothesis: every node reaches the target
  {
    std::vector<std::vector<std::size_t>> radj(n);
    for (const auto& e : G.edges) radj[e.to].push_back(e.from);
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> queue(target.begin(), target.end());
    for (std::size_t t : target) seen[t] = true;
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (std::size_t u : radj[queue[q]])
        if (!seen[u]) {
          seen[u] = true;
          queue.push_back(u);
        }
    for (std::size_t v = 0; v < n; ++v)
      if (!seen[v]) throw std::invalid_argument("node " + std::to_string(v) + " cannot reach the target");
  }

  std::vector<Rational> rho(n);
  for (const auto& [g, p] : rho0.support) {
    auto v = G.find(g);
    if (!v) throw std::invalid_argument("initial rho has support outside the graph");
    rho[*v] += p;
  }
  auto snapshot = [&] {
    GenFracOp r{G.generators.domain_size, G.generators.arity, {}};
    for (std::size_t v = 0; v < n; ++v)
      if (rho[v].sign() > 0) r.support.emplace_back(G.nodes[v], rho[v]);
    r.normalize();
    return r;
  };
  std::vector<std::vector<const OpGraph::Edge*>> out(n);
  for (const auto& e : G.edges) out[e.from].push_back(&e);
  auto update = [&](std::size_t v) {
    Rational half = rho[v] * Rational(1, 2);
    rho[v] -= half;
    for (const auto* e : out[v]) rho[e->to] += half * e->weight;
    if (opts.on_step) opts.on_step(snapshot());
  };
  auto covered = [&] {
    return std::all_of(target.begin(), target.end(), [&](std::size_t t) { return rho[t].sign() > 0; });
  };

  ExpandResult res;
  for (std::size_t v = 0; v < n && !covered(); ++v) {
    if (rho[v].sign() == 0) continue;
    bool grows = std::any_of(out[v].begin(), out[v].end(), [&](const auto* e) { return rho[e->to].sign() == 0; });
    if (!grows) continue;
    update(v);
    ++res.growth_updates;
  }
  if (!covered()) throw std::invalid_argument("target not reachable from the support of rho");
  for (int r = 0; r < opts.rebalance_rounds; ++r)
    for (std::size_t v = 0; v < n; ++v)
      if (!target.count(v) && rho[v].sign() > 0) {
        update(v);
        ++res.rebalance_updates;
      }
  for (std::size_t v = 0; v < n; ++v)
    if (!target.count(v)) res.residual += rho[v];
  res.rho = snapshot();
  return res;
}

struct StationaryResult {
  std::vector<std::size_t> nodes;  ///< the sink nodes, ascending
  std::vector<Rational> lambda;    ///< aligned with nodes
};

/// lambda >= 0 over the sink nodes with sum 1 and, for every sink node h,
/// sum_g w(g, h) lambda_g = lambda_h. Verified by substitution.
inline StationaryResult stationary_lambda(const OpGraph& G, const Caps& caps = {}) {
  StationaryResult res;
  res.nodes = G.sink_nodes();
  const std::size_t n = res.nodes.size();
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos[res.nodes[i]] = i;
  lp::LinearProgram lp(n);
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (const auto& [gh, w] : G.weights) {
    auto a = pos.find(gh.first), b = pos.find(gh.second);
    if (a != pos.end() && b != pos.end()) rows[b->second][a->second] += w;
  }
  for (std::size_t h = 0; h < n; ++h) {
    rows[h][h] -= Rational(1);
    lp.add_row(rows[h], lp::Relation::Equal, Rational(0));
  }
  lp.add_row(std::vector<Rational>(n, Rational(1)), lp::Relation::Equal, Rational(1));
  auto out = lp::solve_lp(lp, caps);
  const auto* opt = std::get_if<lp::Optimal>(&out);
  if (!opt) throw CertificationError("stationary system has no solution");
  res.lambda = opt->primal;
  Rational total;
  for (std::size_t g = 0; g < n; ++g) {
    if (res.lambda[g].sign() < 0) throw CertificationError("negative stationary weight");
    total += res.lambda[g];
  }
  for (std::size_t h = 0; h < n; ++h) {
    Rational r;
    for (std::size_t g = 0; g < n; ++g) r += rows[h][g] * res.lambda[g];
    if (!r.is_zero()) throw CertificationError("stationary residual is not zero");
  }
  if (total != Rational(1)) throw CertificationError("stationary weights do not sum to 1");
  return res;
}

}  // namespace vcsp

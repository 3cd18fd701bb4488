#pragma once

// Operations, polymorphisms, fractional polymorphisms and rigid cores.
//
// A fractional polymorphism of arity m is a distribution w over m-ary
// operations with, for every f and x^1..x^m in dom f,
//
//   m * sum_g w(g) f(g(x^1, ..., x^m))  <=  f(x^1) + ... + f(x^m)
//
// where g acts coordinatewise on the tuples.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/caps.hpp"
#include "vcsp/exactlp.hpp"
#include "vcsp/model.hpp"

namespace vcsp {

/// Total table D^m -> D. The first argument is the most significant digit
/// of the table index.
class Operation {
 public:
  Operation(int domain_size, int arity, std::vector<Label> table)
      : k_(domain_size), m_(arity), table_(std::move(table)) {
    if (k_ < 1 || m_ < 1) throw std::invalid_argument("operation needs k >= 1 and arity >= 1");
    if (table_.size() != checked_pow(k_, m_)) throw std::invalid_argument("operation table has wrong size");
    for (Label a : table_)
      if (a < 0 || a >= k_) throw std::invalid_argument("operation value outside domain");
  }

  template <class Fn>
  static Operation from_fn(int k, int m, Fn&& fn) {
    std::vector<Label> table;
    table.reserve(checked_pow(k, m));
    for_each_tuple(k, m, [&](const Tuple& x) { table.push_back(static_cast<Label>(fn(x))); });
    return Operation(k, m, std::move(table));
  }
  static Operation projection(int k, int m, int i) {
    return from_fn(k, m, [i](const Tuple& x) { return x[i]; });
  }
  static Operation identity(int k) { return projection(k, 1, 0); }
  static Operation constant(int k, int m, Label c) {
    return from_fn(k, m, [c](const Tuple&) { return c; });
  }

  int domain_size() const { return k_; }
  int arity() const { return m_; }
  const std::vector<Label>& table() const { return table_; }

  std::size_t index(std::span<const Label> args) const {
    std::size_t idx = 0;
    for (Label a : args) idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>(a);
    return idx;
  }
  Label operator()(std::span<const Label> args) const { return table_[index(args)]; }
  Label operator()(std::initializer_list<Label> args) const {
    return (*this)(std::span<const Label>(args.begin(), args.size()));
  }

  /// Coordinatewise image of m tuples of equal length n.
  void apply(std::span<const Tuple* const> xs, Tuple& out) const {
    const std::size_t n = xs[0]->size();
    out.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t idx = 0;
      for (int i = 0; i < m_; ++i) idx = idx * static_cast<std::size_t>(k_) + static_cast<std::size_t>((*xs[i])[j]);
      out[j] = table_[idx];
    }
  }

  std::set<Label> image() const { return {table_.begin(), table_.end()}; }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(table_[i]);
    }
    return s;
  }

  friend bool operator==(const Operation&, const Operation&) = default;
  friend auto operator<=>(const Operation&, const Operation&) = default;

 private:
  int k_;
  int m_;
  std::vector<Label> table_;
};

struct OperationFlags {
  bool idempotent = false;
  bool cyclic = false;
  bool symmetric = false;
};

inline OperationFlags check_idempotent_cyclic_symmetric(const Operation& g) {
  const int k = g.domain_size(), m = g.arity();
  OperationFlags fl{true, true, true};
  for (Label a = 0; a < k; ++a)
    if (g(Tuple(m, a)) != a) fl.idempotent = false;
  for_each_tuple(k, m, [&](const Tuple& x) {
    Tuple rot(x.begin() + 1, x.end());
    rot.push_back(x[0]);
    Tuple swap = x;
    if (m >= 2) std::swap(swap[0], swap[1]);
    Label v = g(x);
    if (g(rot) != v) fl.cyclic = false;
    if (g(rot) != v || g(swap) != v) fl.symmetric = false;  // rotation and one transposition generate S_m
  });
  return fl;
}

/// A probability distribution over operations of one arity and domain.
struct FracOp {
  int domain_size = 0;
  int arity = 0;
  std::vector<std::pair<Operation, Rational>> support;  // sorted by operation, weights > 0

  static FracOp point(Operation g) {
    FracOp w{g.domain_size(), g.arity(), {}};
    w.support.emplace_back(std::move(g), Rational(1));
    return w;
  }

  /// Merges duplicates, drops zero weights, sorts.
  void normalize() {
    std::map<Operation, Rational> acc;
    for (auto& [g, w] : support) acc[g] += w;
    support.clear();
    for (auto& [g, w] : acc)
      if (!w.is_zero()) support.emplace_back(g, w);
  }

  bool is_distribution() const {
    Rational sum;
    for (const auto& [g, w] : support) {
      if (w.sign() <= 0 || g.arity() != arity || g.domain_size() != domain_size) return false;
      sum += w;
    }
    return !support.empty() && sum == Rational(1);
  }

  Rational weight(const Operation& g) const {
    for (const auto& [h, w] : support)
      if (h == g) return w;
    return Rational(0);
  }

  /// t*a + (1-t)*b
  static FracOp mix(const FracOp& a, const FracOp& b, const Rational& t) {
    if (a.arity != b.arity || a.domain_size != b.domain_size) throw std::invalid_argument("mixing incompatible FracOps");
    FracOp out{a.domain_size, a.arity, {}};
    for (const auto& [g, w] : a.support) out.support.emplace_back(g, w * t);
    Rational s = Rational(1) - t;
    for (const auto& [g, w] : b.support) out.support.emplace_back(g, w * s);
    out.normalize();
    return out;
  }

  friend bool operator==(const FracOp&, const FracOp&) = default;
};

namespace detail {

inline std::vector<Tuple> dom_tuples(const CostFn& f) {
  std::vector<Tuple> out;
  out.reserve(f.dom_size());
  for (const auto& [x, v] : f.entries()) out.push_back(x);
  return out;
}

/// Calls fn(indices) for every m-tuple of indices into [0, n).
template <class Fn>
bool for_each_family(std::size_t n, int m, Fn&& fn) {
  if (n == 0) return true;
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    if (!fn(std::as_const(idx))) return false;
    int i = m - 1;
    while (i >= 0 && idx[i] == n - 1) idx[i--] = 0;
    if (i < 0) return true;
    ++idx[i];
  }
}

}  // namespace detail

/// Every dom f is closed under g applied coordinatewise.
inline bool is_polymorphism(const Operation& g, const Language& lang) {
  if (g.domain_size() != lang.domain_size()) throw std::invalid_argument("operation and language domains differ");
  const int m = g.arity();
  std::vector<const Tuple*> fam(m);
  Tuple img;
  for (const auto& [name, f] : lang.functions()) {
    auto tuples = detail::dom_tuples(f);
    bool ok = detail::for_each_family(tuples.size(), m, [&](const std::vector<std::size_t>& idx) {
      for (int i = 0; i < m; ++i) fam[i] = &tuples[idx[i]];
      g.apply(fam, img);
      return f.in_dom(img);
    });
    if (!ok) return false;
  }
  return true;
}

/// Exact check of the averaged inequality over every family in dom f.
inline bool verify_fracpol(const FracOp& w, const Language& lang) {
  if (w.domain_size != lang.domain_size()) throw std::invalid_argument("FracOp and language domains differ");
  if (!w.is_distribution()) return false;
  const int m = w.arity;
  const Rational mm(static_cast<long>(m));
  std::vector<const Tuple*> fam(m);
  Tuple img;
  for (const auto& [name, f] : lang.functions()) {
    auto tuples = detail::dom_tuples(f);
    std::vector<const Rational*> vals;
    for (const auto& x : tuples) vals.push_back(f.find(x));
    bool ok = detail::for_each_family(tuples.size(), m, [&](const std::vector<std::size_t>& idx) {
      Rational rhs;
      for (int i = 0; i < m; ++i) {
        fam[i] = &tuples[idx[i]];
        rhs += *vals[idx[i]];
      }
      Rational lhs;
      for (const auto& [g, p] : w.support) {
        g.apply(fam, img);
        const Rational* fy = f.find(img);
        if (!fy) return false;
        lhs += p * *fy;
      }
      return lhs * mm <= rhs;
    });
    if (!ok) return false;
  }
  return true;
}

enum class OpClass { All, Cyclic, Symmetric };

inline const char* to_string(OpClass c) {
  switch (c) {
    case OpClass::All: return "all";
    case OpClass::Cyclic: return "cyclic";
    case OpClass::Symmetric: return "symmetric";
  }
  return "?";
}

inline OpClass parse_op_class(std::string_view s) {
  if (s == "all") return OpClass::All;
  if (s == "cyclic") return OpClass::Cyclic;
  if (s == "symmetric") return OpClass::Symmetric;
  throw std::invalid_argument("unknown operation class '" + std::string(s) + "'");
}

namespace detail {

/// Canonical representative of a tuple under the class group acting on positions.
inline Tuple canonical_positions(const Tuple& x, OpClass cls) {
  if (cls == OpClass::All) return x;
  if (cls == OpClass::Symmetric) {
    Tuple s = x;
    std::sort(s.begin(), s.end());
    return s;
  }
  Tuple best = x, rot = x;
  for (std::size_t r = 1; r < x.size(); ++r) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

inline bool is_canonical_family(const std::vector<std::size_t>& idx, OpClass cls) {
  if (cls == OpClass::All) return true;
  if (cls == OpClass::Symmetric) return std::is_sorted(idx.begin(), idx.end());
  std::vector<std::size_t> rot = idx;
  for (std::size_t r = 1; r < idx.size(); ++r) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < idx) return false;
  }
  return true;
}

}  // namespace detail

/// Number of operations enumerate_ops would produce (saturating).
inline std::size_t count_ops(int k, int m, OpClass cls) {
  std::set<Tuple> orbits;
  if (checked_pow(k, m) > 10'000'000) return SIZE_MAX;
  for_each_tuple(k, m, [&](const Tuple& x) { orbits.insert(detail::canonical_positions(x, cls)); });
  return checked_pow(k, orbits.size());
}

/// One operation per assignment of values to orbit representatives, in
/// lexicographic order of those values.
inline std::vector<Operation> enumerate_ops(int k, int m, OpClass cls, const Caps& caps = {}) {
  if (k < 1 || m < 1) throw std::invalid_argument("enumerate_ops needs k >= 1 and m >= 1");
  Caps::check("fracpol_vars", count_ops(k, m, cls), caps.fracpol_vars);
  std::map<Tuple, std::size_t, TupleLess> orbit_of;
  std::vector<std::size_t> tuple_orbit;
  for_each_tuple(k, m, [&](const Tuple& x) {
    Tuple c = detail::canonical_positions(x, cls);
    auto it = orbit_of.find(c);
    if (it == orbit_of.end()) it = orbit_of.emplace(c, orbit_of.size()).first;
    tuple_orbit.push_back(it->second);
  });
  // orbit numbering follows first appearance, which is the representative order
  std::vector<Operation> out;
  const std::size_t r = orbit_of.size();
  std::vector<Label> vals(r, 0);
  while (true) {
    std::vector<Label> table(tuple_orbit.size());
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = vals[tuple_orbit[i]];
    out.emplace_back(k, m, std::move(table));
    std::size_t i = r;
    while (i > 0 && vals[i - 1] == k - 1) vals[--i] = 0;
    if (i == 0) break;
    ++vals[i - 1];
  }
  return out;
}

struct FracpolSearch {
  std::optional<FracOp> fracop;
  std::optional<std::vector<Rational>> farkas;  ///< certificate for `lp` when none exists
  lp::LinearProgram lp;                         ///< the feasibility system (columns = candidates)
  std::vector<Operation> candidates;            ///< class operations that preserve every dom f
  std::size_t enumerated = 0;
  std::size_t families = 0;
  std::size_t lp_solves = 0;
};

struct FracpolOptions {
  /// Grow the support to the union of all feasible supports.
  bool max_support = false;
  Caps caps;
};

namespace detail {

/// Builds sum w = 1 plus one inequality per canonical family whose
/// coefficients can exceed its right-hand side; identical rows are merged.
inline lp::LinearProgram fracpol_system(const Language& lang, int m, OpClass cls,
                                        const std::vector<Operation>& cands, const Caps& caps,
                                        std::size_t* families_out) {
  const std::size_t ncols = cands.size();
  lp::LinearProgram lp(ncols);
  lp.add_row(std::vector<Rational>(ncols, Rational(1)), lp::Relation::Equal, Rational(1));
  std::set<std::vector<Rational>> seen;
  std::size_t families = 0;
  const Rational mm(static_cast<long>(m));
  std::vector<const Tuple*> fam(m);
  Tuple img;
  for (const auto& [name, f] : lang.functions()) {
    auto tuples = dom_tuples(f);
    for_each_family(tuples.size(), m, [&](const std::vector<std::size_t>& idx) {
      if (!is_canonical_family(idx, cls)) return true;
      Caps::check("fracpol_rows", ++families, caps.fracpol_rows);
      Rational rhs;
      for (int i = 0; i < m; ++i) {
        fam[i] = &tuples[idx[i]];
        rhs += *f.find(tuples[idx[i]]);
      }
      std::vector<Rational> row(ncols + 1);
      bool binding = false;
      for (std::size_t c = 0; c < ncols; ++c) {
        cands[c].apply(fam, img);
        row[c] = *f.find(img) * mm;  // candidates preserve dom f
        if (row[c] > rhs) binding = true;
      }
      if (!binding) return true;
      row[ncols] = rhs;
      if (!seen.insert(row).second) return true;
      Caps::check("lp_cells", (lp.rows.size() + 1) * (ncols + lp.rows.size() + 2), caps.lp_cells);
      row.pop_back();
      lp.add_row(std::move(row), lp::Relation::LessEq, rhs);
      return true;
    });
  }
  if (families_out) *families_out = families;
  return lp;
}

inline FracOp fracop_from_primal(int k, int m, const std::vector<Operation>& cands, const std::vector<Rational>& x) {
  FracOp w{k, m, {}};
  for (std::size_t c = 0; c < cands.size(); ++c)
    if (x[c].sign() > 0) w.support.emplace_back(cands[c], x[c]);
  w.normalize();
  return w;
}

}  // namespace detail

/// Searches for a fractional polymorphism of arity m supported on class
/// operations. Returns a verified FracOp, or a Farkas certificate for the
/// system in `lp`.
inline FracpolSearch find_fracpol(const Language& lang, int m, OpClass cls, const FracpolOptions& opts = {}) {
  FracpolSearch res;
  const int k = lang.domain_size();
  auto all = enumerate_ops(k, m, cls, opts.caps);
  res.enumerated = all.size();
  Language feas = feas_language(lang);
  for (auto& g : all)
    if (is_polymorphism(g, feas)) res.candidates.push_back(std::move(g));
  res.lp = detail::fracpol_system(lang, m, cls, res.candidates, opts.caps, &res.families);
  auto out = lp::solve_lp(res.lp, opts.caps);
  ++res.lp_solves;
  if (auto* inf = std::get_if<lp::Infeasible>(&out)) {
    res.farkas = inf->farkas;
    return res;
  }
  FracOp w = detail::fracop_from_primal(k, m, res.candidates, std::get<lp::Optimal>(out).primal);
  if (opts.max_support) {
    while (true) {
      std::set<Operation> supp;
      for (const auto& [g, p] : w.support) supp.insert(g);
      lp::LinearProgram grow = res.lp;
      for (std::size_t c = 0; c < res.candidates.size(); ++c)
        grow.objective[c] = supp.count(res.candidates[c]) ? Rational(0) : Rational(-1);
      auto g2 = lp::solve_lp(grow, opts.caps);
      ++res.lp_solves;
      const auto& opt = std::get<lp::Optimal>(g2);
      if (opt.value.sign() == 0) break;
      w = FracOp::mix(w, detail::fracop_from_primal(k, m, res.candidates, opt.primal), Rational(1, 2));
    }
  }
  res.fracop = std::move(w);
  return res;
}

namespace detail {

/// Arity-1 system over every unary operation preserving all doms.
struct UnarySystem {
  std::vector<Operation> candidates;
  lp::LinearProgram lp;
};

inline UnarySystem unary_system(const Language& lang, const Caps& caps) {
  const int k = lang.domain_size();
  Caps::check("unary_ops", checked_pow(k, k), caps.unary_ops);
  Caps relaxed = caps;
  relaxed.fracpol_vars = std::max(caps.fracpol_vars, caps.unary_ops);
  UnarySystem sys;
  Language feas = feas_language(lang);
  for (auto& g : enumerate_ops(k, 1, OpClass::All, relaxed))
    if (is_polymorphism(g, feas)) sys.candidates.push_back(std::move(g));
  sys.lp = fracpol_system(lang, 1, OpClass::All, sys.candidates, caps, nullptr);
  return sys;
}

inline bool admits(const UnarySystem& sys, const Operation& g, const Caps& caps) {
  auto it = std::find(sys.candidates.begin(), sys.candidates.end(), g);
  if (it == sys.candidates.end()) return false;
  lp::LinearProgram lp = sys.lp;
  lp.objective[static_cast<std::size_t>(it - sys.candidates.begin())] = Rational(-1);
  auto out = lp::solve_lp(lp, caps);
  return std::get<lp::Optimal>(out).value.sign() < 0;  // identity keeps the system feasible
}

}  // namespace detail

/// Is g in the support of some arity-1 fractional polymorphism? Decided by
/// maximizing w(g) over that polytope.
inline bool unary_polplus_member(const Operation& g, const Language& lang, const Caps& caps = {}) {
  if (g.arity() != 1) throw std::invalid_argument("unary_polplus_member needs a unary operation");
  if (g.domain_size() != lang.domain_size()) throw std::invalid_argument("operation and language domains differ");
  auto sys = detail::unary_system(lang, caps);
  return detail::admits(sys, g, caps);
}

struct RigidCore {
  std::vector<Label> subdomain;  ///< D = g'(D'), ascending; core label i stands for subdomain[i]
  Operation retraction;          ///< the chosen g'
  Language core;
};

/// Restricts f to tuples inside `sub` and relabels by position in `sub`.
inline CostFn restrict_fn(const CostFn& f, const std::vector<Label>& sub) {
  std::vector<Label> to_new(f.domain_size(), -1);
  for (std::size_t i = 0; i < sub.size(); ++i) to_new[sub[i]] = static_cast<Label>(i);
  CostFn out(f.name(), f.arity(), static_cast<int>(sub.size()));
  Tuple y;
  for (const auto& [x, v] : f.entries()) {
    y.resize(x.size());
    bool inside = true;
    for (std::size_t i = 0; i < x.size() && inside; ++i) {
      y[i] = to_new[x[i]];
      inside = y[i] >= 0;
    }
    if (inside) out.set(y, ExtRat(v));
  }
  return out;
}

/// Picks the admitted unary g' with the smallest image (ties: least table),
/// restricts every function to g'(D) and adds every singleton u_d.
inline RigidCore rigid_core(const Language& lang, const Caps& caps = {}) {
  const int k = lang.domain_size();
  auto sys = detail::unary_system(lang, caps);
  std::vector<Operation> order = sys.candidates;
  std::stable_sort(order.begin(), order.end(), [](const Operation& a, const Operation& b) {
    auto ia = a.image().size(), ib = b.image().size();
    return ia != ib ? ia < ib : a < b;
  });
  std::optional<Operation> chosen;
  for (const auto& g : order)
    if (detail::admits(sys, g, caps)) {
      chosen = g;
      break;
    }
  if (!chosen) chosen = Operation::identity(k);  // unreachable: identity is always admitted
  auto img = chosen->image();
  RigidCore rc{std::vector<Label>(img.begin(), img.end()), *chosen, Language(static_cast<int>(img.size()))};
  for (const auto& [name, f] : lang.functions()) rc.core.add(restrict_fn(f, rc.subdomain));
  const int kc = static_cast<int>(rc.subdomain.size());
  for (Label d = 0; d < kc; ++d) rc.core.add_or_reuse(unary_set_fn(pin_name(d), kc, {d}));
  return rc;
}

inline std::string format_fracop(const FracOp& w) {
  std::string s;
  for (const auto& [g, p] : w.support) s += "  " + p.to_string() + " : " + g.to_string() + "\n";
  return s;
}

}  // namespace vcsp

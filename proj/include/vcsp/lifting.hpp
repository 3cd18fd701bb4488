#pragma once

// Block-finite lifting. Each variable v gets its own copy D'_v of its
// supported labels; the lifted language has one function per constraint
// restricted to those copies, its dom, a unary u_{D'_v} per variable and the
// equality relation.

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vcsp/algebra.hpp"
#include "vcsp/feasibility.hpp"
#include "vcsp/model.hpp"

namespace vcsp {

/// Bijection between lifted labels and (variable, original label) pairs.
/// Blocks follow variable order, labels ascend within a block.
class LiftedDomain {
 public:
  LiftedDomain() = default;
  explicit LiftedDomain(const SupportedLabels& supported) {
    blocks_.resize(supported.size());
    for (std::size_t v = 0; v < supported.size(); ++v)
      for (Label a : supported[v]) {
        Label id = static_cast<Label>(pairs_.size());
        pairs_.emplace_back(static_cast<int>(v), a);
        index_.emplace(pairs_.back(), id);
        blocks_[v].push_back(id);
      }
  }

  int size() const { return static_cast<int>(pairs_.size()); }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<Label>>& blocks() const { return blocks_; }
  const std::vector<Label>& block(int v) const { return blocks_.at(v); }

  std::optional<Label> lifted(int v, Label a) const {
    auto it = index_.find({v, a});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  int var_of(Label l) const { return pairs_.at(l).first; }
  Label orig_of(Label l) const { return pairs_.at(l).second; }

  void print(std::ostream& os) const {
    for (std::size_t l = 0; l < pairs_.size(); ++l)
      os << l << " = (" << pairs_[l].first << ", " << pairs_[l].second << ")\n";
  }

  friend bool operator==(const LiftedDomain& a, const LiftedDomain& b) { return a.pairs_ == b.pairs_; }

 private:
  std::vector<std::pair<int, Label>> pairs_;
  std::map<std::pair<int, Label>, Label> index_;
  std::vector<std::vector<Label>> blocks_;
};

struct LiftResult {
  Language lang{1};
  Instance inst;
  LiftedDomain dom_map;
};

inline std::string lifted_fn_name(const std::string& fn, const std::vector<int>& scope) {
  std::string s = fn + "@";
  for (std::size_t i = 0; i < scope.size(); ++i) s += (i ? "." : "") + std::to_string(scope[i]);
  return s;
}
inline std::string block_fn_name(int v) { return "blk@" + std::to_string(v); }
inline const char* lifted_eq_name() { return "eq"; }

/// Builds the lifted language and instance. Requires every D_v nonempty.
inline LiftResult lift_instance(const Language& lang, const Instance& inst, const SupportedLabels& supported) {
  validate(lang, inst);
  if (static_cast<int>(supported.size()) != inst.num_vars)
    throw ModelError("supported labels do not match the number of variables");
  for (int v = 0; v < inst.num_vars; ++v)
    if (supported[v].empty())
      throw ModelError("variable " + std::to_string(v) + " has no supported label; lift is undefined for infeasible instances");
  if (inst.num_vars == 0) throw ModelError("lift is undefined for an instance without variables");

  LiftResult out;
  out.dom_map = LiftedDomain(supported);
  const LiftedDomain& dm = out.dom_map;
  const int kp = dm.size();
  out.lang = Language(kp);

  for (const auto& c : inst.constraints) {
    const CostFn& f = lang.at(c.fn);
    CostFn g(lifted_fn_name(c.fn, c.scope), f.arity(), kp);
    Tuple y(c.scope.size());
    for (const auto& [x, val] : f.entries()) {
      bool ok = true;
      for (std::size_t i = 0; i < x.size() && ok; ++i) {
        auto l = dm.lifted(c.scope[i], x[i]);
        ok = l.has_value();
        if (ok) y[i] = *l;
      }
      if (ok) g.set(y, ExtRat(val));
    }
    std::string name = g.name();
    out.lang.add_or_reuse(dom_fn(g).renamed("dom@" + name));
    out.lang.add_or_reuse(std::move(g));
    out.inst.add(name, c.scope);
  }
  for (int v = 0; v < inst.num_vars; ++v) {
    std::set<Label> blk(dm.block(v).begin(), dm.block(v).end());
    out.lang.add(unary_set_fn(block_fn_name(v), kp, blk));
    out.inst.add(block_fn_name(v), {v});
  }
  out.lang.add(equality_fn(lifted_eq_name(), kp));
  out.inst.num_vars = inst.num_vars;
  return out;
}

/// One unary map per label d = (v, a): (v', d') -> (v', s(v')) for a feasible
/// solution s of the original instance with s(v) = a.
inline std::vector<Operation> lift_witnesses(const Language& lang, const Instance& inst, const LiftedDomain& dm) {
  std::set<Operation> out;
  for (int v = 0; v < dm.num_blocks(); ++v)
    for (Label l : dm.block(v)) {
      Language l2 = lang;
      Label a = dm.orig_of(l);
      l2.add_or_reuse(unary_set_fn(pin_name(a), lang.domain_size(), {a}));
      Instance i2 = inst;
      i2.add(pin_name(a), {v});
      auto s = solve_csp(l2, i2);
      if (!s) continue;
      std::vector<Label> table(dm.size());
      bool ok = true;
      for (Label x = 0; x < dm.size() && ok; ++x) {
        auto img = dm.lifted(dm.var_of(x), (*s)[dm.var_of(x)]);
        ok = img.has_value();
        if (ok) table[x] = *img;
      }
      if (ok) out.insert(Operation(dm.size(), 1, std::move(table)));
    }
  return {out.begin(), out.end()};
}

struct BlockFiniteReport {
  bool ok = false;
  std::string reason;  ///< the first failed condition, empty when ok
  explicit operator bool() const { return ok; }
};

namespace detail {

/// Unary polymorphism h of Feas(lang) with h(b) = a for every b in block,
/// found by solving the CSP whose variables are the labels themselves.
inline std::optional<Operation> constant_on_block(const Language& feas, const std::vector<Label>& block, Label a) {
  const int k = feas.domain_size();
  Language csp = feas;
  csp.add_or_reuse(unary_set_fn(pin_name(a), k, {a}));
  Instance inst;
  inst.num_vars = k;
  for (const auto& [name, f] : feas.functions())
    for (const auto& [x, v] : f.entries()) inst.add(name, std::vector<int>(x.begin(), x.end()));
  for (Label b : block) inst.add(pin_name(a), {b});
  auto h = solve_csp(csp, inst);
  if (!h) return std::nullopt;
  return Operation(k, 1, std::vector<Label>(h->begin(), h->end()));
}

}  // namespace detail

/// Checks (a) a unary polymorphism of Feas constant a on each block, for each
/// a in the block; (b) dom f and equality in the language (by table); (c)
/// every non-equality dom inside a product of blocks. Witnesses are tried
/// before the CSP search for condition (a).
inline BlockFiniteReport check_block_finite(const Language& lang, const std::vector<std::vector<Label>>& blocks,
                                            const std::vector<Operation>& witnesses = {}) {
  const int k = lang.domain_size();
  std::vector<int> block_of(k, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (Label a : blocks[b]) {
      if (a < 0 || a >= k || block_of[a] != -1) throw std::invalid_argument("blocks do not partition the domain");
      block_of[a] = static_cast<int>(b);
    }
  for (int x : block_of)
    if (x == -1) throw std::invalid_argument("blocks do not partition the domain");

  auto has_table = [&](const CostFn& want) {
    for (const auto& [name, f] : lang.functions())
      if (f.same_table(want)) return true;
    return false;
  };
  CostFn eq = equality_fn("eq", k);
  if (!has_table(eq)) return {false, "(b) equality relation missing"};
  for (const auto& [name, f] : lang.functions())
    if (!has_table(dom_fn(f))) return {false, "(b) dom of '" + name + "' missing"};

  for (const auto& [name, f] : lang.functions()) {
    if (f.same_table(eq)) continue;
    std::vector<int> coord_block(f.arity(), -1);
    for (const auto& [x, v] : f.entries())
      for (int i = 0; i < f.arity(); ++i) {
        if (coord_block[i] == -1) coord_block[i] = block_of[x[i]];
        if (coord_block[i] != block_of[x[i]])
          return {false, "(c) dom of '" + name + "' spans two blocks in coordinate " + std::to_string(i)};
      }
  }

  Language feas = feas_language(lang);
  std::vector<Operation> good;
  for (const auto& w : witnesses)
    if (w.arity() == 1 && w.domain_size() == k && is_polymorphism(w, feas)) good.push_back(w);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (Label a : blocks[b]) {
      bool found = std::any_of(good.begin(), good.end(), [&](const Operation& w) {
        return std::all_of(blocks[b].begin(), blocks[b].end(), [&](Label x) { return w.table()[x] == a; });
      });
      if (!found && !detail::constant_on_block(feas, blocks[b], a))
        return {false, "(a) no unary polymorphism maps block " + std::to_string(b) + " to " + std::to_string(a)};
    }
  return {true, ""};
}

inline bool is_block_finite(const Language& lang, const std::vector<std::vector<Label>>& blocks,
                            const std::vector<Operation>& witnesses = {}) {
  return check_block_finite(lang, blocks, witnesses).ok;
}

/// Lifts each g in supp(w): arguments from one block v map to (v, g(originals));
/// anything else maps to `fallback`. g must preserve every D_v.
inline FracOp lift_fracop(const FracOp& w, const LiftedDomain& dm, Label fallback = 0) {
  if (w.arity < 2) throw std::invalid_argument("lift_fracop needs arity >= 2");
  const int kp = dm.size();
  if (fallback < 0 || fallback >= kp) throw std::invalid_argument("fallback label outside lifted domain");
  FracOp out{kp, w.arity, {}};
  Tuple orig(w.arity);
  for (const auto& [g, p] : w.support) {
    Operation lifted = Operation::from_fn(kp, w.arity, [&](const Tuple& x) -> Label {
      int v = dm.var_of(x[0]);
      for (int i = 0; i < w.arity; ++i) {
        if (dm.var_of(x[i]) != v) return fallback;
        orig[i] = dm.orig_of(x[i]);
      }
      auto img = dm.lifted(v, g(orig));
      if (!img) throw std::invalid_argument("operation " + g.to_string() + " does not preserve the labels of variable " + std::to_string(v));
      return *img;
    });
    out.support.emplace_back(std::move(lifted), p);
  }
  out.normalize();
  return out;
}

}  // namespace vcsp

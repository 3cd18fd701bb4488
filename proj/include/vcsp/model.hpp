#pragma once

// Cost functions, languages, instances and objective evaluation.

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vcsp/rational.hpp"

namespace vcsp {

using Label = int;
using Tuple = std::vector<Label>;
using Assignment = std::vector<Label>;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lexicographic order usable with vectors and spans alike.
struct TupleLess {
  using is_transparent = void;
  template <class A, class B>
  bool operator()(const A& a, const B& b) const {
    return std::lexicographical_compare(std::begin(a), std::end(a), std::begin(b), std::end(b));
  }
};

inline bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(),
                      [](char c) { return c == '#' || c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

/// A table D^n -> ExtRat. Only finite entries are stored; a missing tuple is
/// infinite, so the stored key set is exactly dom f.
class CostFn {
 public:
  using Table = std::map<Tuple, Rational, TupleLess>;

  CostFn(std::string name, int arity, int domain_size)
      : name_(std::move(name)), arity_(arity), domain_size_(domain_size) {
    if (!valid_name(name_)) throw ModelError("invalid function name '" + name_ + "'");
    if (arity < 1) throw ModelError("function '" + name_ + "' must have arity >= 1");
    if (domain_size < 1) throw ModelError("function '" + name_ + "' needs a nonempty domain");
  }

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  int domain_size() const { return domain_size_; }
  const Table& entries() const { return table_; }
  std::size_t dom_size() const { return table_.size(); }

  void set(std::span<const Label> x, const ExtRat& value) {
    check_tuple(x);
    if (value.is_inf()) {
      auto it = table_.find(x);
      if (it != table_.end()) table_.erase(it);
    } else {
      table_.insert_or_assign(Tuple(x.begin(), x.end()), value.value());
    }
  }
  void set(std::initializer_list<Label> x, const ExtRat& value) { set(std::span<const Label>(x.begin(), x.size()), value); }

  ExtRat operator()(std::span<const Label> x) const {
    auto it = table_.find(x);
    return it == table_.end() ? ExtRat::infinity() : ExtRat(it->second);
  }
  ExtRat operator()(std::initializer_list<Label> x) const { return (*this)(std::span<const Label>(x.begin(), x.size())); }

  /// Pointer to the finite value, or nullptr outside dom f.
  const Rational* find(std::span<const Label> x) const {
    auto it = table_.find(x);
    return it == table_.end() ? nullptr : &it->second;
  }
  bool in_dom(std::span<const Label> x) const { return table_.find(x) != table_.end(); }

  std::size_t table_size() const {
    std::size_t n = 1;
    for (int i = 0; i < arity_; ++i) n *= static_cast<std::size_t>(domain_size_);
    return n;
  }

  /// Complete table with every value finite.
  bool is_finite_valued() const { return table_.size() == table_size(); }
  /// Every finite value is zero ({0, inf}-valued).
  bool is_crisp() const {
    return std::all_of(table_.begin(), table_.end(), [](const auto& e) { return e.second.is_zero(); });
  }

  bool same_table(const CostFn& o) const {
    return arity_ == o.arity_ && domain_size_ == o.domain_size_ && table_ == o.table_;
  }
  CostFn renamed(std::string name) const {
    CostFn f = *this;
    if (!valid_name(name)) throw ModelError("invalid function name '" + name + "'");
    f.name_ = std::move(name);
    return f;
  }

  friend bool operator==(const CostFn& a, const CostFn& b) { return a.name_ == b.name_ && a.same_table(b); }

 private:
  void check_tuple(std::span<const Label> x) const {
    if (static_cast<int>(x.size()) != arity_)
      throw ModelError("tuple of length " + std::to_string(x.size()) + " for function '" + name_ + "' of arity " +
                       std::to_string(arity_));
    for (Label a : x)
      if (a < 0 || a >= domain_size_)
        throw ModelError("label " + std::to_string(a) + " outside domain of '" + name_ + "'");
  }

  std::string name_;
  int arity_;
  int domain_size_;
  Table table_;
};

/// A named finite set of cost functions over a shared domain [0, k).
class Language {
 public:
  explicit Language(int domain_size) : domain_size_(domain_size) {
    if (domain_size < 1) throw ModelError("language domain must be nonempty");
  }

  int domain_size() const { return domain_size_; }
  const std::map<std::string, CostFn, std::less<>>& functions() const { return fns_; }
  std::size_t size() const { return fns_.size(); }

  void add(CostFn f) {
    if (f.domain_size() != domain_size_)
      throw ModelError("function '" + f.name() + "' has domain size " + std::to_string(f.domain_size()) +
                       ", language has " + std::to_string(domain_size_));
    std::string name = f.name();
    if (!fns_.emplace(name, std::move(f)).second) throw ModelError("duplicate function name '" + name + "'");
  }

  /// Adds f unless a function of that name already exists with the same
  /// table; a clash with a different table throws.
  void add_or_reuse(CostFn f) {
    if (const CostFn* old = find(f.name())) {
      if (!old->same_table(f)) throw ModelError("reserved name '" + f.name() + "' already used by another table");
      return;
    }
    add(std::move(f));
  }

  const CostFn* find(std::string_view name) const {
    auto it = fns_.find(name);
    return it == fns_.end() ? nullptr : &it->second;
  }
  const CostFn& at(std::string_view name) const {
    if (const CostFn* f = find(name)) return *f;
    throw ModelError("unknown function '" + std::string(name) + "'");
  }
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  friend bool operator==(const Language& a, const Language& b) {
    return a.domain_size_ == b.domain_size_ && a.fns_ == b.fns_;
  }

 private:
  int domain_size_;
  std::map<std::string, CostFn, std::less<>> fns_;
};

struct Constraint {
  std::string fn;
  std::vector<int> scope;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Instance {
  int num_vars = 0;
  std::vector<Constraint> constraints;

  void add(std::string fn, std::vector<int> scope) { constraints.push_back({std::move(fn), std::move(scope)}); }
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Throws ModelError unless every constraint resolves and matches its arity.
inline void validate(const Language& lang, const Instance& inst) {
  if (inst.num_vars < 0) throw ModelError("negative variable count");
  for (std::size_t t = 0; t < inst.constraints.size(); ++t) {
    const Constraint& c = inst.constraints[t];
    const CostFn* f = lang.find(c.fn);
    if (!f) throw ModelError("constraint " + std::to_string(t) + ": unknown function '" + c.fn + "'");
    if (static_cast<int>(c.scope.size()) != f->arity())
      throw ModelError("constraint " + std::to_string(t) + ": scope length " + std::to_string(c.scope.size()) +
                       " but '" + c.fn + "' has arity " + std::to_string(f->arity()));
    for (int v : c.scope)
      if (v < 0 || v >= inst.num_vars)
        throw ModelError("constraint " + std::to_string(t) + ": variable " + std::to_string(v) + " out of range");
  }
}

inline void validate_assignment(const Language& lang, const Instance& inst, std::span<const Label> x) {
  if (static_cast<int>(x.size()) != inst.num_vars)
    throw ModelError("assignment has " + std::to_string(x.size()) + " labels for " + std::to_string(inst.num_vars) +
                     " variables");
  for (Label a : x)
    if (a < 0 || a >= lang.domain_size()) throw ModelError("assignment label " + std::to_string(a) + " out of range");
}

/// Objective value of x: the sum over constraints, infinity absorbing.
inline ExtRat evaluate(const Language& lang, const Instance& inst, std::span<const Label> x) {
  validate(lang, inst);
  validate_assignment(lang, inst, x);
  ExtRat total;
  Tuple buf;
  for (const Constraint& c : inst.constraints) {
    buf.resize(c.scope.size());
    for (std::size_t i = 0; i < c.scope.size(); ++i) buf[i] = x[c.scope[i]];
    total += lang.at(c.fn)(buf);
    if (total.is_inf()) break;
  }
  return total;
}

/// The {0, inf} function that is 0 exactly on dom f. Keeps the name.
inline CostFn dom_fn(const CostFn& f) {
  CostFn d(f.name(), f.arity(), f.domain_size());
  for (const auto& [x, v] : f.entries()) d.set(x, ExtRat(0));
  return d;
}

inline Language feas_language(const Language& lang) {
  Language out(lang.domain_size());
  for (const auto& [name, f] : lang.functions()) out.add(dom_fn(f));
  return out;
}

/// u_A: unary, 0 on the labels in `allowed`, inf elsewhere.
inline CostFn unary_set_fn(std::string name, int domain_size, const std::set<Label>& allowed) {
  CostFn u(std::move(name), 1, domain_size);
  for (Label a : allowed) u.set({a}, ExtRat(0));
  return u;
}

/// =_D over [0, k).
inline CostFn equality_fn(std::string name, int domain_size) {
  CostFn eq(std::move(name), 2, domain_size);
  for (Label a = 0; a < domain_size; ++a) eq.set({a, a}, ExtRat(0));
  return eq;
}

// Reserved names for synthesized unary functions. User files never need them,
// but they round-trip through the text format like any other name.
inline std::string pin_name(Label d) { return "__pin_" + std::to_string(d); }

inline std::string support_name(const std::set<Label>& labels) {
  if (labels.empty()) return "__u_none";
  std::string s = "__u";
  for (Label a : labels) s += "_" + std::to_string(a);
  return s;
}

/// Calls fn(tuple) for every tuple of [0,k)^n in lexicographic order.
template <class Fn>
void for_each_tuple(int k, int n, Fn&& fn) {
  Tuple x(static_cast<std::size_t>(n), 0);
  if (k <= 0) return;
  while (true) {
    fn(std::as_const(x));
    int i = n - 1;
    while (i >= 0 && x[i] == k - 1) x[i--] = 0;
    if (i < 0) return;
    ++x[i];
  }
}

/// k^n with overflow saturation at SIZE_MAX.
inline std::size_t checked_pow(std::size_t k, std::size_t n) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (k != 0 && r > SIZE_MAX / k) return SIZE_MAX;
    r *= k;
  }
  return r;
}

}  // namespace vcsp

#pragma once

// Exact rational linear programming.
//
// solve_lp runs a two-phase dense-tableau simplex with Bland's rule over
// exact rationals and returns a certificate for whichever alternative holds:
//
//   Optimal    primal x, dual y with equal objective values
//   Infeasible y with y_i >= 0 on >= rows, y_i <= 0 on <= rows, y free on = rows,
//              (A^T y)_j <= 0 for x_j >= 0, (A^T y)_j = 0 for free x_j, b.y > 0
//   Unbounded  feasible point p and ray r with c.r < 0
//
// Dual sign conventions for Optimal match the Farkas ones: y_i >= 0 on >=
// rows, y_i <= 0 on <= rows, and (A^T y)_j <= c_j (nonnegative x_j) or
// = c_j (free x_j). verify_outcome rechecks all of this from the LP alone.

#include <cstddef>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vcsp/caps.hpp"
#include "vcsp/rational.hpp"

namespace vcsp::lp {

enum class Relation { LessEq, Equal, GreaterEq };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::LessEq: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEq: return ">=";
  }
  return "?";
}

struct Row {
  std::vector<Rational> coeffs;
  Relation rel = Relation::Equal;
  Rational rhs;
};

/// minimize objective . x + objective_constant subject to rows; x_j >= 0
/// where nonneg[j], free otherwise.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<Rational> objective;
  Rational objective_constant;
  std::vector<Row> rows;
  std::vector<bool> nonneg;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t n) : num_vars(n), objective(n), nonneg(n, true) {}

  std::size_t add_row(std::vector<Rational> coeffs, Relation rel, Rational rhs) {
    if (coeffs.size() != num_vars) throw std::invalid_argument("LP row length does not match variable count");
    rows.push_back({std::move(coeffs), rel, std::move(rhs)});
    return rows.size() - 1;
  }

  void validate() const {
    if (objective.size() != num_vars || nonneg.size() != num_vars)
      throw std::invalid_argument("LP objective/nonneg size mismatch");
    for (const Row& r : rows)
      if (r.coeffs.size() != num_vars) throw std::invalid_argument("LP row length does not match variable count");
  }
};

struct Optimal {
  Rational value;
  std::vector<Rational> primal;
  std::vector<Rational> dual;
};
struct Infeasible {
  std::vector<Rational> farkas;
};
struct Unbounded {
  std::vector<Rational> point;
  std::vector<Rational> ray;
};

using LPOutcome = std::variant<Optimal, Infeasible, Unbounded>;

inline bool is_optimal(const LPOutcome& o) { return std::holds_alternative<Optimal>(o); }
inline bool is_infeasible(const LPOutcome& o) { return std::holds_alternative<Infeasible>(o); }
inline bool is_unbounded(const LPOutcome& o) { return std::holds_alternative<Unbounded>(o); }

struct SolveStats {
  std::size_t pivots = 0;
  std::size_t rows = 0;
  std::size_t columns = 0;
};

namespace detail {

class Simplex {
 public:
  Simplex(const LinearProgram& lp, std::size_t cell_cap) : lp_(lp) {
    lp.validate();
    m_ = lp.rows.size();
    // structural columns, free variables split into x+ - x-
    pos_.resize(lp.num_vars);
    neg_.assign(lp.num_vars, npos);
    std::size_t col = 0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      pos_[j] = col++;
      if (!lp.nonneg[j]) neg_[j] = col++;
    }
    nstruct_ = col;
    sign_.resize(m_);
    slack_.assign(m_, npos);
    std::vector<Relation> rel(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const Row& row = lp.rows[i];
      sign_[i] = row.rhs.sign() < 0 ? -1 : 1;
      rel[i] = row.rel;
      if (sign_[i] < 0 && row.rel != Relation::Equal)
        rel[i] = row.rel == Relation::LessEq ? Relation::GreaterEq : Relation::LessEq;
      if (rel[i] != Relation::Equal) slack_[i] = col++;
    }
    n_ = col;
    width_ = n_ + m_ + 1;
    Caps::check("lp_cells", m_ * width_, cell_cap);

    tab_.assign(m_, std::vector<Rational>(width_));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const Row& row = lp.rows[i];
      auto& t = tab_[i];
      for (std::size_t j = 0; j < lp.num_vars; ++j) {
        if (row.coeffs[j].is_zero()) continue;
        Rational a = sign_[i] < 0 ? -row.coeffs[j] : row.coeffs[j];
        if (neg_[j] != npos) t[neg_[j]] = -a;
        t[pos_[j]] = std::move(a);
      }
      if (slack_[i] != npos) t[slack_[i]] = rel[i] == Relation::LessEq ? Rational(1) : Rational(-1);
      t[n_ + i] = Rational(1);
      t[width_ - 1] = sign_[i] < 0 ? -row.rhs : row.rhs;
      basis_[i] = rel[i] == Relation::LessEq ? slack_[i] : n_ + i;
    }
  }

  LPOutcome run(SolveStats* stats) {
    // phase 1: minimize the sum of artificials still in the basis
    std::vector<bool> artificial_row(m_);
    for (std::size_t i = 0; i < m_; ++i) artificial_row[i] = basis_[i] >= n_;
    z_.assign(width_, Rational());
    for (std::size_t i = 0; i < m_; ++i) {
      if (!artificial_row[i]) continue;
      z_[n_ + i] = Rational(1);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (!artificial_row[i]) continue;
      for (std::size_t c = 0; c < width_; ++c)
        if (!tab_[i][c].is_zero()) z_[c] -= tab_[i][c];
    }
    if (!iterate()) throw std::logic_error("phase 1 reported unbounded");
    Rational phase1 = -z_[width_ - 1];
    if (phase1.sign() > 0) {
      Infeasible inf;
      inf.farkas.resize(m_);
      for (std::size_t i = 0; i < m_; ++i) {
        Rational y = (artificial_row[i] ? Rational(1) : Rational(0)) - z_[n_ + i];
        inf.farkas[i] = sign_[i] < 0 ? -y : y;
      }
      fill_stats(stats);
      return inf;
    }
    // drive zero-level artificials out; rows with no real nonzero are redundant
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j)
        if (!tab_[i][j].is_zero()) {
          pivot(i, j);
          break;
        }
    }

    // phase 2
    std::vector<Rational> cost(n_);
    for (std::size_t j = 0; j < lp_.num_vars; ++j) {
      cost[pos_[j]] = lp_.objective[j];
      if (neg_[j] != npos) cost[neg_[j]] = -lp_.objective[j];
    }
    z_.assign(width_, Rational());
    for (std::size_t j = 0; j < n_; ++j) z_[j] = cost[j];
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_ || cost[basis_[i]].is_zero()) continue;
      const Rational& cb = cost[basis_[i]];
      for (std::size_t c = 0; c < width_; ++c)
        if (!tab_[i][c].is_zero()) z_[c] -= cb * tab_[i][c];
    }
    std::size_t unbounded_col = npos;
    if (!iterate(&unbounded_col)) {
      Unbounded u;
      u.point = primal();
      std::vector<Rational> ray_std(n_);
      ray_std[unbounded_col] = Rational(1);
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] < n_) ray_std[basis_[i]] = -tab_[i][unbounded_col];
      u.ray = to_original(ray_std);
      fill_stats(stats);
      return u;
    }
    Optimal opt;
    opt.primal = primal();
    opt.dual.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      Rational y = -z_[n_ + i];
      opt.dual[i] = sign_[i] < 0 ? -y : y;
    }
    opt.value = lp_.objective_constant;
    for (std::size_t j = 0; j < lp_.num_vars; ++j)
      if (!lp_.objective[j].is_zero()) opt.value += lp_.objective[j] * opt.primal[j];
    fill_stats(stats);
    return opt;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Bland's rule; returns false if the entering column has no positive entry.
  bool iterate(std::size_t* unbounded_col = nullptr) {
    while (true) {
      std::size_t enter = npos;
      for (std::size_t j = 0; j < n_; ++j)
        if (z_[j].sign() < 0) {
          enter = j;
          break;
        }
      if (enter == npos) return true;
      std::size_t leave = npos;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        const Rational& a = tab_[i][enter];
        if (a.sign() <= 0) continue;
        Rational ratio = tab_[i][width_ - 1] / a;
        if (leave == npos || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (leave == npos) {
        if (unbounded_col) *unbounded_col = enter;
        return false;
      }
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t col) {
    ++pivots_;
    auto& prow = tab_[r];
    Rational inv = Rational(1) / prow[col];
    nz_.clear();
    for (std::size_t c = 0; c < width_; ++c)
      if (!prow[c].is_zero()) {
        prow[c] *= inv;
        nz_.push_back(c);
      }
    Rational tmp;
    auto eliminate = [&](std::vector<Rational>& row) {
      if (row[col].is_zero()) return;
      Rational factor = row[col];
      for (std::size_t c : nz_) {
        tmp = factor;
        tmp *= prow[c];
        row[c] -= tmp;
      }
    };
    for (std::size_t i = 0; i < m_; ++i)
      if (i != r) eliminate(tab_[i]);
    eliminate(z_);
    basis_[r] = col;
  }

  std::vector<Rational> primal() const {
    std::vector<Rational> x_std(n_);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x_std[basis_[i]] = tab_[i][width_ - 1];
    return to_original(x_std);
  }

  std::vector<Rational> to_original(const std::vector<Rational>& x_std) const {
    std::vector<Rational> x(lp_.num_vars);
    for (std::size_t j = 0; j < lp_.num_vars; ++j) {
      x[j] = x_std[pos_[j]];
      if (neg_[j] != npos) x[j] -= x_std[neg_[j]];
    }
    return x;
  }

  void fill_stats(SolveStats* stats) const {
    if (!stats) return;
    stats->pivots = pivots_;
    stats->rows = m_;
    stats->columns = n_;
  }

  const LinearProgram& lp_;
  std::size_t m_ = 0, n_ = 0, nstruct_ = 0, width_ = 0;
  std::vector<std::size_t> pos_, neg_, slack_;
  std::vector<int> sign_;
  std::vector<std::vector<Rational>> tab_;
  std::vector<Rational> z_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Deterministic: identical input gives a bit-identical outcome.
inline LPOutcome solve_lp(const LinearProgram& lp, const Caps& caps = {}, SolveStats* stats = nullptr) {
  detail::Simplex s(lp, caps.lp_cells);
  return s.run(stats);
}

namespace detail {

inline Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
  return s;
}

inline bool primal_feasible(const LinearProgram& lp, const std::vector<Rational>& x) {
  if (x.size() != lp.num_vars) return false;
  for (std::size_t j = 0; j < lp.num_vars; ++j)
    if (lp.nonneg[j] && x[j].sign() < 0) return false;
  for (const Row& row : lp.rows) {
    Rational lhs = dot(row.coeffs, x);
    auto c = lhs <=> row.rhs;
    if (row.rel == Relation::Equal && c != 0) return false;
    if (row.rel == Relation::LessEq && c > 0) return false;
    if (row.rel == Relation::GreaterEq && c < 0) return false;
  }
  return true;
}

inline bool multiplier_signs_ok(const LinearProgram& lp, const std::vector<Rational>& y) {
  if (y.size() != lp.rows.size()) return false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (lp.rows[i].rel == Relation::GreaterEq && y[i].sign() < 0) return false;
    if (lp.rows[i].rel == Relation::LessEq && y[i].sign() > 0) return false;
  }
  return true;
}

/// A^T y, column by column.
inline std::vector<Rational> transpose_times(const LinearProgram& lp, const std::vector<Rational>& y) {
  std::vector<Rational> out(lp.num_vars);
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (y[i].is_zero()) continue;
    const auto& a = lp.rows[i].coeffs;
    for (std::size_t j = 0; j < lp.num_vars; ++j)
      if (!a[j].is_zero()) out[j] += a[j] * y[i];
  }
  return out;
}

}  // namespace detail

/// Rechecks a certificate against the LP using exact arithmetic only.
inline bool verify_outcome(const LinearProgram& lp, const LPOutcome& out) {
  using namespace detail;
  try {
    lp.validate();
  } catch (const std::exception&) {
    return false;
  }
  if (const auto* opt = std::get_if<Optimal>(&out)) {
    if (!primal_feasible(lp, opt->primal)) return false;
    if (!multiplier_signs_ok(lp, opt->dual)) return false;
    auto aty = transpose_times(lp, opt->dual);
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      auto c = aty[j] <=> lp.objective[j];
      if (lp.nonneg[j] ? c > 0 : c != 0) return false;
    }
    Rational primal_obj = dot(lp.objective, opt->primal) + lp.objective_constant;
    Rational dual_obj = lp.objective_constant;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) dual_obj += lp.rows[i].rhs * opt->dual[i];
    return primal_obj == opt->value && dual_obj == opt->value;
  }
  if (const auto* inf = std::get_if<Infeasible>(&out)) {
    if (!multiplier_signs_ok(lp, inf->farkas)) return false;
    auto aty = transpose_times(lp, inf->farkas);
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      int s = aty[j].sign();
      if (lp.nonneg[j] ? s > 0 : s != 0) return false;
    }
    Rational by;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) by += lp.rows[i].rhs * inf->farkas[i];
    return by.sign() > 0;
  }
  const auto& unb = std::get<Unbounded>(out);
  if (!primal_feasible(lp, unb.point) || unb.ray.size() != lp.num_vars) return false;
  for (std::size_t j = 0; j < lp.num_vars; ++j)
    if (lp.nonneg[j] && unb.ray[j].sign() < 0) return false;
  for (const Row& row : lp.rows) {
    int s = dot(row.coeffs, unb.ray).sign();
    if (row.rel == Relation::Equal && s != 0) return false;
    if (row.rel == Relation::LessEq && s > 0) return false;
    if (row.rel == Relation::GreaterEq && s < 0) return false;
  }
  return dot(lp.objective, unb.ray).sign() < 0;
}

/// Text dump for external cross-checking:
///   lp VARS ROWS
///   minimize c_1 ... c_n + c0
///   free j            (one line per free variable)
///   row a_1 ... a_n REL rhs
inline void dump_lp(std::ostream& os, const LinearProgram& lp) {
  os << "lp " << lp.num_vars << " " << lp.rows.size() << "\n";
  os << "minimize";
  for (const auto& c : lp.objective) os << " " << c;
  os << " + " << lp.objective_constant << "\n";
  for (std::size_t j = 0; j < lp.num_vars; ++j)
    if (!lp.nonneg[j]) os << "free " << j << "\n";
  for (const Row& row : lp.rows) {
    os << "row";
    for (const auto& a : row.coeffs) os << " " << a;
    os << " " << to_string(row.rel) << " " << row.rhs << "\n";
  }
}

inline std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream os;
  dump_lp(os, lp);
  return os.str();
}

}  // namespace vcsp::lp

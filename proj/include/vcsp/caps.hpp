#pragma once

// Resource guards shared by every module. Exceeding a guard aborts the
// computation with ResourceError; nothing silently samples or truncates.

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vcsp {

class ResourceError : public std::runtime_error {
 public:
  ResourceError(std::string guard, std::size_t requested, std::size_t limit)
      : std::runtime_error("resource guard '" + guard + "' exceeded: requested " + std::to_string(requested) +
                           ", limit " + std::to_string(limit)),
        guard_(std::move(guard)),
        requested_(requested),
        limit_(limit) {}

  const std::string& guard() const { return guard_; }
  std::size_t requested() const { return requested_; }
  std::size_t limit() const { return limit_; }

 private:
  std::string guard_;
  std::size_t requested_;
  std::size_t limit_;
};

struct Caps {
  std::size_t lp_cells = 200'000;        ///< dense simplex tableau cells
  std::size_t fracpol_vars = 100'000;    ///< operations enumerated / LP columns in analysis
  std::size_t fracpol_rows = 500'000;    ///< generated inequality rows in analysis
  std::size_t graph_nodes = 20'000;      ///< nodes of an operation graph
  std::size_t brute_evals = 1UL << 24;   ///< assignments scanned by the oracle
  std::size_t unary_ops = 100'000;       ///< k^k unary operation space (cores)

  static void check(const char* guard, std::size_t requested, std::size_t limit) {
    if (requested > limit) throw ResourceError(guard, requested, limit);
  }

  /// Applies a "name=value,name=value" override list. Unknown names throw.
  void apply(std::string_view spec) {
    while (!spec.empty()) {
      auto comma = spec.find(',');
      std::string_view item = spec.substr(0, comma);
      spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("cap override without '=': " + std::string(item));
      std::string name(item.substr(0, eq));
      std::string value(item.substr(eq + 1));
      std::size_t parsed = 0;
      std::size_t v = std::stoull(value, &parsed);
      if (parsed != value.size()) throw std::invalid_argument("bad cap value: " + value);
      if (name == "lp_cells") lp_cells = v;
      else if (name == "fracpol_vars") fracpol_vars = v;
      else if (name == "fracpol_rows") fracpol_rows = v;
      else if (name == "graph_nodes") graph_nodes = v;
      else if (name == "brute_evals") brute_evals = v;
      else if (name == "unary_ops") unary_ops = v;
      else throw std::invalid_argument("unknown cap: " + name);
    }
  }

  /// Defaults overridden by the VCSP_CAPS environment variable, if set.
  static Caps from_env() {
    Caps caps;
    if (const char* env = std::getenv("VCSP_CAPS")) caps.apply(env);
    return caps;
  }
};

}  // namespace vcsp

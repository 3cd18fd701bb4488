#pragma once

// Line-based text formats for languages and instances.
//
//   domain K
//   function NAME ARITY
//     t1 ... tARITY : VALUE      # VALUE: integer, p/q or inf
//   end
//
//   vars N
//   constraint NAME v1 ... vARITY
//
// '#' starts a comment. Unlisted tuples are infinite.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <span>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vcsp/model.hpp"

namespace vcsp {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, int line, int column, const std::string& msg)
      : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

namespace detail {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

inline bool parse_int(std::string_view s, long& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) return false;
  long v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    if (__builtin_mul_overflow(v, 10L, &v) || __builtin_add_overflow(v, static_cast<long>(s[i] - '0'), &v))
      return false;
  }
  out = neg ? -v : v;
  return true;
}

}  // namespace detail

inline Language parse_language(std::string_view text, const std::string& source = "<language>") {
  using detail::Token;
  auto lines = detail::split_lines(text);
  std::optional<Language> lang;
  std::optional<CostFn> current;
  std::set<Tuple> seen;
  int current_line = 0;

  auto fail = [&](int line, int col, const std::string& msg) -> ParseError { return ParseError(source, line, col, msg); };
  auto int_token = [&](const Token& t, int line, const char* what) {
    long v;
    if (!detail::parse_int(t.text, v)) throw fail(line, t.column, std::string("expected integer ") + what);
    if (v < INT32_MIN || v > INT32_MAX) throw fail(line, t.column, std::string(what) + " out of range");
    return static_cast<int>(v);
  };

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const int line = static_cast<int>(ln) + 1;
    auto toks = detail::tokenize(lines[ln]);
    if (toks.empty()) continue;
    std::string_view head = toks[0].text;

    if (!lang) {
      if (head != "domain") throw fail(line, toks[0].column, "expected 'domain K' before anything else");
      if (toks.size() != 2) throw fail(line, toks[0].column, "'domain' takes exactly one argument");
      int k = int_token(toks[1], line, "domain size");
      if (k < 1) throw fail(line, toks[1].column, "domain size must be >= 1");
      lang.emplace(k);
      continue;
    }

    if (!current) {
      if (head == "domain") throw fail(line, toks[0].column, "duplicate 'domain' line");
      if (head != "function") throw fail(line, toks[0].column, "expected 'function NAME ARITY'");
      if (toks.size() != 3) throw fail(line, toks[0].column, "'function' takes NAME and ARITY");
      std::string name(toks[1].text);
      if (!valid_name(name)) throw fail(line, toks[1].column, "invalid function name");
      if (lang->contains(name)) throw fail(line, toks[1].column, "duplicate function name '" + name + "'");
      int arity = int_token(toks[2], line, "arity");
      if (arity < 1) throw fail(line, toks[2].column, "arity must be >= 1");
      current.emplace(name, arity, lang->domain_size());
      current_line = line;
      seen.clear();
      continue;
    }

    if (head == "end") {
      if (toks.size() != 1) throw fail(line, toks[1].column, "unexpected text after 'end'");
      lang->add(std::move(*current));
      current.reset();
      continue;
    }

    // tuple line: labels, ':', value
    std::size_t colon = toks.size();
    for (std::size_t i = 0; i < toks.size(); ++i)
      if (toks[i].text == ":") {
        colon = i;
        break;
      }
    if (colon == toks.size()) throw fail(line, toks[0].column, "expected 't1 ... tn : VALUE' or 'end'");
    if (colon + 2 != toks.size()) throw fail(line, toks[colon].column, "expected exactly one value after ':'");
    if (static_cast<int>(colon) != current->arity())
      throw fail(line, toks[colon].column,
                 "tuple has " + std::to_string(colon) + " labels, function '" + current->name() + "' has arity " +
                     std::to_string(current->arity()));
    Tuple x(colon);
    for (std::size_t i = 0; i < colon; ++i) {
      int a = int_token(toks[i], line, "label");
      if (a < 0 || a >= lang->domain_size())
        throw fail(line, toks[i].column, "label " + std::to_string(a) + " outside domain");
      x[i] = a;
    }
    ExtRat value;
    try {
      value = ExtRat::parse(toks[colon + 1].text);
    } catch (const std::invalid_argument& e) {
      throw fail(line, toks[colon + 1].column, e.what());
    }
    // duplicates are rejected even when one of the values is inf
    if (!seen.insert(x).second) throw fail(line, toks[0].column, "duplicate tuple");
    current->set(x, value);
  }
  if (!lang) throw ParseError(source, 1, 1, "empty language file (missing 'domain')");
  if (current) throw ParseError(source, current_line, 1, "function '" + current->name() + "' is missing 'end'");
  return std::move(*lang);
}

/// When `lang` is given, constraint names and scope lengths are checked
/// against it and reported with line/column positions.
inline Instance parse_instance(std::string_view text, const Language* lang = nullptr,
                               const std::string& source = "<instance>") {
  auto lines = detail::split_lines(text);
  Instance inst;
  bool have_vars = false;
  auto fail = [&](int line, int col, const std::string& msg) { return ParseError(source, line, col, msg); };

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const int line = static_cast<int>(ln) + 1;
    auto toks = detail::tokenize(lines[ln]);
    if (toks.empty()) continue;
    std::string_view head = toks[0].text;
    if (!have_vars) {
      if (head != "vars") throw fail(line, toks[0].column, "expected 'vars N' before anything else");
      if (toks.size() != 2) throw fail(line, toks[0].column, "'vars' takes exactly one argument");
      long n;
      if (!detail::parse_int(toks[1].text, n) || n < 0 || n > INT32_MAX)
        throw fail(line, toks[1].column, "expected nonnegative variable count");
      inst.num_vars = static_cast<int>(n);
      have_vars = true;
      continue;
    }
    if (head != "constraint") throw fail(line, toks[0].column, "expected 'constraint NAME v1 ... vn'");
    if (toks.size() < 3) throw fail(line, toks[0].column, "constraint needs a name and at least one variable");
    std::string name(toks[1].text);
    if (lang) {
      const CostFn* f = lang->find(name);
      if (!f) throw fail(line, toks[1].column, "unknown function '" + name + "'");
      if (static_cast<int>(toks.size()) - 2 != f->arity())
        throw fail(line, toks[1].column,
                   "scope has " + std::to_string(toks.size() - 2) + " variables, '" + name + "' has arity " +
                       std::to_string(f->arity()));
    }
    std::vector<int> scope;
    for (std::size_t i = 2; i < toks.size(); ++i) {
      long v;
      if (!detail::parse_int(toks[i].text, v)) throw fail(line, toks[i].column, "expected variable index");
      if (v < 0 || v >= inst.num_vars)
        throw fail(line, toks[i].column, "variable " + std::to_string(v) + " out of range");
      scope.push_back(static_cast<int>(v));
    }
    inst.add(std::move(name), std::move(scope));
  }
  if (!have_vars) throw ParseError(source, 1, 1, "empty instance file (missing 'vars')");
  return inst;
}

inline std::string print_language(const Language& lang) {
  std::ostringstream os;
  os << "domain " << lang.domain_size() << "\n";
  for (const auto& [name, f] : lang.functions()) {
    os << "function " << name << " " << f.arity() << "\n";
    for (const auto& [x, v] : f.entries()) {
      os << " ";
      for (Label a : x) os << " " << a;
      os << " : " << v.to_string() << "\n";
    }
    os << "end\n";
  }
  return os.str();
}

inline std::string print_instance(const Instance& inst) {
  std::ostringstream os;
  os << "vars " << inst.num_vars << "\n";
  for (const Constraint& c : inst.constraints) {
    os << "constraint " << c.fn;
    for (int v : c.scope) os << " " << v;
    os << "\n";
  }
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string print_assignment(std::span<const Label> x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(x[i]);
  }
  return s;
}

/// FNV-1a, for input digests in reports.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vcsp

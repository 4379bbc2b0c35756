#pragma once

// Reader and writer for the line-oriented `.crn` network format:
//
//   # comment
//   species X1 X2
//   2 X1 -> 3 X1 + X2 ; k=1 ; tau=1
//   X1 + X2 <-> 2 X1 ; k=1,1 ; tau=2,1
//   0 -> X1 ; k=0.5
//
// A reversible arrow expands into two reactions, forward first. A missing
// tau clause means no delay.

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dcrn/errors.hpp"
#include "dcrn/network.hpp"

namespace dcrn {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, end);
}

namespace detail {

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!consume(token))
      fail("expected '" + std::string(token) + "'");
  }

  bool peek_name() {
    const char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string name() {
    skip_ws();
    if (!peek_name()) fail("expected species name");
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  bool peek_digit() {
    return std::isdigit(static_cast<unsigned char>(peek())) != 0;
  }

  int integer() {
    skip_ws();
    int v = 0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) fail("expected integer coefficient");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail("expected number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, static_cast<int>(pos_) + 1);
  }

  int column() const { return static_cast<int>(pos_) + 1; }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

class SpeciesTable {
 public:
  std::size_t intern(const std::string& name) {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    names_.push_back(name);
    return names_.size() - 1;
  }

  void declare(const std::string& name, const LineCursor& at) {
    for (const auto& d : declared_)
      if (d == name) at.fail("duplicate species declaration '" + name + "'");
    declared_.push_back(name);
    intern(name);
  }

  std::vector<std::string> names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> declared_;
};

inline Complex parse_side(LineCursor& cur, SpeciesTable& table) {
  if (cur.peek() == '0') {
    // "0" alone is the zero complex; "0 X" would be a zero coefficient.
    LineCursor probe = cur;
    probe.integer();
    if (!probe.peek_name()) {
      cur.integer();
      return Complex();
    }
  }
  std::vector<Complex::Term> terms;
  do {
    int coeff = 1;
    if (cur.peek_digit()) {
      coeff = cur.integer();
      if (coeff <= 0) cur.fail("stoichiometric coefficient must be positive");
    }
    terms.emplace_back(table.intern(cur.name()), coeff);
  } while (cur.consume("+"));
  return Complex(terms);
}

inline std::vector<double> parse_values(LineCursor& cur) {
  std::vector<double> v{cur.number()};
  if (cur.consume(",")) v.push_back(cur.number());
  return v;
}

}  // namespace detail

/// Parses `.crn` text. Errors carry the 1-based line and column.
inline ReactionNetwork parse_network(std::string_view text) {
  detail::SpeciesTable table;
  std::vector<Reaction> reactions;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);

    detail::LineCursor cur(line, line_no);
    if (cur.at_end()) {
      if (end == text.size()) break;
      continue;
    }
    {
      detail::LineCursor probe = cur;
      if (probe.peek_name() && probe.name() == "species") {
        cur.name();
        if (cur.at_end()) cur.fail("species declaration needs a name");
        while (!cur.at_end()) {
          detail::LineCursor at = cur;
          at.skip_ws();
          table.declare(cur.name(), at);
        }
        if (end == text.size()) break;
        continue;
      }
    }

    Complex source = detail::parse_side(cur, table);
    bool reversible = false;
    if (cur.consume("<->")) {
      reversible = true;
    } else if (!cur.consume("->")) {
      cur.fail("expected '->' or '<->'");
    }
    Complex target = detail::parse_side(cur, table);
    cur.expect(";");
    if (!cur.peek_name() || cur.name() != "k") cur.fail("expected 'k='");
    cur.expect("=");
    detail::LineCursor k_at = cur;
    k_at.skip_ws();
    auto k = detail::parse_values(cur);
    std::vector<double> tau{0.0};
    detail::LineCursor tau_at = cur;
    if (cur.consume(";")) {
      if (!cur.peek_name() || cur.name() != "tau") cur.fail("expected 'tau='");
      cur.expect("=");
      tau_at = cur;
      tau_at.skip_ws();
      tau = detail::parse_values(cur);
    }
    if (!cur.at_end()) cur.fail("unexpected trailing text");

    const std::size_t directions = reversible ? 2 : 1;
    if (k.size() > directions)
      k_at.fail("irreversible reaction takes a single rate constant");
    if (tau.size() > directions)
      tau_at.fail("irreversible reaction takes a single delay");
    if (k.size() < directions) k.push_back(k.front());
    if (tau.size() < directions) tau.push_back(tau.front());
    for (double v : k)
      if (!(v > 0.0)) k_at.fail("rate constant must be positive");
    for (double v : tau)
      if (!(v >= 0.0)) tau_at.fail("delay must be non-negative");
    if (source == target) {
      detail::LineCursor at(line, line_no);
      at.fail("reaction source equals target");
    }

    reactions.push_back({source, target, k[0], tau[0]});
    if (reversible) reactions.push_back({target, source, k[1], tau[1]});
    if (end == text.size()) break;
  }
  return ReactionNetwork(table.names(), std::move(reactions));
}

inline ReactionNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

inline std::string format_complex(const ReactionNetwork& net,
                                  const Complex& c) {
  if (c.is_zero()) return "0";
  std::string out;
  for (const auto& [s, coeff] : c.terms()) {
    if (!out.empty()) out += " + ";
    if (coeff != 1) out += std::to_string(coeff) + " ";
    out += net.species_names()[s];
  }
  return out;
}

/// Canonical text: a species line followed by one irreversible reaction
/// per line, each with explicit k and tau.
inline std::string format_network(const ReactionNetwork& net) {
  std::string out = "species";
  for (const auto& name : net.species_names()) out += " " + name;
  out += "\n";
  for (const auto& r : net.reactions()) {
    out += format_complex(net, r.source) + " -> " +
           format_complex(net, r.target) + " ; k=" +
           format_number(r.rate_constant) + " ; tau=" +
           format_number(r.delay) + "\n";
  }
  return out;
}

}  // namespace dcrn

#include "invar/parser.hpp"

#include "invar/canonical.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

namespace invar {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  explicit Cursor(const std::string& t) : text(t) {}

  bool eof() const { return pos >= text.size(); }
  char peek() const { return eof() ? '\0' : text[pos]; }
  char get() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    get();
  }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string read_ident(Cursor& cur) {
  if (!ident_start(cur.peek())) cur.fail("expected identifier");
  std::string s;
  while (!cur.eof() && ident_char(cur.peek())) s += cur.get();
  return s;
}

std::optional<Rational> read_rational(Cursor& cur) {
  // unsigned integer or integer/integer
  if (!std::isdigit(static_cast<unsigned char>(cur.peek()))) return std::nullopt;
  std::string num;
  while (std::isdigit(static_cast<unsigned char>(cur.peek()))) num += cur.get();
  std::string den;
  std::size_t save = cur.pos;
  int sl = cur.line, sc = cur.col;
  if (cur.peek() == '/') {
    cur.get();
    while (std::isdigit(static_cast<unsigned char>(cur.peek()))) den += cur.get();
    if (den.empty()) {
      cur.pos = save;
      cur.line = sl;
      cur.col = sc;
      den.clear();
    }
  }
  std::string s = den.empty() ? num : num + "/" + den;
  auto r = rational_from_string(s);
  if (!r) cur.fail("malformed rational '" + s + "'");
  return r;
}

std::vector<std::string> read_index_list(Cursor& cur) {
  cur.expect('[');
  std::vector<std::string> names;
  cur.skip_ws();
  if (cur.peek() == ']') {
    cur.get();
    return names;
  }
  while (true) {
    cur.skip_ws();
    names.push_back(read_ident(cur));
    cur.skip_ws();
    if (cur.peek() == ',') {
      cur.get();
      continue;
    }
    cur.expect(']');
    break;
  }
  return names;
}

struct RawFactor {
  Factor fac;
  std::vector<std::string> indices;  // derivative names first
};

std::optional<std::pair<FactorKind, int>> kind_from_token(const std::string& tok) {
  auto strip_flavor = [](const std::string& t, const std::string& prefix) -> std::optional<int> {
    if (t.size() < prefix.size() || t.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    std::string rest = t.substr(prefix.size());
    if (rest.empty()) return 0;
    for (char c : rest) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    }
    return std::stoi(rest);
  };
  if (tok == "R") return {{FactorKind::Riemann, 0}};
  if (tok == "W") return {{FactorKind::Weyl, 0}};
  if (tok == "P") return {{FactorKind::Schouten, 0}};
  if (tok == "Ric") return {{FactorKind::Ricci, 0}};
  if (tok == "Scal") return {{FactorKind::ScalarCurv, 0}};
  if (tok == "g") return {{FactorKind::Metric, 0}};
  if (tok == "gi") return {{FactorKind::InverseMetric, 0}};
  if (auto fl = strip_flavor(tok, "Sphi")) return {{FactorKind::SymPhi, *fl}};
  if (auto fl = strip_flavor(tok, "phi")) return {{FactorKind::Phi, *fl}};
  return std::nullopt;
}

RawFactor read_factor(Cursor& cur) {
  int ln = cur.line, cl = cur.col;
  std::string tok = read_ident(cur);
  if (tok == "D") {
    std::vector<std::string> dnames = read_index_list(cur);
    cur.skip_ws();
    cur.expect('(');
    cur.skip_ws();
    RawFactor inner = read_factor(cur);
    cur.skip_ws();
    cur.expect(')');
    inner.fac.deriv_order += static_cast<int>(dnames.size());
    inner.indices.insert(inner.indices.begin(), dnames.begin(), dnames.end());
    return inner;
  }
  auto kf = kind_from_token(tok);
  if (!kf) throw ParseError("unknown factor token '" + tok + "'", ln, cl);
  RawFactor rf;
  rf.fac.kind = kf->first;
  rf.fac.flavor = kf->second;
  cur.skip_ws();
  if (cur.peek() == '[') {
    rf.indices = read_index_list(cur);
  }
  int given = static_cast<int>(rf.indices.size());
  if (is_phi_kind(rf.fac.kind)) {
    if (given < 1) throw ParseError("arity error: " + tok + " needs at least one index", ln, cl);
    rf.fac.deriv_order = given;
  } else {
    int need = base_arity(rf.fac.kind);
    if (given != need) {
      throw ParseError("arity error: " + tok + " expects " + std::to_string(need) +
                           " indices, got " + std::to_string(given),
                       ln, cl);
    }
  }
  return rf;
}

LinearCombination parse_impl(const std::string& text, bool allow_free) {
  Cursor cur(text);
  LinearCombination lc;
  cur.skip_ws();
  if (cur.eof()) cur.fail("empty expression");
  bool first = true;
  // Free-index labels are stable across terms: o<digits> maps to that
  // number, other names count up from 1000.
  std::map<std::string, int> free_target;
  int next_unnamed = 1000;
  while (true) {
    cur.skip_ws();
    if (cur.eof()) break;
    Rational sign = 1;
    if (first) {
      if (cur.peek() == '-') {
        cur.get();
        sign = -1;
      } else if (cur.peek() == '+') {
        cur.get();
      }
    } else {
      char op = cur.peek();
      if (op != '+' && op != '-') cur.fail("expected '+' or '-' between terms");
      cur.get();
      if (op == '-') sign = -1;
    }
    cur.skip_ws();
    first = false;
    // term: [rational ['*']] factors... | rational
    Rational coeff = sign;
    bool have_factor = false;
    int term_line = cur.line, term_col = cur.col;
    if (auto r = read_rational(cur)) {
      coeff *= *r;
      cur.skip_ws();
      if (cur.peek() == '*') {
        cur.get();
        cur.skip_ws();
      } else if (!cur.eof() && ident_start(cur.peek())) {
        cur.fail("expected '*' between coefficient and factor");
      } else {
        // bare scalar term
        if (coeff != 0) {
          Contraction c;
          c.coeff = coeff;
          lc.terms.push_back(std::move(c));
        }
        cur.skip_ws();
        if (cur.eof()) break;
        continue;
      }
    }
    std::vector<RawFactor> raw;
    while (true) {
      raw.push_back(read_factor(cur));
      have_factor = true;
      cur.skip_ws();
      if (cur.peek() == '*') {
        cur.get();
        cur.skip_ws();
        continue;
      }
      break;
    }
    if (!have_factor) cur.fail("expected a factor");
    // Build contraction from index names.
    std::map<std::string, int> count;
    for (auto& rf : raw) {
      for (auto& nm : rf.indices) ++count[nm];
    }
    for (auto& [nm, ct] : count) {
      if (ct > 2) {
        throw ParseError("unbalanced index: '" + nm + "' appears " + std::to_string(ct) +
                             " times",
                         term_line, term_col);
      }
      if (ct == 1 && !allow_free) {
        throw ParseError("unbalanced index: '" + nm + "' appears once (free indices are "
                         "not allowed in a complete contraction)",
                         term_line, term_col);
      }
    }
    // pair names get per-term labels from 10000 up; frees keep their target
    std::map<std::string, int> pair_label;
    int next_pair = 10000;
    std::vector<Factor> facs;
    std::vector<std::vector<int>> labels;
    for (auto& rf : raw) {
      facs.push_back(rf.fac);
      std::vector<int> ls;
      for (auto& nm : rf.indices) {
        if (count[nm] == 1) {
          auto it = free_target.find(nm);
          if (it == free_target.end()) {
            int target;
            if (nm.size() > 1 && nm[0] == 'o' &&
                std::all_of(nm.begin() + 1, nm.end(), [](char ch) {
                  return std::isdigit(static_cast<unsigned char>(ch));
                })) {
              target = std::stoi(nm.substr(1));
              if (target >= 9999) {
                throw ParseError("free index label too large: " + nm, term_line, term_col);
              }
            } else {
              target = next_unnamed++;
            }
            it = free_target.emplace(nm, target).first;
          }
          ls.push_back(it->second);
        } else {
          auto it = pair_label.find(nm);
          if (it == pair_label.end()) it = pair_label.emplace(nm, next_pair++).first;
          ls.push_back(it->second);
        }
      }
      labels.push_back(std::move(ls));
    }
    Contraction c = from_labels(coeff, std::move(facs), labels);
    auto rep = validate(c);
    if (!rep.ok) {
      throw ParseError("validation error: " + rep.issues.front(), term_line, term_col);
    }
    c = eliminate_explicit_metrics(std::move(c));
    lc.terms.push_back(std::move(c));
    cur.skip_ws();
    if (cur.eof()) break;
  }
  return lc;
}

const std::vector<std::string>& index_names() {
  static const std::vector<std::string> base = {"i", "j", "k", "l", "m", "p", "q", "r",
                                                "s", "t", "u", "v", "w", "x", "y", "z",
                                                "a", "b", "c", "d", "e", "f", "h"};
  return base;
}

std::string nth_index_name(int i) {
  const auto& base = index_names();
  int nb = static_cast<int>(base.size());
  if (i < nb) return base[i];
  return base[i % nb] + std::to_string(i / nb);
}

std::string render_term(const Contraction& c) {
  // index naming in slot-traversal order
  std::ostringstream os;
  if (c.factors.empty()) {
    os << rational_to_string(c.coeff);
    return os.str();
  }
  Rational coeff = c.coeff;
  if (coeff != 1) {
    os << rational_to_string(coeff) << " * ";
  }
  std::map<std::pair<int, int>, std::string> name_of;  // slot -> name
  int next = 0;
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    for (std::size_t p = 0; p < c.part[f].size(); ++p) {
      if (name_of.count({static_cast<int>(f), static_cast<int>(p)})) continue;
      SlotRef o = c.part[f][p];
      std::string nm;
      if (o.is_free()) {
        nm = "o" + std::to_string(o.p);
      } else {
        nm = nth_index_name(next++);
        name_of[{o.f, o.p}] = nm;
      }
      name_of[{static_cast<int>(f), static_cast<int>(p)}] = nm;
    }
  }
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    if (f > 0) os << "*";
    const Factor& fac = c.factors[f];
    int m = is_phi_kind(fac.kind) ? 0 : fac.deriv_order;
    auto emit_indices = [&](int from, int to) {
      os << "[";
      for (int p = from; p < to; ++p) {
        if (p > from) os << ",";
        os << name_of[{static_cast<int>(f), p}];
      }
      os << "]";
    };
    std::string tok = kind_token(fac.kind);
    if (is_phi_kind(fac.kind) && fac.flavor != 0) tok += std::to_string(fac.flavor);
    if (m > 0) {
      os << "D";
      emit_indices(0, m);
      os << "(" << tok;
      if (fac.arity() - m > 0) emit_indices(m, fac.arity());
      os << ")";
    } else {
      os << tok;
      if (fac.arity() > 0) emit_indices(0, fac.arity());
    }
  }
  return os.str();
}

}  // namespace

LinearCombination parse(const std::string& text) { return parse_impl(text, false); }
LinearCombination parse_open(const std::string& text) { return parse_impl(text, true); }

std::string print(const Contraction& c) {
  LinearCombination lc;
  lc.terms.push_back(c);
  return print(lc);
}

std::string print(const LinearCombination& lc) {
  // canonicalize each term (pure monoterm step, no dimension needed), order
  // by canonical key
  std::vector<std::pair<CanonicalKey, Contraction>> items;
  for (const auto& t : lc.terms) {
    if (t.coeff == 0) continue;
    CanonicalForm cf = canonical_form(t);
    if (cf.rep.coeff == 0) continue;
    items.emplace_back(std::move(cf.key), std::move(cf.rep));
  }
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (items.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [k, t] : items) {
    if (first) {
      os << render_term(t);
      first = false;
      continue;
    }
    Contraction u = t;
    if (u.coeff < 0) {
      os << " - ";
      u.coeff = -u.coeff;
    } else {
      os << " + ";
    }
    os << render_term(u);
  }
  return os.str();
}

}  // namespace invar

#pragma once

// Formulas of the restricted continuous language and their text syntax.
//
//   condition := formula CMP rational            CMP: < > <= >=
//   formula   := primary { "-." primary }        (left associative)
//   primary   := 0 | 1 | half(f) | max(f, f) | min(f, f) | d(t, t) | R(t, ...)
//              | inf v . f | sup v . f | ( f )
//   term      := IDENT | IDENT(t, ...)
//
// A quantifier body extends as far right as possible.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "msf/errors.hpp"
#include "msf/rational.hpp"
#include "msf/sheaf.hpp"

namespace msf {

struct Term {
  enum class Kind { Var, Const, Func };
  Kind kind = Kind::Var;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string n) { return Term{Kind::Var, std::move(n), {}}; }
  static Term constant(std::string n) { return Term{Kind::Const, std::move(n), {}}; }
  static Term apply(std::string f, std::vector<Term> args) { return Term{Kind::Func, std::move(f), std::move(args)}; }

  friend bool operator==(const Term&, const Term&) = default;
};

enum class Connective { Zero, One, Half, TruncSub, Max, Min, Dist, Rel, Inf, Sup };

/// Immutable formula handle; copies share structure.
class Formula {
 public:
  struct Node {
    Connective kind;
    std::string name;  // relation symbol or bound variable
    std::vector<Term> terms;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  Formula() : Formula(Connective::Zero) {}

  static Formula zero() { return Formula(Connective::Zero); }
  static Formula one() { return Formula(Connective::One); }
  static Formula half(Formula f) { return Formula(Connective::Half, {}, {}, f.node_); }
  static Formula trunc_sub(Formula a, Formula b) { return Formula(Connective::TruncSub, {}, {}, a.node_, b.node_); }
  static Formula max(Formula a, Formula b) { return Formula(Connective::Max, {}, {}, a.node_, b.node_); }
  static Formula min(Formula a, Formula b) { return Formula(Connective::Min, {}, {}, a.node_, b.node_); }
  static Formula dist(Term a, Term b) { return Formula(Connective::Dist, {}, {std::move(a), std::move(b)}); }
  static Formula rel(std::string r, std::vector<Term> args) {
    return Formula(Connective::Rel, std::move(r), std::move(args));
  }
  static Formula inf(std::string v, Formula body) { return Formula(Connective::Inf, std::move(v), {}, body.node_); }
  static Formula sup(std::string v, Formula body) { return Formula(Connective::Sup, std::move(v), {}, body.node_); }

  Connective kind() const { return node_->kind; }
  /// Relation symbol for Rel, bound variable for Inf/Sup.
  const std::string& name() const { return node_->name; }
  const std::vector<Term>& terms() const { return node_->terms; }
  Formula left() const { return Formula(node_->left); }
  Formula right() const { return Formula(node_->right); }
  /// Body of Half, Inf and Sup.
  Formula body() const { return left(); }
  const Node* node() const { return node_.get(); }

  bool is_quantifier() const { return kind() == Connective::Inf || kind() == Connective::Sup; }

  friend bool operator==(const Formula& a, const Formula& b) { return equal(a.node_.get(), b.node_.get()); }

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  explicit Formula(Connective k, std::string name = {}, std::vector<Term> terms = {},
                   std::shared_ptr<const Node> l = nullptr, std::shared_ptr<const Node> r = nullptr)
      : node_(std::make_shared<const Node>(Node{k, std::move(name), std::move(terms), std::move(l), std::move(r)})) {}

  static bool equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->kind == b->kind && a->name == b->name && a->terms == b->terms && equal(a->left.get(), b->left.get()) &&
           equal(a->right.get(), b->right.get());
  }

  std::shared_ptr<const Node> node_;
};

enum class Cmp { Less, Greater, LessEq, GreaterEq };

inline std::string to_string(Cmp c) {
  switch (c) {
    case Cmp::Less: return "<";
    case Cmp::Greater: return ">";
    case Cmp::LessEq: return "<=";
    case Cmp::GreaterEq: return ">=";
  }
  return "?";
}

struct Condition {
  Formula formula;
  Cmp cmp = Cmp::Less;
  Rational eps;

  friend bool operator==(const Condition&, const Condition&) = default;
};

// --- printing ---

inline std::string print_term(const Term& t) {
  if (t.kind != Term::Kind::Func) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) out += (i ? "," : "") + print_term(t.args[i]);
  return out + ")";
}

inline std::string print_formula(const Formula& f) {
  auto args = [](const std::vector<Term>& ts) {
    std::string out;
    for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? "," : "") + print_term(ts[i]);
    return out;
  };
  switch (f.kind()) {
    case Connective::Zero: return "0";
    case Connective::One: return "1";
    case Connective::Half: return "half(" + print_formula(f.body()) + ")";
    case Connective::Max: return "max(" + print_formula(f.left()) + ", " + print_formula(f.right()) + ")";
    case Connective::Min: return "min(" + print_formula(f.left()) + ", " + print_formula(f.right()) + ")";
    case Connective::Dist: return "d(" + args(f.terms()) + ")";
    case Connective::Rel: return f.name() + "(" + args(f.terms()) + ")";
    case Connective::Inf: return "inf " + f.name() + " . " + print_formula(f.body());
    case Connective::Sup: return "sup " + f.name() + " . " + print_formula(f.body());
    case Connective::TruncSub: {
      const Formula l = f.left();
      const Formula r = f.right();
      std::string ls = print_formula(l);
      std::string rs = print_formula(r);
      if (l.is_quantifier()) ls = "(" + ls + ")";
      if (r.is_quantifier() || r.kind() == Connective::TruncSub) rs = "(" + rs + ")";
      return ls + " -. " + rs;
    }
  }
  return "?";
}

inline std::string print_condition(const Condition& c) {
  return print_formula(c.formula) + " " + to_string(c.cmp) + " " + to_string(c.eps);
}

// --- variables ---

inline void term_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) out.insert(t.name);
  for (const auto& a : t.args) term_vars(a, out);
}

inline void collect_free_vars(const Formula& f, std::set<std::string> bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case Connective::Zero:
    case Connective::One: return;
    case Connective::Dist:
    case Connective::Rel: {
      std::set<std::string> vs;
      for (const auto& t : f.terms()) term_vars(t, vs);
      for (const auto& v : vs) {
        if (!bound.count(v)) out.insert(v);
      }
      return;
    }
    case Connective::Half: collect_free_vars(f.body(), bound, out); return;
    case Connective::Inf:
    case Connective::Sup:
      bound.insert(f.name());
      collect_free_vars(f.body(), bound, out);
      return;
    default:
      collect_free_vars(f.left(), bound, out);
      collect_free_vars(f.right(), bound, out);
  }
}

inline std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> out;
  collect_free_vars(f, {}, out);
  return out;
}

inline int quantifier_count(const Formula& f) {
  switch (f.kind()) {
    case Connective::Zero:
    case Connective::One:
    case Connective::Dist:
    case Connective::Rel: return 0;
    case Connective::Half: return quantifier_count(f.body());
    case Connective::Inf:
    case Connective::Sup: return 1 + quantifier_count(f.body());
    default: return quantifier_count(f.left()) + quantifier_count(f.right());
  }
}

namespace detail {

inline Term rename_term(const Term& t, const std::string& from, const std::string& to) {
  Term out = t;
  if (out.kind == Term::Kind::Var && out.name == from) out.name = to;
  for (auto& a : out.args) a = rename_term(a, from, to);
  return out;
}

// Renames free occurrences of `from` in f.
inline Formula rename_free(const Formula& f, const std::string& from, const std::string& to) {
  switch (f.kind()) {
    case Connective::Zero:
    case Connective::One: return f;
    case Connective::Dist:
      return Formula::dist(rename_term(f.terms()[0], from, to), rename_term(f.terms()[1], from, to));
    case Connective::Rel: {
      std::vector<Term> ts;
      for (const auto& t : f.terms()) ts.push_back(rename_term(t, from, to));
      return Formula::rel(f.name(), std::move(ts));
    }
    case Connective::Half: return Formula::half(rename_free(f.body(), from, to));
    case Connective::Inf:
    case Connective::Sup: {
      if (f.name() == from) return f;
      auto body = rename_free(f.body(), from, to);
      return f.kind() == Connective::Inf ? Formula::inf(f.name(), body) : Formula::sup(f.name(), body);
    }
    case Connective::TruncSub:
      return Formula::trunc_sub(rename_free(f.left(), from, to), rename_free(f.right(), from, to));
    case Connective::Max: return Formula::max(rename_free(f.left(), from, to), rename_free(f.right(), from, to));
    case Connective::Min: return Formula::min(rename_free(f.left(), from, to), rename_free(f.right(), from, to));
  }
  return f;
}

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig) : text_(text), sig_(sig) {}

  Condition condition() {
    Formula f = formula();
    skip_ws();
    const std::size_t at = pos_;
    Cmp cmp;
    if (eat("<=")) cmp = Cmp::LessEq;
    else if (eat(">=")) cmp = Cmp::GreaterEq;
    else if (eat("<")) cmp = Cmp::Less;
    else if (eat(">")) cmp = Cmp::Greater;
    else throw SyntaxError("expected comparison", at);
    Rational eps = rational();
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
    if (eps <= Rational(0) || eps >= Rational(1)) throw EpsOutOfRange("threshold " + to_string(eps) + " is outside (0,1)");
    return Condition{finish(f), cmp, eps};
  }

  Formula standalone_formula() {
    Formula f = formula();
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
    return finish(f);
  }

 private:
  // Renames bound variables that collide with a constant, an enclosing bound
  // variable or a free variable of the whole formula.
  Formula finish(const Formula& f) {
    const auto free = free_vars(f);
    return rename_bound(f, {}, free);
  }

  Formula rename_bound(const Formula& f, std::set<std::string> enclosing, const std::set<std::string>& free) {
    switch (f.kind()) {
      case Connective::Zero:
      case Connective::One:
      case Connective::Dist:
      case Connective::Rel: return f;
      case Connective::Half: return Formula::half(rename_bound(f.body(), enclosing, free));
      case Connective::Inf:
      case Connective::Sup: {
        std::string v = f.name();
        Formula body = f.body();
        if (sig_.has_constant(v) || enclosing.count(v) || free.count(v)) {
          std::string fresh;
          for (int k = 1;; ++k) {
            fresh = v + "_" + std::to_string(k);
            if (text_.find(fresh) == std::string_view::npos && !sig_.has_constant(fresh)) break;
          }
          body = rename_free(body, v, fresh);
          v = fresh;
        }
        enclosing.insert(v);
        body = rename_bound(body, enclosing, free);
        return f.kind() == Connective::Inf ? Formula::inf(v, body) : Formula::sup(v, body);
      }
      case Connective::TruncSub:
        return Formula::trunc_sub(rename_bound(f.left(), enclosing, free), rename_bound(f.right(), enclosing, free));
      case Connective::Max:
        return Formula::max(rename_bound(f.left(), enclosing, free), rename_bound(f.right(), enclosing, free));
      case Connective::Min:
        return Formula::min(rename_bound(f.left(), enclosing, free), rename_bound(f.right(), enclosing, free));
    }
    return f;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    skip_ws();
    if (!eat(tok)) throw SyntaxError("expected '" + std::string(tok) + "'", pos_);
  }

  std::string peek_ident() {
    skip_ws();
    std::size_t p = pos_;
    if (p >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[p])) || text_[p] == '_')) return {};
    while (p < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_')) ++p;
    return std::string(text_.substr(pos_, p - pos_));
  }

  std::string ident() {
    std::string id = peek_ident();
    if (id.empty()) throw SyntaxError("expected identifier", pos_);
    pos_ += id.size();
    return id;
  }

  bool next_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  std::int64_t integer() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw SyntaxError("expected number", start);
    return static_cast<std::int64_t>(std::stoll(std::string(text_.substr(start, pos_ - start))));
  }

  Rational rational() {
    skip_ws();
    const std::size_t at = pos_;
    const std::int64_t num = integer();
    if (eat("/")) {
      const std::int64_t den = integer();
      if (den == 0) throw SyntaxError("zero denominator", at);
      return Rational(num, den);
    }
    return Rational(num);
  }

  Formula formula() {
    Formula f = primary();
    while (eat("-.")) f = Formula::trunc_sub(f, primary());
    return f;
  }

  Formula primary() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", at);
    if (eat("(")) {
      Formula f = formula();
      expect(")");
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const std::int64_t v = integer();
      if (v == 0) return Formula::zero();
      if (v == 1) return Formula::one();
      throw SyntaxError("only 0 and 1 are formula constants", at);
    }
    const std::string id = ident();
    if (id == "inf" || id == "sup") {
      const std::string v = ident();
      expect(".");
      bound_.push_back(v);
      Formula body = formula();
      bound_.pop_back();
      return id == "inf" ? Formula::inf(v, body) : Formula::sup(v, body);
    }
    if (id == "half" && next_is('(')) {
      expect("(");
      Formula f = formula();
      expect(")");
      return Formula::half(f);
    }
    if ((id == "max" || id == "min") && next_is('(')) {
      expect("(");
      Formula a = formula();
      expect(",");
      Formula b = formula();
      expect(")");
      return id == "max" ? Formula::max(a, b) : Formula::min(a, b);
    }
    if (id == "d" && next_is('(')) {
      auto ts = term_list();
      if (ts.size() != 2) throw ArityError("d takes two arguments");
      return Formula::dist(ts[0], ts[1]);
    }
    if (next_is('(')) {
      auto it = sig_.relations.find(id);
      if (it == sig_.relations.end()) throw SyntaxError("unknown relation '" + id + "'", at);
      auto ts = term_list();
      if (static_cast<int>(ts.size()) != it->second) {
        throw ArityError("relation '" + id + "' takes " + std::to_string(it->second) + " arguments");
      }
      return Formula::rel(id, std::move(ts));
    }
    throw SyntaxError("expected formula", at);
  }

  std::vector<Term> term_list() {
    expect("(");
    std::vector<Term> ts{term()};
    while (eat(",")) ts.push_back(term());
    expect(")");
    return ts;
  }

  Term term() {
    skip_ws();
    const std::size_t at = pos_;
    const std::string id = ident();
    if (next_is('(')) {
      auto it = sig_.functions.find(id);
      if (it == sig_.functions.end()) throw SyntaxError("unknown function '" + id + "'", at);
      auto ts = term_list();
      if (static_cast<int>(ts.size()) != it->second) {
        throw ArityError("function '" + id + "' takes " + std::to_string(it->second) + " arguments");
      }
      return Term::apply(id, std::move(ts));
    }
    for (const auto& b : bound_) {
      if (b == id) return Term::var(id);
    }
    if (sig_.has_constant(id)) return Term::constant(id);
    return Term::var(id);
  }

  std::string_view text_;
  const Signature& sig_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
};

}  // namespace detail

inline Condition parse_condition(std::string_view text, const Signature& sig) {
  return detail::Parser(text, sig).condition();
}

inline Formula parse_formula(std::string_view text, const Signature& sig) {
  return detail::Parser(text, sig).standalone_formula();
}

// --- enumeration ---

/// Size measure used to bound enumeration: every node counts once except the
/// constants 0 and 1; a function application inside a term counts once.
inline int formula_weight(const Formula& f) {
  auto term_weight = [](auto&& self, const Term& t) -> int {
    int w = t.kind == Term::Kind::Func ? 1 : 0;
    for (const auto& a : t.args) w += self(self, a);
    return w;
  };
  switch (f.kind()) {
    case Connective::Zero:
    case Connective::One: return 0;
    case Connective::Dist:
    case Connective::Rel: {
      int w = 1;
      for (const auto& t : f.terms()) w += term_weight(term_weight, t);
      return w;
    }
    case Connective::Half:
    case Connective::Inf:
    case Connective::Sup: return 1 + formula_weight(f.body());
    default: return 1 + formula_weight(f.left()) + formula_weight(f.right());
  }
}

/// Name of the variable bound by a quantifier at nesting level `level`.
inline std::string bound_name(int level) { return level == 0 ? "s" : "s" + std::to_string(level); }

namespace detail {

class FormulaEnumerator {
 public:
  FormulaEnumerator(const Signature& sig, std::vector<std::string> vars) : sig_(sig), vars_(std::move(vars)) {}

  // Formulas of exactly weight w with exactly q quantifiers, where `level`
  // quantifiers are already open around them.
  const std::vector<Formula>& exact(int w, int q, int level) {
    const auto key = std::make_tuple(w, q, level);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Formula> out;
    if (w == 0) {
      if (q == 0) out = {Formula::zero(), Formula::one()};
    } else {
      if (q == 0) {
        for (const auto& a : atoms(w, level)) out.push_back(a);
      }
      for (const auto& f : exact(w - 1, q, level)) out.push_back(Formula::half(f));
      for (int kind = 0; kind < 3; ++kind) {
        for (int wl = 0; wl <= w - 1; ++wl) {
          for (int ql = 0; ql <= q; ++ql) {
            const auto& ls = exact(wl, ql, level);
            if (ls.empty()) continue;
            const auto& rs = exact(w - 1 - wl, q - ql, level);
            for (const auto& l : ls) {
              for (const auto& r : rs) {
                out.push_back(kind == 0 ? Formula::trunc_sub(l, r) : kind == 1 ? Formula::max(l, r) : Formula::min(l, r));
              }
            }
          }
        }
      }
      if (q >= 1) {
        const std::string v = bound_name(level);
        for (const auto& b : exact(w - 1, q - 1, level + 1)) out.push_back(Formula::inf(v, b));
        for (const auto& b : exact(w - 1, q - 1, level + 1)) out.push_back(Formula::sup(v, b));
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  // Terms of the given weight (number of function applications) in scope.
  std::vector<Term> terms(int w, int level) {
    std::vector<Term> base;
    for (const auto& v : vars_) base.push_back(Term::var(v));
    for (int l = 0; l < level; ++l) base.push_back(Term::var(bound_name(l)));
    for (const auto& c : sig_.constants) base.push_back(Term::constant(c));
    if (w == 0) return base;
    std::vector<Term> out;
    if (w == 1) {
      for (const auto& [f, arity] : sig_.functions) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
        while (!base.empty()) {
          std::vector<Term> args;
          for (auto i : idx) args.push_back(base[i]);
          out.push_back(Term::apply(f, std::move(args)));
          std::size_t k = idx.size();
          while (k > 0 && ++idx[k - 1] == base.size()) idx[--k] = 0;
          if (k == 0) break;
        }
      }
    }
    return out;
  }

  // Tuples of terms whose weights sum to `w`.
  void term_tuples(int arity, int w, int level, std::vector<Term>& prefix, std::vector<std::vector<Term>>& out) {
    if (static_cast<int>(prefix.size()) == arity) {
      if (w == 0) out.push_back(prefix);
      return;
    }
    for (int tw = 0; tw <= std::min(w, 1); ++tw) {
      for (const auto& t : terms(tw, level)) {
        prefix.push_back(t);
        term_tuples(arity, w - tw, level, prefix, out);
        prefix.pop_back();
      }
    }
  }

  std::vector<Formula> atoms(int w, int level) {
    std::vector<Formula> out;
    std::vector<Term> prefix;
    std::vector<std::vector<Term>> tuples;
    term_tuples(2, w - 1, level, prefix, tuples);
    for (auto& t : tuples) out.push_back(Formula::dist(t[0], t[1]));
    for (const auto& [r, arity] : sig_.relations) {
      tuples.clear();
      term_tuples(arity, w - 1, level, prefix, tuples);
      for (auto& t : tuples) out.push_back(Formula::rel(r, std::move(t)));
    }
    return out;
  }

  const Signature& sig_;
  std::vector<std::string> vars_;
  std::map<std::tuple<int, int, int>, std::vector<Formula>> memo_;
};

}  // namespace detail

/// Every formula of weight at most `max_depth` with at most `max_quantifiers`
/// quantifiers over the given free variables; ordered by weight, then
/// quantifier count, then construction order.
inline std::vector<Formula> enumerate_formulas(const Signature& sig, int max_depth, int max_quantifiers,
                                               const std::vector<std::string>& vars) {
  detail::FormulaEnumerator gen(sig, vars);
  std::vector<Formula> out;
  for (int w = 0; w <= max_depth; ++w) {
    for (int q = 0; q <= max_quantifiers; ++q) {
      const auto& bucket = gen.exact(w, q, 0);
      out.insert(out.end(), bucket.begin(), bucket.end());
    }
  }
  return out;
}

}  // namespace msf

#include "srg/text_format.hpp"

#include <cctype>
#include <optional>
#include <sstream>

#include "srg/errors.hpp"

namespace srg {

namespace {

enum class Tok { Num, Var, Dir, Plus, Minus, Star, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  Rational value;     // Num
  std::size_t index;  // Var/Dir, 0-based
  int line, column;
};

class Lexer {
 public:
  Lexer(std::string_view s, int line, int col0) : s_(s), line_(line), col0_(col0) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      const int col = col0_ + static_cast<int>(pos_);
      if (pos_ >= s_.size()) {
        out.push_back({Tok::End, 0, 0, line_, col});
        return out;
      }
      const char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back({Tok::Num, number(), 0, line_, col});
      } else if (c == 'x' || c == 'd') {
        ++pos_;
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
          throw ParseError(std::string("expected an index after '") + c + "'", line_, col);
        std::size_t k = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) k = 10 * k + (s_[pos_++] - '0');
        if (k == 0) throw ParseError("indices start at 1", line_, col);
        out.push_back({c == 'x' ? Tok::Var : Tok::Dir, 0, k - 1, line_, col});
      } else {
        Tok t;
        switch (c) {
          case '+': t = Tok::Plus; break;
          case '-': t = Tok::Minus; break;
          case '*': t = Tok::Star; break;
          case '^': t = Tok::Caret; break;
          case '(': t = Tok::LParen; break;
          case ')': t = Tok::RParen; break;
          default: throw ParseError(std::string("unexpected character '") + c + "'", line_, col);
        }
        ++pos_;
        out.push_back({t, 0, 0, line_, col});
      }
    }
  }

 private:
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  Rational number() {
    const int col = col0_ + static_cast<int>(pos_);
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    Rational q;
    try {
      q = parse_rational(s_.substr(start, pos_ - start));
    } catch (const InvalidInput& e) {
      throw ParseError(e.what(), line_, col);
    }
    const std::size_t save = pos_;
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      skip_space();
      const std::size_t ds = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (ds == pos_) throw ParseError("expected a denominator after '/'", line_, col0_ + static_cast<int>(pos_));
      const Rational den(std::string(s_.substr(ds, pos_ - ds)));
      if (den == 0) throw ParseError("zero denominator", line_, col);
      q /= den;
    } else {
      pos_ = save;
    }
    return q;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_, col0_;
};

// Either a scalar polynomial or a vector field.
struct Value {
  std::optional<Polynomial> scalar;
  std::optional<PolyVectorField> field;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::size_t dim) : t_(std::move(toks)), dim_(dim) {}

  Value parse() {
    Value v = expr();
    if (peek().kind != Tok::End) fail("unexpected token");
    return v;
  }

 private:
  const Token& peek() const { return t_[i_]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }

  Value expr() {
    Value v = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const bool minus = peek().kind == Tok::Minus;
      const Token op = peek();
      ++i_;
      Value w = term();
      if (minus) w = negate(w);
      v = add(v, w, op);
    }
    return v;
  }

  Value term() {
    Value v = unary();
    while (peek().kind == Tok::Star) {
      const Token op = peek();
      ++i_;
      v = mul(v, unary(), op);
    }
    return v;
  }

  Value unary() {
    if (peek().kind == Tok::Minus) {
      ++i_;
      return negate(unary());
    }
    if (peek().kind == Tok::Plus) {
      ++i_;
      return unary();
    }
    return power();
  }

  Value power() {
    Value v = primary();
    if (peek().kind != Tok::Caret) return v;
    const Token op = peek();
    ++i_;
    const Token e = peek();
    if (e.kind != Tok::Num || e.value.get_den() != 1 || e.value < 0) fail("exponent must be a nonnegative integer");
    if (!v.scalar) throw ParseError("power of a vector field", op.line, op.column);
    ++i_;
    Polynomial out = Polynomial::constant(dim_, Rational(1));
    for (long k = 0; k < e.value.get_num().get_si(); ++k) out = out * *v.scalar;
    return {out, std::nullopt};
  }

  Value primary() {
    const Token tok = peek();
    switch (tok.kind) {
      case Tok::Num:
        ++i_;
        return {Polynomial::constant(dim_, tok.value), std::nullopt};
      case Tok::Var:
        if (tok.index >= dim_) fail("variable index exceeds the dimension");
        ++i_;
        return {Polynomial::variable(dim_, tok.index), std::nullopt};
      case Tok::Dir:
        if (tok.index >= dim_) fail("direction index exceeds the dimension");
        ++i_;
        return {std::nullopt, PolyVectorField::coordinate(dim_, tok.index)};
      case Tok::LParen: {
        ++i_;
        Value v = expr();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        ++i_;
        return v;
      }
      default:
        fail("expected a number, xN, dN or '('");
    }
  }

  static Value negate(Value v) {
    if (v.scalar) v.scalar = -*v.scalar;
    if (v.field) v.field = -*v.field;
    return v;
  }

  Value add(const Value& a, const Value& b, const Token& op) const {
    if (a.scalar && b.scalar) return {*a.scalar + *b.scalar, std::nullopt};
    if (a.field && b.field) return {std::nullopt, *a.field + *b.field};
    // a zero scalar may be added to a field
    if (a.scalar && a.scalar->is_zero()) return b;
    if (b.scalar && b.scalar->is_zero()) return a;
    throw ParseError("cannot add a scalar and a vector field", op.line, op.column);
  }

  Value mul(const Value& a, const Value& b, const Token& op) const {
    if (a.scalar && b.scalar) return {*a.scalar * *b.scalar, std::nullopt};
    if (a.scalar && b.field) return {std::nullopt, *a.scalar * *b.field};
    if (a.field && b.scalar) return {std::nullopt, *b.scalar * *a.field};
    throw ParseError("product of two vector fields", op.line, op.column);
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
  std::size_t dim_;
};

std::size_t max_index(const std::vector<Token>& toks) {
  std::size_t n = 0;
  for (const auto& t : toks)
    if (t.kind == Tok::Var || t.kind == Tok::Dir) n = std::max(n, t.index + 1);
  return n;
}

Value parse_value(std::string_view text, std::size_t dim, int line, int col0) {
  auto toks = Lexer(text, line, col0).run();
  if (dim == 0) dim = std::max<std::size_t>(1, max_index(toks));
  return Parser(std::move(toks), dim).parse();
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty number");
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw InvalidInput("zero denominator");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }
  bool neg = false;
  if (text.front() == '-' || text.front() == '+') {
    neg = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  std::string digits(text.substr(0, dot));
  std::string frac = dot == std::string_view::npos ? std::string() : std::string(text.substr(dot + 1));
  if (digits.empty() && frac.empty()) throw InvalidInput("malformed number");
  for (char c : digits + frac)
    if (!std::isdigit(static_cast<unsigned char>(c))) throw InvalidInput("malformed number '" + std::string(text) + "'");
  mpz_class num(digits.empty() ? std::string("0") : digits);
  mpz_class den = 1;
  for (char c : frac) {
    num = num * 10 + (c - '0');
    den *= 10;
  }
  Rational q(num, den);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

std::vector<NamedField> parse_frame(std::string_view text, std::size_t dim) {
  struct Line {
    std::string name;
    std::string_view rhs;
    int line, col;
  };
  std::vector<Line> lines;
  int lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    ++lineno;
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(start, end - start);
    start = end + 1;
    std::size_t first = l.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || l[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'name = field'", lineno, static_cast<int>(first) + 1);
    std::string name(l.substr(first, eq - first));
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    if (name.empty()) throw ParseError("missing field name", lineno, static_cast<int>(first) + 1);
    lines.push_back({name, l.substr(eq + 1), lineno, static_cast<int>(eq) + 2});
    if (end == text.size()) break;
  }
  if (dim == 0)
    for (const auto& l : lines) dim = std::max(dim, max_index(Lexer(l.rhs, l.line, l.col).run()));
  if (dim == 0) dim = 1;
  std::vector<NamedField> out;
  for (const auto& l : lines) {
    Value v = parse_value(l.rhs, dim, l.line, l.col);
    if (v.scalar && !v.scalar->is_zero())
      throw ParseError("right-hand side of '" + l.name + "' is not a vector field", l.line, l.col);
    out.push_back({l.name, v.field ? *v.field : PolyVectorField(dim)});
  }
  return out;
}

std::vector<PolyVectorField> fields_of(const std::vector<NamedField>& named) {
  std::vector<PolyVectorField> out;
  for (const auto& f : named) out.push_back(f.field);
  return out;
}

PolyVectorField parse_field(std::string_view text, std::size_t dim) {
  if (dim == 0) throw InvalidInput("field parsing needs a dimension");
  Value v = parse_value(text, dim, 1, 1);
  if (v.scalar && !v.scalar->is_zero()) throw ParseError("expression is not a vector field", 1, 1);
  return v.field ? *v.field : PolyVectorField(dim);
}

Polynomial parse_polynomial(std::string_view text, std::size_t dim) {
  if (dim == 0) throw InvalidInput("polynomial parsing needs a dimension");
  Value v = parse_value(text, dim, 1, 1);
  if (v.field) throw ParseError("expression is a vector field, expected a polynomial", 1, 1);
  return *v.scalar;
}

std::string to_string(const Rational& q) { return q.get_str(); }

namespace {

// one signed term: coefficient, monomial and an optional trailing factor (dj)
void append_term(std::ostringstream& os, bool first, const Rational& c, const Polynomial::Exponent& e,
                 const std::string& tail) {
  Rational a = abs(c);
  if (c < 0)
    os << (first ? "-" : " - ");
  else if (!first)
    os << " + ";
  std::vector<std::string> f;
  if (a != 1) f.push_back(a.get_str());
  for (std::size_t i = 0; i < e.size(); ++i)
    for (unsigned k = 0; k < e[i]; ++k) f.push_back("x" + std::to_string(i + 1));
  if (!tail.empty()) f.push_back(tail);
  if (f.empty()) f.push_back("1");
  for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "*" : "") << f[i];
}

}  // namespace

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    append_term(os, first, c, e, "");
    first = false;
  }
  return os.str();
}

std::string to_string(const PolyVectorField& X) {
  if (X.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t j = 0; j < X.dim(); ++j)
    for (const auto& [e, c] : X[j].terms()) {
      append_term(os, first, c, e, "d" + std::to_string(j + 1));
      first = false;
    }
  return os.str();
}

}  // namespace srg

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "sugra/expr.hpp"

namespace sugra {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Chart& chart) : s_(text), chart_(chart) {}

  Expr parse() {
    skip_ws();
    if (pos_ == s_.size()) fail(ParseErrorKind::Syntax, "empty expression");
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail(ParseErrorKind::Syntax, std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(ParseErrorKind kind, const std::string& msg) const {
    throw ParseError(kind, pos_, msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) {
      fail(ParseErrorKind::Syntax, std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  Expr expr() {
    Expr acc = term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        acc = Expr::add({acc, term()});
      } else if (peek('-')) {
        ++pos_;
        acc = Expr::add({acc, Expr::neg(term())});
      } else {
        return acc;
      }
    }
  }

  Expr term() {
    Expr acc = factor();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        acc = Expr::mul({acc, factor()});
      } else if (peek('/')) {
        ++pos_;
        acc = Expr::div(acc, factor());
      } else {
        return acc;
      }
    }
  }

  Expr factor() {
    bool negate = false;
    if (peek('-')) {
      ++pos_;
      negate = true;
    }
    Expr b = base();
    if (peek('^')) {
      ++pos_;
      b = Expr::pow(b, signed_integer());
    }
    return negate ? Expr::neg(b) : b;
  }

  int signed_integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    bool bad = pos_ == digits;
    if (!bad && pos_ < s_.size() &&
        (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E' ||
         std::isalpha(static_cast<unsigned char>(s_[pos_])))) {
      bad = true;
    }
    if (bad) {
      pos_ = start;
      fail(ParseErrorKind::MalformedExponent, "exponent must be a signed integer");
    }
    int value = 0;
    const char* first = s_.data() + start + (s_[start] == '+' ? 1 : 0);
    auto [ptr, ec] = std::from_chars(first, s_.data() + pos_, value);
    if (ec != std::errc()) {
      pos_ = start;
      fail(ParseErrorKind::MalformedExponent, "exponent out of range");
    }
    return value;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= s_.size()) fail(ParseErrorKind::Syntax, "unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    fail(ParseErrorKind::Syntax, std::string("unexpected '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t int_digits = digits();
    std::size_t frac_digits = 0;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      frac_digits = digits();
    }
    if (int_digits + frac_digits == 0) {
      pos_ = start;
      fail(ParseErrorKind::Syntax, "malformed number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t epos = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = epos;
        fail(ParseErrorKind::MalformedExponent, "malformed exponent in number");
      }
    }
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      fail(ParseErrorKind::Syntax, "number followed by identifier");
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || !std::isfinite(v)) {
      pos_ = start;
      fail(ParseErrorKind::Syntax, "number out of range");
    }
    return Expr::constant(v);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    std::string_view name = s_.substr(start, pos_ - start);
    if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
      if (!peek('(')) fail(ParseErrorKind::Syntax, "expected '(' after " + std::string(name));
      ++pos_;
      Expr a = expr();
      expect(')');
      if (name == "sin") return Expr::sin(a);
      if (name == "cos") return Expr::cos(a);
      if (name == "exp") return Expr::exp(a);
      return Expr::sqrt(a);
    }
    auto idx = chart_.index_of(name);
    if (!idx) {
      pos_ = start;
      fail(ParseErrorKind::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'");
    }
    return Expr::coord(*idx);
  }

  std::string_view s_;
  const Chart& chart_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::abs(v));
  return std::string(buf, ptr);
}

bool is_atom(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Const: return e.value() >= 0.0;
    case ExprKind::Coord:
    case ExprKind::Sqrt:
    case ExprKind::Exp:
    case ExprKind::Sin:
    case ExprKind::Cos: return true;
    default: return false;
  }
}

void print(const Expr& e, const Chart& chart, std::string& out);

void print_wrapped(const Expr& e, const Chart& chart, std::string& out) {
  if (is_atom(e)) {
    print(e, chart, out);
  } else {
    out += '(';
    print(e, chart, out);
    out += ')';
  }
}

void print(const Expr& e, const Chart& chart, std::string& out) {
  auto a = e.args();
  switch (e.kind()) {
    case ExprKind::Const:
      if (e.value() < 0.0) out += '-';
      out += format_number(e.value());
      return;
    case ExprKind::Coord:
      if (e.coord_index() >= chart.dim()) throw StructureError("coordinate outside chart");
      out += chart.name(e.coord_index());
      return;
    case ExprKind::Add:
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += " + ";
        print_wrapped(a[i], chart, out);
      }
      return;
    case ExprKind::Mul:
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += " * ";
        print_wrapped(a[i], chart, out);
      }
      return;
    case ExprKind::Neg:
      out += '-';
      print_wrapped(a[0], chart, out);
      return;
    case ExprKind::Div:
      print_wrapped(a[0], chart, out);
      out += " / ";
      print_wrapped(a[1], chart, out);
      return;
    case ExprKind::IntPow:
      print_wrapped(a[0], chart, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case ExprKind::Sqrt:
    case ExprKind::Exp:
    case ExprKind::Sin:
    case ExprKind::Cos: {
      static const char* names[] = {"sqrt", "exp", "sin", "cos"};
      out += names[static_cast<int>(e.kind()) - static_cast<int>(ExprKind::Sqrt)];
      out += '(';
      print(a[0], chart, out);
      out += ')';
      return;
    }
  }
}

}  // namespace

Expr parse_expr(std::string_view text, const Chart& chart) { return Parser(text, chart).parse(); }

std::string to_string(const Expr& e, const Chart& chart) {
  std::string out;
  print(e, chart, out);
  return out;
}

}  // namespace sugra

#include "sicg/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sicg/errors.hpp"

namespace sicg {

std::string Expr::str() const {
  switch (kind) {
    case Kind::number: return number.str();
    case Kind::symbol: return name;
    case Kind::call: {
      std::string s = "(" + name;
      for (const auto& a : args) s += " " + a->str();
      return s + ")";
    }
  }
  return {};
}

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  std::string atom() {
    size_t b = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' && text[pos] != ')') ++pos;
    return text.substr(b, pos - b);
  }

  ExprPtr parse() {
    skip();
    if (pos >= text.size()) throw FormatError("unexpected end of expression");
    auto e = std::make_shared<Expr>();
    if (text[pos] == '(') {
      ++pos;
      skip();
      e->kind = Expr::Kind::call;
      e->name = atom();
      if (e->name.empty()) throw FormatError("missing operator in '" + text + "'");
      while (true) {
        skip();
        if (pos >= text.size()) throw FormatError("unbalanced parentheses in '" + text + "'");
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        e->args.push_back(parse());
      }
      return e;
    }
    if (text[pos] == ')') throw FormatError("unexpected ')' in '" + text + "'");
    std::string a = atom();
    bool numeric = !a.empty() && (std::isdigit(static_cast<unsigned char>(a[0])) || (a.size() > 1 && a[0] == '-' && std::isdigit(static_cast<unsigned char>(a[1]))));
    if (numeric) {
      e->kind = Expr::Kind::number;
      try {
        e->number = Rational(a);
      } catch (const std::exception&) {
        throw FormatError("bad number '" + a + "'");
      }
    } else {
      e->kind = Expr::Kind::symbol;
      e->name = a;
    }
    return e;
  }
};

Complex rational_value(const Rational& q) {
  return Complex(Real(boost::multiprecision::numerator(q).str()) / Real(boost::multiprecision::denominator(q).str()));
}

}  // namespace

ExprPtr parse_expr(const std::string& text) {
  Parser p{text};
  ExprPtr e = p.parse();
  p.skip();
  if (p.pos != text.size()) throw FormatError("trailing text in expression '" + text + "'");
  return e;
}

Complex evaluate(const Expr& e, const Valuation& v) {
  switch (e.kind) {
    case Expr::Kind::number: return rational_value(e.number);
    case Expr::Kind::symbol: {
      auto it = v.find(e.name);
      if (it != v.end()) return it->second;
      if (e.name == "i") return Complex(Real(0), Real(1));
      if (e.name == "pi") return Complex(pi_real());
      throw FormatError("unknown symbol '" + e.name + "'");
    }
    case Expr::Kind::call: break;
  }
  const std::string& op = e.name;
  auto arg = [&](size_t i) { return evaluate(*e.args.at(i), v); };
  auto need = [&](size_t n) {
    if (e.args.size() != n) throw FormatError("'" + op + "' takes " + std::to_string(n) + " argument(s)");
  };
  if (op == "+") {
    Complex s;
    for (size_t i = 0; i < e.args.size(); ++i) s += arg(i);
    return s;
  }
  if (op == "*") {
    Complex s(1);
    for (size_t i = 0; i < e.args.size(); ++i) s *= arg(i);
    return s;
  }
  if (op == "-") {
    if (e.args.size() == 1) return -arg(0);
    need(2);
    return arg(0) - arg(1);
  }
  if (op == "/") {
    need(2);
    return arg(0) / arg(1);
  }
  if (op == "sqrt") {
    need(1);
    return sqrt(arg(0));
  }
  if (op == "cbrt") {
    need(1);
    return cbrt(arg(0));
  }
  if (op == "root3") {
    need(2);
    Complex k = arg(0);
    long kk = std::lround(k.re.convert_to<double>());
    return cbrt(arg(1)) * exp_i_pi(2 * kk, 3);
  }
  if (op == "re") {
    need(1);
    return Complex(arg(0).re);
  }
  if (op == "sin" || op == "cos") {
    need(1);
    Complex x = arg(0);
    if (x.im != 0) throw FormatError("'" + op + "' of a non-real argument");
    return Complex(op == "sin" ? Real(boost::multiprecision::sin(x.re)) : Real(boost::multiprecision::cos(x.re)));
  }
  throw FormatError("unknown operator '" + op + "'");
}

namespace {

std::string strip_comment(std::string line) {
  auto pos = line.find('#');
  if (pos != std::string::npos) line.erase(pos);
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
  return line;
}

// Splits "keyword rest..." and, for an s-expression argument, its extent.
std::string take_expr(std::istringstream& ls) {
  ls >> std::ws;
  std::string out;
  if (ls.peek() != '(') {
    ls >> out;
    return out;
  }
  int depth = 0;
  char c;
  while (ls.get(c)) {
    out += c;
    if (c == '(') ++depth;
    if (c == ')' && --depth == 0) break;
  }
  if (depth != 0) throw FormatError("unbalanced expression");
  return out;
}

}  // namespace

Valuation ExpressionForm::valuation() const {
  Valuation v;
  for (const auto& g : generators) v[g.name] = sicg::evaluate(*g.definition, v);
  return v;
}

CMatrix ExpressionForm::evaluate(const Valuation& v) const {
  CMatrix m(static_cast<int>(d), static_cast<int>(d));
  for (long r = 0; r < d; ++r)
    for (long s = 0; s < d; ++s) m(static_cast<int>(r), static_cast<int>(s)) = sicg::evaluate(*entries[static_cast<size_t>(r)][static_cast<size_t>(s)], v);
  return m;
}

ExpressionForm load_expression(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingExpressionData("cannot open " + path);
  ExpressionForm out;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_comment(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    auto fail = [&](const std::string& why) { return FormatError(path + ":" + std::to_string(lineno) + ": " + why); };
    if (!header) {
      std::string ver;
      ls >> ver;
      if (key != "format" || ver != "sicg-expr") throw fail("missing 'format sicg-expr 1' header");
      int version = 0;
      ls >> version;
      if (version != 1) throw fail("unsupported version");
      header = true;
      continue;
    }
    if (key == "orbit") {
      ls >> out.orbit;
    } else if (key == "dimension") {
      ls >> out.d;
      out.entries.assign(static_cast<size_t>(out.d), std::vector<ExprPtr>(static_cast<size_t>(out.d)));
    } else if (key == "digits") {
      ls >> out.digits;
    } else if (key == "gen") {
      Generator g;
      ls >> g.name;
      g.definition = parse_expr(take_expr(ls));
      std::string re, im;
      if (!(ls >> re >> im)) throw fail("generator needs a numeric value 're im'");
      g.file_value = Complex(parse_real(re), parse_real(im));
      out.generators.push_back(std::move(g));
    } else if (key == "minpoly") {
      std::string name;
      ls >> name;
      auto it = std::find_if(out.generators.begin(), out.generators.end(), [&](const Generator& g) { return g.name == name; });
      if (it == out.generators.end()) throw fail("minpoly for unknown generator " + name);
      std::string c;
      while (ls >> c) it->minpoly.emplace_back(c);
    } else if (key == "entry") {
      long r = -1, s = -1;
      ls >> r >> s;
      if (r < 0 || s < 0 || r >= out.d || s >= out.d) throw fail("entry index out of range");
      out.entries[static_cast<size_t>(r)][static_cast<size_t>(s)] = parse_expr(take_expr(ls));
    } else {
      throw fail("unknown key '" + key + "'");
    }
    if (ls.fail() && !ls.eof()) throw fail("bad value");
  }
  if (!header || out.d < 2) throw FormatError(path + ": incomplete expression file");
  for (const auto& row : out.entries)
    for (const auto& e : row)
      if (!e) throw FormatError(path + ": missing entry");

  // Definitions must reproduce the tabulated values and annihilate the minimal polynomials.
  const int check = static_cast<int>(std::min(out.digits, working_digits())) - 5;
  const Real tol = ten_to_minus(check);
  Valuation v = out.valuation();
  for (const auto& g : out.generators) {
    const Complex& x = v.at(g.name);
    if (abs(x - g.file_value) > tol) throw FormatError(path + ": generator " + g.name + " definition disagrees with its value");
    if (!g.minpoly.empty()) {
      Complex acc;
      for (const auto& c : g.minpoly) acc = acc * x + rational_value(c);
      if (abs(acc) > tol * 1000) throw FormatError(path + ": generator " + g.name + " is not a root of its minimal polynomial");
    }
  }
  return out;
}

Valuation AutomorphismSpec::apply(const Valuation& v) const {
  Valuation out = v;
  for (const auto& [name, e] : images) out[name] = evaluate(*e, v);
  return out;
}

std::vector<AutomorphismSpec> load_automorphisms(const std::string& path, long dbar) {
  std::ifstream in(path);
  if (!in) throw MissingExpressionData("cannot open " + path);
  std::vector<AutomorphismSpec> out;
  std::string line;
  bool header = false, open = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_comment(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    auto fail = [&](const std::string& why) { return FormatError(path + ":" + std::to_string(lineno) + ": " + why); };
    if (!header) {
      std::string ver;
      ls >> ver;
      if (key != "format" || ver != "sicg-aut") throw fail("missing 'format sicg-aut 1' header");
      header = true;
      continue;
    }
    if (key == "orbit") continue;
    if (key == "aut") {
      if (open) throw fail("nested 'aut'");
      AutomorphismSpec a;
      ls >> a.name;
      std::string tok;
      auto matrix = [&]() {
        long x[4];
        for (auto& e : x)
          if (!(ls >> e)) throw fail("matrix needs 4 entries");
        return ResidueMatrix(dbar, x[0], x[1], x[2], x[3]);
      };
      while (ls >> tok) {
        if (tok == "k") {
          ls >> a.k;
        } else if (tok == "F") {
          a.f = matrix();
        } else if (tok == "G") {
          a.g = matrix();
        } else if (tok == "q") {
          ls >> a.q[0] >> a.q[1];
        } else if (tok == "outer") {
          a.outer = true;
        } else {
          throw fail("unknown field '" + tok + "'");
        }
      }
      out.push_back(std::move(a));
      open = true;
    } else if (key == "img") {
      if (!open) throw fail("'img' outside 'aut'");
      std::string name;
      ls >> name;
      out.back().images[name] = parse_expr(take_expr(ls));
    } else if (key == "end") {
      open = false;
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  if (open) throw FormatError(path + ": missing 'end'");
  return out;
}

}  // namespace sicg

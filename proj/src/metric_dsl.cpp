#include "rgeom/metric_dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "rgeom/jsonw.hpp"

namespace rgeom {

namespace {

enum class Tok {
  End, Ident, Number, LParen, RParen, LBracket, RBracket,
  Plus, Minus, Star, Slash, Caret, Comma, Semicolon, Equals,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    std::ostringstream os;
    os << "parse error at line " << at.line << ", column " << at.col << ": "
       << msg;
    throw ParseError(os.str(), at.line, at.col);
  }

 private:
  void advance() {
    skip_space_and_comments();
    cur_ = Token{};
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        step();
      cur_.kind = Tok::Ident;
      cur_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '.'))
        step();
      // scientific suffix
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t save = pos_;
        step();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) step();
        if (pos_ < src_.size() &&
            std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_])))
            step();
        } else {
          pos_ = save;  // 'e' belongs to something else
        }
      }
      cur_.kind = Tok::Number;
      cur_.text = src_.substr(start, pos_ - start);
      cur_.number = std::strtod(cur_.text.c_str(), nullptr);
      return;
    }
    step();
    switch (c) {
      case '(': cur_.kind = Tok::LParen; return;
      case ')': cur_.kind = Tok::RParen; return;
      case '[': cur_.kind = Tok::LBracket; return;
      case ']': cur_.kind = Tok::RBracket; return;
      case '+': cur_.kind = Tok::Plus; return;
      case '-': cur_.kind = Tok::Minus; return;
      case '*': cur_.kind = Tok::Star; return;
      case '/': cur_.kind = Tok::Slash; return;
      case '^': cur_.kind = Tok::Caret; return;
      case ',': cur_.kind = Tok::Comma; return;
      case ';': cur_.kind = Tok::Semicolon; return;
      case '=': cur_.kind = Tok::Equals; return;
      default: {
        std::ostringstream os;
        os << "parse error at line " << line_ << ", column " << col_ - 1
           << ": unexpected character '" << c << "'";
        throw ParseError(os.str(), line_, col_ - 1);
      }
    }
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') step();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        step();
      } else {
        break;
      }
    }
  }

  void step() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

std::unique_ptr<ExprNode> make_number(double v) {
  auto n = std::make_unique<ExprNode>();
  n->kind = ExprNode::Kind::Number;
  n->number = v;
  return n;
}

const std::map<std::string, ExprNode::Func> kFunctions = {
    {"sin", ExprNode::Func::Sin},   {"cos", ExprNode::Func::Cos},
    {"sinh", ExprNode::Func::Sinh}, {"cosh", ExprNode::Func::Cosh},
    {"exp", ExprNode::Func::Exp},   {"ln", ExprNode::Func::Ln},
    {"sqrt", ExprNode::Func::Sqrt},
};

const char* func_name(ExprNode::Func f) {
  switch (f) {
    case ExprNode::Func::Sin: return "sin";
    case ExprNode::Func::Cos: return "cos";
    case ExprNode::Func::Sinh: return "sinh";
    case ExprNode::Func::Cosh: return "cosh";
    case ExprNode::Func::Exp: return "exp";
    case ExprNode::Func::Ln: return "ln";
    case ExprNode::Func::Sqrt: return "sqrt";
  }
  return "?";
}

class ExprParser {
 public:
  ExprParser(Lexer& lex, const std::vector<std::string>& coords)
      : lex_(lex), coords_(coords) {}

  std::unique_ptr<ExprNode> parse() { return additive(); }

 private:
  std::unique_ptr<ExprNode> additive() {
    auto left = multiplicative();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      const bool plus = lex_.take().kind == Tok::Plus;
      auto node = std::make_unique<ExprNode>();
      node->kind = plus ? ExprNode::Kind::Add : ExprNode::Kind::Sub;
      node->children.push_back(std::move(left));
      node->children.push_back(multiplicative());
      left = std::move(node);
    }
    return left;
  }

  std::unique_ptr<ExprNode> multiplicative() {
    auto left = unary();
    while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
      const bool mul = lex_.take().kind == Tok::Star;
      auto node = std::make_unique<ExprNode>();
      node->kind = mul ? ExprNode::Kind::Mul : ExprNode::Kind::Div;
      node->children.push_back(std::move(left));
      node->children.push_back(unary());
      left = std::move(node);
    }
    return left;
  }

  std::unique_ptr<ExprNode> unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      auto node = std::make_unique<ExprNode>();
      node->kind = ExprNode::Kind::Neg;
      node->children.push_back(unary());
      return node;
    }
    return power();
  }

  std::unique_ptr<ExprNode> power() {
    auto base = primary();
    if (lex_.peek().kind != Tok::Caret) return base;
    lex_.take();
    int sign = 1;
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      sign = -1;
    }
    Token e = lex_.peek();
    if (e.kind != Tok::Number || e.text.find('.') != std::string::npos ||
        e.text.find('e') != std::string::npos ||
        e.text.find('E') != std::string::npos)
      lex_.fail("exponent must be an integer literal", e);
    lex_.take();
    auto node = std::make_unique<ExprNode>();
    node->kind = ExprNode::Kind::Pow;
    node->exponent = sign * static_cast<int>(e.number);
    node->children.push_back(std::move(base));
    return node;
  }

  std::unique_ptr<ExprNode> primary() {
    Token t = lex_.peek();
    if (t.kind == Tok::Number) {
      lex_.take();
      return make_number(t.number);
    }
    if (t.kind == Tok::LParen) {
      lex_.take();
      auto inner = additive();
      if (lex_.peek().kind != Tok::RParen)
        lex_.fail("expected ')'", lex_.peek());
      lex_.take();
      return inner;
    }
    if (t.kind == Tok::Ident) {
      lex_.take();
      auto fn = kFunctions.find(t.text);
      if (fn != kFunctions.end()) {
        if (lex_.peek().kind != Tok::LParen)
          lex_.fail("expected '(' after function name '" + t.text + "'", lex_.peek());
        lex_.take();
        auto arg = additive();
        if (lex_.peek().kind != Tok::RParen)
          lex_.fail("expected ')'", lex_.peek());
        lex_.take();
        auto node = std::make_unique<ExprNode>();
        node->kind = ExprNode::Kind::Call;
        node->func = fn->second;
        node->children.push_back(std::move(arg));
        return node;
      }
      if (t.text == "pi") return make_number(M_PI);
      for (size_t i = 0; i < coords_.size(); ++i) {
        if (coords_[i] == t.text) {
          auto node = std::make_unique<ExprNode>();
          node->kind = ExprNode::Kind::Coord;
          node->coord = static_cast<int>(i);
          return node;
        }
      }
      lex_.fail("unknown identifier '" + t.text + "'", t);
    }
    lex_.fail("expected expression", t);
  }

  Lexer& lex_;
  const std::vector<std::string>& coords_;
};

double parse_bound(Lexer& lex) {
  int sign = 1;
  if (lex.peek().kind == Tok::Minus) {
    lex.take();
    sign = -1;
  } else if (lex.peek().kind == Tok::Plus) {
    lex.take();
  }
  Token t = lex.peek();
  if (t.kind == Tok::Ident && t.text == "inf") {
    lex.take();
    return sign * std::numeric_limits<double>::infinity();
  }
  if (t.kind == Tok::Number) {
    lex.take();
    return sign * t.number;
  }
  lex.fail("expected a number or 'inf'", t);
}

int precedence(ExprNode::Kind k) {
  switch (k) {
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub: return 1;
    case ExprNode::Kind::Mul:
    case ExprNode::Kind::Div: return 2;
    case ExprNode::Kind::Neg: return 3;
    case ExprNode::Kind::Pow: return 4;
    default: return 5;
  }
}

void print_expr(const ExprNode& n, std::string& out) {
  auto child = [&](const ExprNode& c, int min_prec) {
    const bool parens = precedence(c.kind) < min_prec;
    if (parens) out += '(';
    print_expr(c, out);
    if (parens) out += ')';
  };
  switch (n.kind) {
    case ExprNode::Kind::Number:
      if (n.number < 0) {
        out += '(';
        out += JsonWriter::format_double(n.number);
        out += ')';
      } else {
        out += JsonWriter::format_double(n.number);
      }
      break;
    case ExprNode::Kind::Coord:
      out += "@";  // patched by caller (needs coord names)
      out += std::to_string(n.coord);
      break;
    case ExprNode::Kind::Add:
      child(*n.children[0], 1);
      out += " + ";
      child(*n.children[1], 2);
      break;
    case ExprNode::Kind::Sub:
      child(*n.children[0], 1);
      out += " - ";
      child(*n.children[1], 2);
      break;
    case ExprNode::Kind::Mul:
      child(*n.children[0], 2);
      out += "*";
      child(*n.children[1], 3);
      break;
    case ExprNode::Kind::Div:
      child(*n.children[0], 2);
      out += "/";
      child(*n.children[1], 3);
      break;
    case ExprNode::Kind::Neg:
      out += '-';
      child(*n.children[0], 3);
      break;
    case ExprNode::Kind::Pow:
      child(*n.children[0], 5);
      out += '^';
      if (n.exponent < 0) {
        out += '-';
        out += std::to_string(-n.exponent);
      } else {
        out += std::to_string(n.exponent);
      }
      break;
    case ExprNode::Kind::Call:
      out += func_name(n.func);
      out += '(';
      print_expr(*n.children[0], out);
      out += ')';
      break;
  }
}

}  // namespace

Jet2 ExprNode::eval(const std::vector<Jet2>& coords) const {
  const int n = coords.empty() ? 0 : coords[0].dim();
  switch (kind) {
    case Kind::Number: return Jet2::constant(n, number);
    case Kind::Coord: return coords[static_cast<size_t>(coord)];
    case Kind::Add: return children[0]->eval(coords) + children[1]->eval(coords);
    case Kind::Sub: return children[0]->eval(coords) - children[1]->eval(coords);
    case Kind::Mul: return children[0]->eval(coords) * children[1]->eval(coords);
    case Kind::Div: return children[0]->eval(coords) / children[1]->eval(coords);
    case Kind::Neg: return -children[0]->eval(coords);
    case Kind::Pow: return pow_int(children[0]->eval(coords), exponent);
    case Kind::Call: {
      const Jet2 a = children[0]->eval(coords);
      switch (func) {
        case Func::Sin: return sin(a);
        case Func::Cos: return cos(a);
        case Func::Sinh: return sinh(a);
        case Func::Cosh: return cosh(a);
        case Func::Exp: return exp(a);
        case Func::Ln: return log(a);
        case Func::Sqrt: return sqrt(a);
      }
      break;
    }
  }
  throw Error("corrupt expression node");
}

bool ExprNode::equals(const ExprNode& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Number:
      if (number != other.number) return false;
      break;
    case Kind::Coord:
      if (coord != other.coord) return false;
      break;
    case Kind::Pow:
      if (exponent != other.exponent) return false;
      break;
    case Kind::Call:
      if (func != other.func) return false;
      break;
    default: break;
  }
  if (children.size() != other.children.size()) return false;
  for (size_t i = 0; i < children.size(); ++i)
    if (!children[i]->equals(*other.children[i])) return false;
  return true;
}

const ExprNode& MetricSpec::entry(int i, int j) const {
  return *entries_[static_cast<size_t>(entry_index(i, j))];
}

MetricJet MetricSpec::eval(const Vec& x) const {
  std::vector<Jet2> coords;
  coords.reserve(static_cast<size_t>(dim_));
  for (int i = 0; i < dim_; ++i) coords.push_back(Jet2::variable(dim_, i, x[i]));

  MetricJet out;
  out.g = Mat(dim_, dim_);
  out.dg = Tensor3(dim_);
  out.d2g = Tensor4(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j <= i; ++j) {
      const Jet2 e = entry(i, j).eval(coords);
      out.g(i, j) = out.g(j, i) = e.v;
      for (int k = 0; k < dim_; ++k) {
        out.dg(i, j, k) = out.dg(j, i, k) = e.g[k];
        for (int l = 0; l < dim_; ++l)
          out.d2g(i, j, k, l) = out.d2g(j, i, k, l) = e.h(k, l);
      }
    }
  }
  return out;
}

std::string MetricSpec::pretty_print() const {
  std::string out;
  out += "dim " + std::to_string(dim_) + ";\n";
  out += "coords";
  for (const auto& c : coord_names_) out += " " + c;
  out += ";\n";
  out += "domain";
  for (int i = 0; i < dim_; ++i) {
    out += " " + coord_names_[static_cast<size_t>(i)] + " (";
    out += std::isinf(domain_.lo[i]) ? std::string("-inf")
                                     : JsonWriter::format_double(domain_.lo[i]);
    out += ", ";
    out += std::isinf(domain_.hi[i]) ? std::string("inf")
                                     : JsonWriter::format_double(domain_.hi[i]);
    out += ")";
  }
  out += ";\n";
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j <= i; ++j) {
      std::string body;
      print_expr(entry(i, j), body);
      // substitute coordinate placeholders with their declared names
      std::string resolved;
      for (size_t p = 0; p < body.size(); ++p) {
        if (body[p] == '@') {
          size_t q = p + 1;
          int idx = 0;
          while (q < body.size() && std::isdigit(static_cast<unsigned char>(body[q]))) {
            idx = idx * 10 + (body[q] - '0');
            ++q;
          }
          resolved += coord_names_[static_cast<size_t>(idx)];
          p = q - 1;
        } else {
          resolved += body[p];
        }
      }
      out += "g[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
             resolved + ";\n";
    }
  }
  return out;
}

MetricSpec parse_metric(const std::string& text) {
  Lexer lex(text);
  MetricSpec spec;
  bool dim_seen = false;
  std::vector<bool> have_domain;
  std::vector<bool> have_entry;

  auto require_dim = [&](const Token& at) {
    if (!dim_seen) lex.fail("'dim' must be declared first", at);
  };

  while (lex.peek().kind != Tok::End) {
    Token t = lex.take();
    if (t.kind != Tok::Ident) lex.fail("expected a statement", t);

    if (t.text == "dim") {
      if (dim_seen) lex.fail("duplicate 'dim' statement", t);
      Token n = lex.peek();
      if (n.kind != Tok::Number || n.number < 1 ||
          n.number != std::floor(n.number))
        lex.fail("'dim' expects a positive integer", n);
      lex.take();
      spec.dim_ = static_cast<int>(n.number);
      dim_seen = true;
      spec.domain_ = DomainBox::unbounded(spec.dim_);
      have_domain.assign(static_cast<size_t>(spec.dim_), false);
      have_entry.assign(static_cast<size_t>(spec.dim_ * (spec.dim_ + 1) / 2), false);
      spec.entries_.resize(have_entry.size());
    } else if (t.text == "coords") {
      require_dim(t);
      if (!spec.coord_names_.empty()) lex.fail("duplicate 'coords' statement", t);
      while (lex.peek().kind == Tok::Ident) {
        Token c = lex.take();
        if (kFunctions.count(c.text) || c.text == "pi" || c.text == "inf")
          lex.fail("'" + c.text + "' is reserved and cannot name a coordinate", c);
        for (const auto& prev : spec.coord_names_)
          if (prev == c.text) lex.fail("duplicate coordinate '" + c.text + "'", c);
        spec.coord_names_.push_back(c.text);
      }
      if (static_cast<int>(spec.coord_names_.size()) != spec.dim_)
        lex.fail("expected " + std::to_string(spec.dim_) + " coordinate names",
                 lex.peek());
    } else if (t.text == "domain") {
      require_dim(t);
      if (spec.coord_names_.empty())
        lex.fail("'coords' must be declared before 'domain'", t);
      while (lex.peek().kind == Tok::Ident) {
        Token c = lex.take();
        int idx = -1;
        for (size_t i = 0; i < spec.coord_names_.size(); ++i)
          if (spec.coord_names_[i] == c.text) idx = static_cast<int>(i);
        if (idx < 0) lex.fail("unknown coordinate '" + c.text + "'", c);
        if (lex.peek().kind != Tok::LParen) lex.fail("expected '('", lex.peek());
        lex.take();
        const double lo = parse_bound(lex);
        if (lex.peek().kind != Tok::Comma) lex.fail("expected ','", lex.peek());
        lex.take();
        const double hi = parse_bound(lex);
        if (lex.peek().kind != Tok::RParen) lex.fail("expected ')'", lex.peek());
        lex.take();
        if (!(lo < hi)) lex.fail("empty domain interval for '" + c.text + "'", c);
        spec.domain_.lo[idx] = lo;
        spec.domain_.hi[idx] = hi;
        have_domain[static_cast<size_t>(idx)] = true;
      }
    } else if (t.text == "g") {
      require_dim(t);
      if (spec.coord_names_.empty())
        lex.fail("'coords' must be declared before metric entries", t);
      auto index = [&]() -> int {
        if (lex.peek().kind != Tok::LBracket) lex.fail("expected '['", lex.peek());
        lex.take();
        Token n = lex.peek();
        if (n.kind != Tok::Number || n.number != std::floor(n.number))
          lex.fail("expected an integer index", n);
        lex.take();
        if (lex.peek().kind != Tok::RBracket) lex.fail("expected ']'", lex.peek());
        lex.take();
        return static_cast<int>(n.number);
      };
      const int i = index();
      const int j = index();
      if (i < 0 || i >= spec.dim_ || j < 0 || j >= spec.dim_)
        lex.fail("metric index out of range for dimension " +
                     std::to_string(spec.dim_), t);
      if (j > i)
        lex.fail("only the lower triangle may be specified; use g[" +
                     std::to_string(j) + "][" + std::to_string(i) + "]", t);
      if (lex.peek().kind != Tok::Equals) lex.fail("expected '='", lex.peek());
      lex.take();
      ExprParser ep(lex, spec.coord_names_);
      auto expr = ep.parse();
      const size_t slot = static_cast<size_t>(spec.entry_index(i, j));
      if (have_entry[slot])
        lex.fail("duplicate entry g[" + std::to_string(i) + "][" +
                     std::to_string(j) + "]", t);
      spec.entries_[slot] = std::move(expr);
      have_entry[slot] = true;
    } else {
      lex.fail("unknown statement '" + t.text + "'", t);
    }

    if (lex.peek().kind != Tok::Semicolon)
      lex.fail("expected ';'", lex.peek());
    lex.take();
  }

  if (!dim_seen) throw ParseError("parse error: missing 'dim' statement", 0, 0);
  if (spec.coord_names_.empty())
    throw ParseError("parse error: missing 'coords' statement", 0, 0);

  std::string missing;
  for (int i = 0; i < spec.dim_; ++i)
    for (int j = 0; j <= i; ++j)
      if (!have_entry[static_cast<size_t>(spec.entry_index(i, j))]) {
        if (!missing.empty()) missing += ", ";
        missing += "g[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      }
  if (!missing.empty())
    throw ParseError("missing metric entries: " + missing, 0, 0);
  return spec;
}

namespace {

class DslSource final : public MetricSource {
 public:
  DslSource(MetricSpec spec, std::string name)
      : spec_(std::move(spec)), name_(std::move(name)) {}

  int dim() const override { return spec_.dim(); }
  const DomainBox& domain() const override { return spec_.domain(); }
  const std::string& name() const override { return name_; }
  MetricJet eval(const Vec& x) const override { return spec_.eval(x); }

 private:
  MetricSpec spec_;
  std::string name_;
};

}  // namespace

std::shared_ptr<const MetricSource> make_dsl_source(MetricSpec spec,
                                                    std::string name) {
  return std::make_shared<DslSource>(std::move(spec), std::move(name));
}

}  // namespace rgeom

#include "autofill/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <variant>

namespace autofill {

struct Expression::Node {
  enum class Op {
    Number, Ref, Missing, Neg, Floor, Not,
    Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or,
    If, // children: cond, value, cond, value, ..., else
  };

  Op op;
  double number = 0.0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> children;
};

namespace {

using Node = Expression::Node;
using Op = Node::Op;
using NodePtr = std::shared_ptr<const Node>;

constexpr std::array kKeywords = {"if", "then", "elif", "else", "and", "or", "not", "floor", "missing"};

bool is_keyword(std::string_view s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

enum class Tok { Number, Name, Keyword, Symbol, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t column = 0;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [](const std::string &msg, std::size_t pos) -> ExprError {
    return ExprError(ExprError::Kind::Syntax, msg + " at column " + std::to_string(pos + 1),
                     pos + 1);
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      auto [end, ec] = std::from_chars(src.data() + i, src.data() + src.size(), value,
                                       std::chars_format::general);
      if (ec != std::errc()) {
        throw fail("malformed number", start);
      }
      i = static_cast<std::size_t>(end - src.data());
      if (i < src.size() && ident_char(src[i])) {
        throw fail("malformed number", start);
      }
      out.push_back({Tok::Number, std::string(src.substr(start, i - start)), value, start + 1});
    } else if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) {
        ++i;
      }
      std::string word(src.substr(start, i - start));
      const Tok kind = is_keyword(word) ? Tok::Keyword : Tok::Name;
      out.push_back({kind, std::move(word), 0.0, start + 1});
    } else if (c == '`') {
      const auto close = src.find('`', i + 1);
      if (close == std::string_view::npos) {
        throw fail("unterminated quoted name", start);
      }
      if (close == i + 1) {
        throw fail("empty quoted name", start);
      }
      out.push_back({Tok::Name, std::string(src.substr(i + 1, close - i - 1)), 0.0, start + 1});
      i = close + 1;
    } else {
      static constexpr std::array two = {"<=", ">=", "==", "!="};
      std::string sym;
      for (std::string_view t : two) {
        if (src.substr(i, 2) == t) {
          sym = t;
        }
      }
      if (sym.empty()) {
        if (std::string_view("+-*/()<>").find(c) == std::string_view::npos) {
          throw fail(std::string("unexpected character '") + c + "'", start);
        }
        sym = std::string(1, c);
      }
      i += sym.size();
      out.push_back({Tok::Symbol, std::move(sym), 0.0, start + 1});
    }
  }
  out.push_back({Tok::End, "", 0.0, src.size() + 1});
  return out;
}

NodePtr make(Op op, std::vector<NodePtr> children = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children = std::move(children);
  return n;
}

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  NodePtr parse_all() {
    NodePtr root = expr();
    if (peek().kind != Tok::End) {
      error("unexpected '" + peek().text + "'");
    }
    return root;
  }

private:
  const Token &peek() const { return toks_[pos_]; }

  [[noreturn]] void error(const std::string &msg) const {
    const std::size_t col = peek().column;
    throw ExprError(ExprError::Kind::Syntax, msg + " at column " + std::to_string(col), col);
  }

  bool accept(Tok kind, std::string_view text) {
    if (peek().kind == kind && peek().text == text) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(Tok kind, std::string_view text) {
    if (!accept(kind, text)) {
      error(std::string("expected '") + std::string(text) + "'" +
            (peek().kind == Tok::End ? " before end of input" : ""));
    }
  }

  NodePtr expr() {
    if (accept(Tok::Keyword, "if")) {
      return conditional();
    }
    return disjunction();
  }

  NodePtr conditional() {
    std::vector<NodePtr> parts;
    do {
      parts.push_back(expr());
      expect(Tok::Keyword, "then");
      parts.push_back(expr());
    } while (accept(Tok::Keyword, "elif"));
    expect(Tok::Keyword, "else");
    parts.push_back(expr());
    return make(Op::If, std::move(parts));
  }

  NodePtr disjunction() {
    NodePtr lhs = conjunction();
    while (accept(Tok::Keyword, "or")) {
      lhs = make(Op::Or, {lhs, conjunction()});
    }
    return lhs;
  }

  NodePtr conjunction() {
    NodePtr lhs = negation();
    while (accept(Tok::Keyword, "and")) {
      lhs = make(Op::And, {lhs, negation()});
    }
    return lhs;
  }

  NodePtr negation() {
    if (accept(Tok::Keyword, "not")) {
      return make(Op::Not, {negation()});
    }
    return comparison();
  }

  NodePtr comparison() {
    NodePtr lhs = sum();
    static constexpr std::array<std::pair<const char *, Op>, 6> ops = {{
        {"<", Op::Lt}, {"<=", Op::Le}, {">", Op::Gt}, {">=", Op::Ge}, {"==", Op::Eq}, {"!=", Op::Ne}}};
    for (const auto &[text, op] : ops) {
      if (accept(Tok::Symbol, text)) {
        return make(op, {lhs, sum()});
      }
    }
    return lhs;
  }

  NodePtr sum() {
    NodePtr lhs = product();
    for (;;) {
      if (accept(Tok::Symbol, "+")) {
        lhs = make(Op::Add, {lhs, product()});
      } else if (accept(Tok::Symbol, "-")) {
        lhs = make(Op::Sub, {lhs, product()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr product() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept(Tok::Symbol, "*")) {
        lhs = make(Op::Mul, {lhs, unary()});
      } else if (accept(Tok::Symbol, "/")) {
        lhs = make(Op::Div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept(Tok::Symbol, "-")) {
      return make(Op::Neg, {unary()});
    }
    return primary();
  }

  NodePtr primary() {
    const Token &t = peek();
    if (t.kind == Tok::Number) {
      ++pos_;
      auto n = std::make_shared<Node>();
      n->op = Op::Number;
      n->number = t.number;
      return n;
    }
    if (t.kind == Tok::Name) {
      ++pos_;
      auto n = std::make_shared<Node>();
      n->op = Op::Ref;
      n->name = t.text;
      return n;
    }
    if (accept(Tok::Keyword, "floor")) {
      expect(Tok::Symbol, "(");
      NodePtr inner = expr();
      expect(Tok::Symbol, ")");
      return make(Op::Floor, {inner});
    }
    if (accept(Tok::Keyword, "missing")) {
      expect(Tok::Symbol, "(");
      if (peek().kind != Tok::Name) {
        error("missing() takes a field name");
      }
      auto n = std::make_shared<Node>();
      n->op = Op::Missing;
      n->name = peek().text;
      ++pos_;
      expect(Tok::Symbol, ")");
      return n;
    }
    if (accept(Tok::Keyword, "if")) {
      return conditional();
    }
    if (accept(Tok::Symbol, "(")) {
      NodePtr inner = expr();
      expect(Tok::Symbol, ")");
      return inner;
    }
    if (t.kind == Tok::End) {
      error("unexpected end of expression");
    }
    error("unexpected '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

using Val = std::variant<double, bool>;

const char *op_symbol(Op op) {
  switch (op) {
  case Op::Add: return "+";
  case Op::Sub: return "-";
  case Op::Mul: return "*";
  case Op::Div: return "/";
  case Op::Lt: return "<";
  case Op::Le: return "<=";
  case Op::Gt: return ">";
  case Op::Ge: return ">=";
  case Op::Eq: return "==";
  case Op::Ne: return "!=";
  case Op::And: return "and";
  case Op::Or: return "or";
  default: return "?";
  }
}

class Evaluator {
public:
  explicit Evaluator(const Env &env) : env_(env) {}

  Val eval(const Node &n) const {
    switch (n.op) {
    case Op::Number:
      return n.number;
    case Op::Ref: {
      auto it = env_.find(n.name);
      if (it == env_.end() || !it->second) {
        throw ExprError(ExprError::Kind::MissingUnhandled,
                        "'" + n.name + "' is missing and not guarded by missing()");
      }
      return *it->second;
    }
    case Op::Missing: {
      auto it = env_.find(n.name);
      return it == env_.end() || !it->second;
    }
    case Op::Neg:
      return -num(*n.children[0], "-");
    case Op::Floor:
      return std::floor(num(*n.children[0], "floor"));
    case Op::Not:
      return !boolean(*n.children[0], "not");
    case Op::And:
      return boolean(*n.children[0], "and") && boolean(*n.children[1], "and");
    case Op::Or:
      return boolean(*n.children[0], "or") || boolean(*n.children[1], "or");
    case Op::If: {
      const auto &c = n.children;
      for (std::size_t i = 0; i + 1 < c.size(); i += 2) {
        if (boolean(*c[i], "if")) {
          return eval(*c[i + 1]);
        }
      }
      return eval(*c.back());
    }
    default:
      break;
    }

    const char *sym = op_symbol(n.op);
    const double a = num(*n.children[0], sym);
    const double b = num(*n.children[1], sym);
    switch (n.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0) {
        throw ExprError(ExprError::Kind::DivisionByZero, "division by zero");
      }
      return a / b;
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    default:
      throw ExprError(ExprError::Kind::TypeError, "unsupported operator");
    }
  }

  double num(const Node &n, const char *context) const {
    Val v = eval(n);
    if (auto *d = std::get_if<double>(&v)) {
      return *d;
    }
    throw ExprError(ExprError::Kind::TypeError,
                    std::string("'") + context + "' expects a number, got a condition");
  }

  bool boolean(const Node &n, const char *context) const {
    Val v = eval(n);
    if (auto *b = std::get_if<bool>(&v)) {
      return *b;
    }
    throw ExprError(ExprError::Kind::TypeError,
                    std::string("'") + context + "' expects a condition, got a number");
  }

private:
  const Env &env_;
};

std::string render_name(const std::string &name) {
  const bool plain = !name.empty() && ident_start(name[0]) &&
                     std::all_of(name.begin(), name.end(), ident_char) && !is_keyword(name);
  return plain ? name : "`" + name + "`";
}

std::string render_number(double d) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  return std::string(buf.data(), end);
}

void render(const Node &n, std::string &out) {
  switch (n.op) {
  case Op::Number:
    out += render_number(n.number);
    return;
  case Op::Ref:
    out += render_name(n.name);
    return;
  case Op::Missing:
    out += "missing(" + render_name(n.name) + ")";
    return;
  case Op::Neg:
    out += "(-";
    render(*n.children[0], out);
    out += ")";
    return;
  case Op::Floor:
    out += "floor(";
    render(*n.children[0], out);
    out += ")";
    return;
  case Op::Not:
    out += "(not ";
    render(*n.children[0], out);
    out += ")";
    return;
  case Op::If: {
    const auto &c = n.children;
    out += "(if ";
    for (std::size_t i = 0; i + 1 < c.size(); i += 2) {
      if (i > 0) {
        out += " elif ";
      }
      render(*c[i], out);
      out += " then ";
      render(*c[i + 1], out);
    }
    out += " else ";
    render(*c.back(), out);
    out += ")";
    return;
  }
  default:
    out += "(";
    render(*n.children[0], out);
    out += " ";
    out += op_symbol(n.op);
    out += " ";
    render(*n.children[1], out);
    out += ")";
  }
}

void collect(const Node &n, std::set<std::string> &refs, bool &missing) {
  if (n.op == Op::Ref) {
    refs.insert(n.name);
  } else if (n.op == Op::Missing) {
    refs.insert(n.name);
    missing = true;
  }
  for (const auto &c : n.children) {
    collect(*c, refs, missing);
  }
}

bool same(const Node &a, const Node &b) {
  if (a.op != b.op || a.name != b.name || a.children.size() != b.children.size()) {
    return false;
  }
  if (a.op == Op::Number && a.number != b.number) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same(*a.children[i], *b.children[i])) {
      return false;
    }
  }
  return true;
}

} // namespace

Expression Expression::parse(std::string_view source) {
  Parser p(lex(source));
  return Expression(std::string(source), p.parse_all());
}

double Expression::evaluate(const Env &env) const {
  return Evaluator(env).num(*root_, "result");
}

std::string Expression::canonical() const {
  std::string out;
  render(*root_, out);
  return out;
}

std::set<std::string> Expression::references() const {
  std::set<std::string> refs;
  bool missing = false;
  collect(*root_, refs, missing);
  return refs;
}

bool Expression::uses_missing() const {
  std::set<std::string> refs;
  bool missing = false;
  collect(*root_, refs, missing);
  return missing;
}

bool operator==(const Expression &a, const Expression &b) {
  return same(*a.root_, *b.root_);
}

} // namespace autofill

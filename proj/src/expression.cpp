#include "blowup/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

struct Expression::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

const char* function_name(Expression::Op op) {
  using Op = Expression::Op;
  switch (op) {
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::sqrt: return "sqrt";
    default: return "?";
  }
}

class Parser {
 public:
  Parser(std::string_view text, char variable) : text_(text), variable_(variable) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Expression::Op op, NodePtr lhs, NodePtr rhs = nullptr, double v = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->value = v;
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Expression::Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Expression::Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = make(Expression::Op::mul, lhs, factor());
      } else if (accept('/')) {
        lhs = make(Expression::Op::div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    NodePtr b = base();
    if (accept('^')) return make(Expression::Op::pow, b, factor());
    return b;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make(Expression::Op::neg, base());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;  // 'e' belongs to something else
      }
    }
    const std::string lexeme(text_.substr(start, pos_ - start));
    if (lexeme == ".") {
      pos_ = start;
      fail("malformed number");
    }
    char* end = nullptr;
    const double v = std::strtod(lexeme.c_str(), &end);
    if (end != lexeme.c_str() + lexeme.size() || !std::isfinite(v)) {
      pos_ = start;
      fail("malformed number");
    }
    return make(Expression::Op::number, nullptr, nullptr, v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name.size() == 1 && name[0] == variable_) return make(Expression::Op::variable, nullptr);
    using Op = Expression::Op;
    for (Op op : {Op::sin, Op::cos, Op::exp, Op::log, Op::sqrt}) {
      if (name == function_name(op)) {
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(op, arg);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "' (variable is '" +
         std::string(1, variable_) + "')");
  }

  std::string_view text_;
  char variable_;
  std::size_t pos_ = 0;
};

void print(const Expression::Node& n, char variable, std::string& out) {
  using Op = Expression::Op;
  switch (n.op) {
    case Op::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(n.value));
      if (std::signbit(n.value)) {
        out += "(-";
        out += buf;
        out += ")";
      } else {
        out += buf;
      }
      return;
    }
    case Op::variable: out += variable; return;
    case Op::neg:
      out += "(-";
      print(*n.lhs, variable, out);
      out += ")";
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow: {
      const char sym = n.op == Op::add   ? '+'
                       : n.op == Op::sub ? '-'
                       : n.op == Op::mul ? '*'
                       : n.op == Op::div ? '/'
                                         : '^';
      out += "(";
      print(*n.lhs, variable, out);
      out += ' ';
      out += sym;
      out += ' ';
      print(*n.rhs, variable, out);
      out += ")";
      return;
    }
    default:
      out += function_name(n.op);
      out += "(";
      print(*n.lhs, variable, out);
      out += ")";
      return;
  }
}

int node_depth(const Expression::Node& n) {
  int d = 0;
  if (n.lhs) d = std::max(d, node_depth(*n.lhs));
  if (n.rhs) d = std::max(d, node_depth(*n.rhs));
  return d + 1;
}

[[noreturn]] void eval_fail(const char* what, double x) {
  std::ostringstream os;
  os << what << " while evaluating at " << x;
  throw EvaluationError(os.str());
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, char variable)
    : root_(std::move(root)), variable_(variable) {
  compile();
}

Expression Expression::parse(std::string_view text, char variable) {
  Parser p(text, variable);
  return Expression(p.parse_all(), variable);
}

Expression Expression::number(double value, char variable) {
  auto n = std::make_shared<Node>();
  n->op = Op::number;
  n->value = value;
  return Expression(n, variable);
}

Expression Expression::var(char variable) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  return Expression(n, variable);
}

Expression Expression::unary(Op op, const Expression& arg) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = arg.root_;
  return Expression(n, arg.variable_);
}

Expression Expression::binary(Op op, const Expression& lhs, const Expression& rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = lhs.root_;
  n->rhs = rhs.root_;
  return Expression(n, lhs.variable_);
}

void Expression::compile() {
  program_.clear();
  std::size_t depth = 0;
  max_stack_ = 0;
  auto emit = [&](auto&& self, const Node& n) -> void {
    if (n.lhs) self(self, *n.lhs);
    if (n.rhs) self(self, *n.rhs);
    program_.push_back({n.op, n.value});
    if (n.op == Op::number || n.op == Op::variable) {
      ++depth;
    } else if (n.rhs) {
      --depth;
    }
    max_stack_ = std::max(max_stack_, depth);
  };
  emit(emit, *root_);
}

double Expression::operator()(double x) const {
  constexpr std::size_t kInline = 32;
  double inline_stack[kInline] = {};
  std::vector<double> heap_stack;
  double* st = inline_stack;
  if (max_stack_ > kInline) {
    heap_stack.resize(max_stack_);
    st = heap_stack.data();
  }
  std::size_t top = 0;
  for (const Instr& ins : program_) {
    switch (ins.op) {
      case Op::number: st[top++] = ins.value; break;
      case Op::variable: st[top++] = x; break;
      case Op::neg: st[top - 1] = -st[top - 1]; break;
      case Op::sin: st[top - 1] = std::sin(st[top - 1]); break;
      case Op::cos: st[top - 1] = std::cos(st[top - 1]); break;
      case Op::exp: st[top - 1] = std::exp(st[top - 1]); break;
      case Op::log:
        if (!(st[top - 1] > 0.0)) eval_fail("log of a nonpositive value", x);
        st[top - 1] = std::log(st[top - 1]);
        break;
      case Op::sqrt:
        if (st[top - 1] < 0.0) eval_fail("sqrt of a negative value", x);
        st[top - 1] = std::sqrt(st[top - 1]);
        break;
      case Op::add: --top; st[top - 1] += st[top]; break;
      case Op::sub: --top; st[top - 1] -= st[top]; break;
      case Op::mul: --top; st[top - 1] *= st[top]; break;
      case Op::div:
        --top;
        if (st[top] == 0.0) eval_fail("division by zero", x);
        st[top - 1] /= st[top];
        break;
      case Op::pow: --top; st[top - 1] = std::pow(st[top - 1], st[top]); break;
    }
    if (!std::isfinite(st[top - 1])) eval_fail("non-finite intermediate value", x);
  }
  return st[0];
}

std::string Expression::to_string() const {
  std::string out;
  print(*root_, variable_, out);
  return out;
}

int Expression::depth() const { return node_depth(*root_); }

}  // namespace blowup

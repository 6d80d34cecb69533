#include "gascert/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>

namespace gascert {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

DomainError::DomainError(std::string node, double input, const std::string& what_happened)
    : Error("domain error in '" + node + "' (input " + format_double(input) +
            "): " + what_happened),
      node_(std::move(node)),
      input_(input) {}

namespace detail {

enum class Op : std::uint8_t {
  Number, Variable, Parameter, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sqrt, Abs, Min, Max
};

struct Node {
  Op op = Op::Number;
  double value = 0.0;
  int index = 0;
  std::string name;
  std::shared_ptr<const Node> a, b;
};

using NodePtr = std::shared_ptr<const Node>;

struct Instr {
  Op op;
  int a = -1, b = -1;
  double value = 0.0;
  int index = 0;
  const Node* node = nullptr;
};

struct Program {
  std::vector<Instr> code;
  std::vector<std::string> param_names;
  int arity = 0;
};

}  // namespace detail

using detail::Node;
using detail::NodePtr;
using detail::Op;

namespace {

NodePtr make_number(double v) {
  if (!std::isfinite(v)) throw Error("non-finite numeric literal");
  auto n = std::make_shared<Node>();
  n->op = Op::Number;
  n->value = v;
  return n;
}

NodePtr make_unary(Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr negate(NodePtr a) {
  if (a->op == Op::Number) return make_number(-a->value);
  return make_unary(Op::Neg, std::move(a));
}

const char* fn_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Min: return "min";
    case Op::Max: return "max";
    default: return "";
  }
}

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void print(const Node& n, std::string& out) {
  auto wrapped = [&out](const Node& c, bool wrap) {
    if (wrap) out += '(';
    print(c, out);
    if (wrap) out += ')';
  };
  switch (n.op) {
    case Op::Number:
      if (n.value < 0 || std::signbit(n.value)) {
        out += '(';
        out += format_double(n.value);
        out += ')';
      } else {
        out += format_double(n.value);
      }
      return;
    case Op::Variable:
      out += 'u';
      out += std::to_string(n.index);
      return;
    case Op::Parameter:
      out += n.name;
      return;
    case Op::Neg:
      out += '-';
      wrapped(*n.a, precedence(*n.a) < 3);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      int p = precedence(n);
      wrapped(*n.a, precedence(*n.a) < p);
      out += n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
      wrapped(*n.b, precedence(*n.b) <= p);
      return;
    }
    case Op::Pow:
      wrapped(*n.a, precedence(*n.a) <= 4);
      out += '^';
      wrapped(*n.b, precedence(*n.b) < 3);
      return;
    case Op::Min:
    case Op::Max:
      out += fn_name(n.op);
      out += '(';
      print(*n.a, out);
      out += ", ";
      print(*n.b, out);
      out += ')';
      return;
    default:
      out += fn_name(n.op);
      out += '(';
      print(*n.a, out);
      out += ')';
      return;
  }
}

std::string node_text(const Node& n) {
  std::string s;
  print(n, s);
  if (s.size() > 120) s = s.substr(0, 117) + "...";
  return s;
}

std::shared_ptr<const detail::Program> compile(const NodePtr& root) {
  auto prog = std::make_shared<detail::Program>();
  std::unordered_map<const Node*, int> slot;
  std::unordered_map<std::string, int> param_slot;
  // Iterative post-order so deep expansions cannot overflow the stack.
  std::vector<std::pair<const Node*, bool>> stack{{root.get(), false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (slot.count(n)) continue;
    if (!expanded) {
      stack.push_back({n, true});
      if (n->b) stack.push_back({n->b.get(), false});
      if (n->a) stack.push_back({n->a.get(), false});
      continue;
    }
    detail::Instr ins{n->op};
    ins.node = n;
    ins.value = n->value;
    ins.index = n->index;
    if (n->a) ins.a = slot.at(n->a.get());
    if (n->b) ins.b = slot.at(n->b.get());
    if (n->op == Op::Variable) prog->arity = std::max(prog->arity, n->index);
    if (n->op == Op::Parameter) {
      auto it = param_slot.find(n->name);
      if (it == param_slot.end()) {
        it = param_slot.emplace(n->name, static_cast<int>(prog->param_names.size())).first;
        prog->param_names.push_back(n->name);
      }
      ins.index = it->second;
    }
    slot[n] = static_cast<int>(prog->code.size());
    prog->code.push_back(ins);
  }
  return prog;
}

std::vector<double> resolve_params(const detail::Program& p, const ParamMap& params) {
  std::vector<double> out;
  out.reserve(p.param_names.size());
  for (const auto& name : p.param_names) {
    auto it = params.find(name);
    if (it == params.end()) throw Error("unbound parameter '" + name + "'");
    out.push_back(it->second);
  }
  return out;
}

[[noreturn]] void domain_fail(const detail::Instr& ins, double input, const char* msg) {
  throw DomainError(node_text(*ins.node), input, msg);
}

void check_point(std::span<const double> point, int arity) {
  if (static_cast<int>(point.size()) < arity)
    throw Error("point has " + std::to_string(point.size()) + " coordinates, expression needs " +
                std::to_string(arity));
  for (double v : point)
    if (!std::isfinite(v)) throw Error("non-finite evaluation point");
}

double apply(const detail::Instr& ins, double x, double y) {
  double r = 0.0;
  switch (ins.op) {
    case Op::Neg: r = -x; break;
    case Op::Add: r = x + y; break;
    case Op::Sub: r = x - y; break;
    case Op::Mul: r = x * y; break;
    case Op::Div:
      if (y == 0.0) domain_fail(ins, y, "division by zero");
      r = x / y;
      break;
    case Op::Pow:
      if (x == 0.0 && y < 0.0) domain_fail(ins, x, "zero to a negative power");
      r = std::pow(x, y);
      if (std::isnan(r)) domain_fail(ins, x, "negative base with non-integer exponent");
      break;
    case Op::Exp: r = std::exp(x); break;
    case Op::Log:
      if (x <= 0.0) domain_fail(ins, x, "log of non-positive value");
      r = std::log(x);
      break;
    case Op::Sqrt:
      if (x < 0.0) domain_fail(ins, x, "sqrt of negative value");
      r = std::sqrt(x);
      break;
    case Op::Abs: r = std::fabs(x); break;
    case Op::Min: r = std::min(x, y); break;
    case Op::Max: r = std::max(x, y); break;
    default: break;
  }
  if (!std::isfinite(r)) domain_fail(ins, x, "non-finite result");
  return r;
}

// Product that treats a zero seed as an exact zero even against an infinite coefficient.
double scaled(double coef, double d) { return d == 0.0 ? 0.0 : coef * d; }

NodePtr rebuild(const NodePtr& n, const std::function<NodePtr(const Node&)>& leaf,
                std::unordered_map<const Node*, NodePtr>& memo) {
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr out;
  if (n->op == Op::Number || n->op == Op::Variable || n->op == Op::Parameter) {
    out = leaf(*n);
    if (!out) out = n;
  } else {
    NodePtr a = rebuild(n->a, leaf, memo);
    NodePtr b = n->b ? rebuild(n->b, leaf, memo) : nullptr;
    if (a == n->a && b == n->b)
      out = n;
    else if (n->op == Op::Neg)
      out = negate(a);
    else
      out = b ? make_binary(n->op, a, b) : make_unary(n->op, a);
  }
  memo.emplace(n.get(), out);
  return out;
}

}  // namespace

Expression::Expression() : Expression(make_number(0.0)) {}
Expression::Expression(double value) : Expression(make_number(value)) {}
Expression::Expression(std::shared_ptr<const detail::Node> root)
    : root_(std::move(root)), program_(compile(root_)) {}

Expression Expression::constant(double value) { return Expression(make_number(value)); }

Expression Expression::variable(int index) {
  if (index < 1) throw Error("variable index must be at least 1");
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  n->index = index;
  return Expression(NodePtr(std::move(n)));
}

Expression Expression::parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Parameter;
  n->name = std::move(name);
  return Expression(NodePtr(std::move(n)));
}

const detail::Program& Expression::program() const { return *program_; }
int Expression::arity() const noexcept { return program_->arity; }
std::size_t Expression::node_count() const noexcept { return program_->code.size(); }
bool Expression::is_number() const noexcept { return root_->op == Op::Number; }

double Expression::number_value() const {
  if (!is_number()) throw Error("expression is not a number literal");
  return root_->value;
}

double Expression::eval(std::span<const double> point, const ParamMap& params) const {
  const auto& p = program();
  check_point(point, p.arity);
  auto pv = resolve_params(p, params);
  std::vector<double> v(p.code.size());
  for (std::size_t i = 0; i < p.code.size(); ++i) {
    const auto& ins = p.code[i];
    switch (ins.op) {
      case Op::Number: v[i] = ins.value; break;
      case Op::Variable: v[i] = point[ins.index - 1]; break;
      case Op::Parameter:
        v[i] = pv[ins.index];
        if (!std::isfinite(v[i])) throw Error("non-finite parameter '" + p.param_names[ins.index] + "'");
        break;
      default: v[i] = apply(ins, v[ins.a], ins.b >= 0 ? v[ins.b] : 0.0); break;
    }
  }
  return v.back();
}

std::optional<double> Expression::try_eval(std::span<const double> point,
                                           const ParamMap& params) const noexcept {
  try {
    return eval(point, params);
  } catch (...) {
    return std::nullopt;
  }
}

DualVector Expression::eval_dual(std::span<const double> point, const ParamMap& params) const {
  const auto& p = program();
  check_point(point, p.arity);
  auto pv = resolve_params(p, params);
  const std::size_t k = point.size();
  const std::size_t n = p.code.size();
  std::vector<double> v(n), d(n * k, 0.0);
  bool flag = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ins = p.code[i];
    double* di = d.data() + i * k;
    const double* da = ins.a >= 0 ? d.data() + static_cast<std::size_t>(ins.a) * k : nullptr;
    const double* db = ins.b >= 0 ? d.data() + static_cast<std::size_t>(ins.b) * k : nullptr;
    switch (ins.op) {
      case Op::Number: v[i] = ins.value; continue;
      case Op::Variable:
        v[i] = point[ins.index - 1];
        di[ins.index - 1] = 1.0;
        continue;
      case Op::Parameter: v[i] = pv[ins.index]; continue;
      default: break;
    }
    const double x = v[ins.a];
    const double y = ins.b >= 0 ? v[ins.b] : 0.0;
    const double r = apply(ins, x, y);
    v[i] = r;
    switch (ins.op) {
      case Op::Neg:
        for (std::size_t j = 0; j < k; ++j) di[j] = -da[j];
        break;
      case Op::Add:
        for (std::size_t j = 0; j < k; ++j) di[j] = da[j] + db[j];
        break;
      case Op::Sub:
        for (std::size_t j = 0; j < k; ++j) di[j] = da[j] - db[j];
        break;
      case Op::Mul:
        for (std::size_t j = 0; j < k; ++j) di[j] = scaled(y, da[j]) + scaled(x, db[j]);
        break;
      case Op::Div:
        for (std::size_t j = 0; j < k; ++j) di[j] = scaled(1.0 / y, da[j]) - scaled(x / (y * y), db[j]);
        break;
      case Op::Pow: {
        const bool var_exp = std::any_of(db, db + k, [](double t) { return t != 0.0; });
        if (var_exp && x <= 0.0) domain_fail(ins, x, "variable exponent needs a positive base");
        const double cb = y == 0.0 ? 0.0 : y * std::pow(x, y - 1.0);
        const double ce = var_exp ? r * std::log(x) : 0.0;
        for (std::size_t j = 0; j < k; ++j) di[j] = scaled(cb, da[j]) + scaled(ce, db[j]);
        break;
      }
      case Op::Exp:
        for (std::size_t j = 0; j < k; ++j) di[j] = scaled(r, da[j]);
        break;
      case Op::Log:
        for (std::size_t j = 0; j < k; ++j) di[j] = scaled(1.0 / x, da[j]);
        break;
      case Op::Sqrt: {
        const double c = r == 0.0 ? INFINITY : 0.5 / r;
        for (std::size_t j = 0; j < k; ++j) di[j] = scaled(c, da[j]);
        break;
      }
      case Op::Abs:
        if (x == 0.0) {
          flag = true;
          for (std::size_t j = 0; j < k; ++j) di[j] = 0.0;
        } else {
          const double s = x > 0 ? 1.0 : -1.0;
          for (std::size_t j = 0; j < k; ++j) di[j] = s * da[j];
        }
        break;
      case Op::Min:
      case Op::Max: {
        bool take_a = ins.op == Op::Min ? x <= y : x >= y;
        if (x == y && !std::equal(da, da + k, db)) flag = true;
        const double* src = take_a ? da : db;
        std::copy(src, src + k, di);
        break;
      }
      default: break;
    }
    for (std::size_t j = 0; j < k; ++j)
      if (!std::isfinite(di[j])) domain_fail(ins, x, "non-finite derivative");
  }
  DualVector out;
  out.value = v.back();
  out.partials.assign(d.end() - static_cast<std::ptrdiff_t>(k), d.end());
  out.non_differentiable = flag;
  return out;
}

std::string Expression::to_string() const {
  std::string s;
  print(*root_, s);
  return s;
}

NameSet Expression::parameters() const {
  return NameSet(program_->param_names.begin(), program_->param_names.end());
}

Expression Expression::bind(const ParamMap& params) const {
  std::unordered_map<const Node*, NodePtr> memo;
  auto leaf = [&params](const Node& n) -> NodePtr {
    if (n.op != Op::Parameter) return nullptr;
    auto it = params.find(n.name);
    return it == params.end() ? nullptr : make_number(it->second);
  };
  return Expression(rebuild(root_, leaf, memo));
}

Expression Expression::substitute(std::span<const Expression> replacements) const {
  if (static_cast<int>(replacements.size()) < arity())
    throw Error("substitute needs " + std::to_string(arity()) + " replacements, got " +
                std::to_string(replacements.size()));
  std::unordered_map<const Node*, NodePtr> memo;
  auto leaf = [&replacements](const Node& n) -> NodePtr {
    if (n.op != Op::Variable) return nullptr;
    return replacements[n.index - 1].root_;
  };
  return Expression(rebuild(root_, leaf, memo));
}

bool structurally_equal(const Expression& a, const Expression& b) {
  struct PairHash {
    std::size_t operator()(const std::pair<const Node*, const Node*>& p) const {
      return std::hash<const void*>()(p.first) * 31 + std::hash<const void*>()(p.second);
    }
  };
  std::unordered_map<std::pair<const Node*, const Node*>, bool, PairHash> seen;
  std::function<bool(const Node*, const Node*)> eq = [&](const Node* x, const Node* y) {
    if (x == y) return true;
    if (!x || !y || x->op != y->op) return false;
    auto key = std::make_pair(x, y);
    if (auto it = seen.find(key); it != seen.end()) return it->second;
    bool r = false;
    switch (x->op) {
      case Op::Number: r = x->value == y->value; break;
      case Op::Variable: r = x->index == y->index; break;
      case Op::Parameter: r = x->name == y->name; break;
      default: r = eq(x->a.get(), y->a.get()) && eq(x->b.get(), y->b.get()); break;
    }
    seen.emplace(key, r);
    return r;
  };
  return eq(a.root_.get(), b.root_.get());
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Add, a.root_, b.root_));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Sub, a.root_, b.root_));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Mul, a.root_, b.root_));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Div, a.root_, b.root_));
}
Expression operator-(const Expression& a) { return Expression(negate(a.root_)); }
Expression pow(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Pow, a.root_, b.root_));
}
Expression exp(const Expression& a) { return Expression(make_unary(Op::Exp, a.root_)); }
Expression log(const Expression& a) { return Expression(make_unary(Op::Log, a.root_)); }
Expression sqrt(const Expression& a) { return Expression(make_unary(Op::Sqrt, a.root_)); }
Expression abs(const Expression& a) { return Expression(make_unary(Op::Abs, a.root_)); }
Expression min(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Min, a.root_, b.root_));
}
Expression max(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::Max, a.root_, b.root_));
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int k, const NameSet& params)
      : text_(text), k_(k), params_(params) {}

  NodePtr run() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
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

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size())
        throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_binary(Op::Add, lhs, term());
      else if (accept('-'))
        lhs = make_binary(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make_binary(Op::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make_binary(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return negate(unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [this] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_ || !std::isfinite(v))
      throw ParseError("malformed number", start);
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view id = text_.substr(start, pos_ - start);

    if (id.size() > 1 && id[0] == 'u' &&
        std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int idx = 0;
      auto res = std::from_chars(id.data() + 1, id.data() + id.size(), idx);
      if (res.ec != std::errc() || idx < 1) throw ParseError("invalid variable '" + std::string(id) + "'", start);
      if (idx > k_)
        throw ParseError("variable index " + std::to_string(idx) + " exceeds k=" + std::to_string(k_), start);
      auto n = std::make_shared<Node>();
      n->op = Op::Variable;
      n->index = idx;
      return n;
    }

    static const std::pair<std::string_view, Op> fns[] = {
        {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt},
        {"abs", Op::Abs}, {"min", Op::Min}, {"max", Op::Max}};
    for (const auto& [fname, op] : fns) {
      if (id != fname) continue;
      if (!accept('(')) throw ParseError("function '" + std::string(id) + "' needs '('", pos_);
      NodePtr a = expr();
      if (op == Op::Min || op == Op::Max) {
        if (!accept(',')) throw ParseError("'" + std::string(id) + "' takes two arguments", pos_);
        NodePtr b = expr();
        expect(')');
        return make_binary(op, a, b);
      }
      if (accept(',')) throw ParseError("'" + std::string(id) + "' takes one argument", pos_);
      expect(')');
      return make_unary(op, a);
    }

    if (params_.count(id)) {
      auto n = std::make_shared<Node>();
      n->op = Op::Parameter;
      n->name = std::string(id);
      return n;
    }
    throw ParseError("unknown identifier '" + std::string(id) + "'", start);
  }

  std::string_view text_;
  int k_;
  const NameSet& params_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view text, int k, const NameSet& params) {
  if (k < 1) throw Error("parse needs k >= 1");
  return Expression(Parser(text, k, params).run());
}

}  // namespace gascert

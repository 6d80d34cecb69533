#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gascert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Raised for log/sqrt of invalid input, division by zero and any non-finite result.
class DomainError : public Error {
 public:
  DomainError(std::string node, double input, const std::string& what_happened);
  const std::string& node() const noexcept { return node_; }
  double input() const noexcept { return input_; }

 private:
  std::string node_;
  double input_;
};

using ParamMap = std::map<std::string, double, std::less<>>;
using NameSet = std::set<std::string, std::less<>>;

struct DualVector {
  double value = 0.0;
  std::vector<double> partials;
  bool non_differentiable = false;
};

namespace detail {
struct Node;
struct Program;
}  // namespace detail

// Immutable expression DAG in variables u1..uk and named parameters.
// Copies share structure; evaluation goes through a compiled tape, so shared
// subtrees are evaluated once per call.
class Expression {
 public:
  Expression();
  Expression(double value);  // NOLINT(google-explicit-constructor)

  static Expression constant(double value);
  // 1-based index, as in the text form u1..uk.
  static Expression variable(int index);
  static Expression parameter(std::string name);

  // Largest variable index that occurs; 0 for closed expressions.
  int arity() const noexcept;
  std::size_t node_count() const noexcept;
  bool is_number() const noexcept;
  double number_value() const;

  double eval(std::span<const double> point, const ParamMap& params = {}) const;
  std::optional<double> try_eval(std::span<const double> point,
                                 const ParamMap& params = {}) const noexcept;
  DualVector eval_dual(std::span<const double> point, const ParamMap& params = {}) const;
  double eval(std::initializer_list<double> point, const ParamMap& params = {}) const {
    return eval(std::span<const double>(point.begin(), point.size()), params);
  }
  std::optional<double> try_eval(std::initializer_list<double> point, const ParamMap& params = {}) const noexcept {
    return try_eval(std::span<const double>(point.begin(), point.size()), params);
  }
  DualVector eval_dual(std::initializer_list<double> point, const ParamMap& params = {}) const {
    return eval_dual(std::span<const double>(point.begin(), point.size()), params);
  }

  std::string to_string() const;
  NameSet parameters() const;

  // Replaces named parameters by numbers; unmatched parameters stay symbolic.
  Expression bind(const ParamMap& params) const;
  // u_i -> replacements[i-1]; requires replacements.size() >= arity().
  Expression substitute(std::span<const Expression> replacements) const;

  friend bool structurally_equal(const Expression& a, const Expression& b);

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression pow(const Expression& a, const Expression& b);
  friend Expression exp(const Expression& a);
  friend Expression log(const Expression& a);
  friend Expression sqrt(const Expression& a);
  friend Expression abs(const Expression& a);
  friend Expression min(const Expression& a, const Expression& b);
  friend Expression max(const Expression& a, const Expression& b);
  friend Expression parse(std::string_view text, int k, const NameSet& params);

 private:
  explicit Expression(std::shared_ptr<const detail::Node> root);
  const detail::Program& program() const;

  std::shared_ptr<const detail::Node> root_;
  std::shared_ptr<const detail::Program> program_;
};

// Grammar: + - (left), * / (left), unary -, ^ (right, binds tighter than unary
// minus), calls exp log sqrt abs (1 arg) and min max (2 args), numbers,
// variables u1..uk and declared parameter names.
Expression parse(std::string_view text, int k, const NameSet& params = {});

}  // namespace gascert

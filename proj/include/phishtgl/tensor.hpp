#ifndef PHISHTGL_TENSOR_HPP_
#define PHISHTGL_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "phishtgl/errors.hpp"

namespace phishtgl {

// Dense row-major matrix of doubles. Rank is at most 2; vectors are 1xN rows.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Tensor(std::size_t r, std::size_t c, std::vector<double> d);

  static Tensor zeros(std::size_t r, std::size_t c) { return Tensor(r, c); }
  static Tensor full(std::size_t r, std::size_t c, double v);
  static Tensor row(std::vector<double> v);
  static Tensor scalar(double v) { return full(1, 1, v); }

  std::size_t numel() const { return rows * cols; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double item() const;

  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
  void check_finite(const std::string& what) const;
};

class Node;
using NodePtr = std::shared_ptr<Node>;

// One recorded operation in the computation graph.
class Node {
 public:
  Tensor value;
  Tensor grad;  // allocated lazily during backward
  std::vector<NodePtr> parents;
  std::function<void(Node&)> backward_fn;  // scatters this->grad into parents
  bool requires_grad = false;

  void ensure_grad() {
    if (grad.numel() != value.numel()) grad = Tensor::zeros(value.rows, value.cols);
  }
};

// Handle to a graph node. Cheap to copy; the graph lives as long as some
// handle (or a downstream node) references it.
class Value {
 public:
  Value() = default;
  explicit Value(NodePtr n) : node_(std::move(n)) {}

  // Leaf constant (no gradient).
  static Value constant(Tensor t);
  // Leaf parameter (receives gradients).
  static Value param(Tensor t);

  bool defined() const { return node_ != nullptr; }
  const Tensor& tensor() const { return node_->value; }
  const Tensor& grad() const { return node_->grad; }
  Tensor& mutable_tensor() { return node_->value; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  std::size_t rows() const { return node_->value.rows; }
  std::size_t cols() const { return node_->value.cols; }
  double item() const { return node_->value.item(); }

  // Breaks the graph: returns a constant with the same payload.
  Value detach() const { return constant(node_->value); }

  NodePtr node() const { return node_; }

 private:
  NodePtr node_;
};

// While alive, newly created ops record no graph (forward-only).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

bool grad_enabled();

// ---- forward ops (each records its reverse pass unless grads are off) ----

Value matmul(const Value& a, const Value& b);
Value transpose(const Value& a);
Value add(const Value& a, const Value& b);  // same shape, or b is a 1xC row broadcast over a's rows
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);  // elementwise
Value neg(const Value& a);
Value scalar_mul(const Value& a, double c);
Value scalar_add(const Value& a, double c);
Value concat_cols(const std::vector<Value>& parts);
Value concat_rows(const std::vector<Value>& parts);
Value slice(const Value& a, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1);
Value sum_all(const Value& a);
Value mean_all(const Value& a);
Value mean_rows(const Value& a);  // column-wise mean over rows -> 1xC
Value softmax_rows(const Value& a);
Value logsumexp_rows(const Value& a);  // -> Rx1, numerically stable
Value tanh_op(const Value& a);
Value sigmoid(const Value& a);
Value relu(const Value& a);
Value exp_op(const Value& a);
Value log_op(const Value& a);
Value cos_op(const Value& a);
Value sin_op(const Value& a);
// [a0,b0,a1,b1,...] column interleave of two equal-shape matrices.
Value interleave_cols(const Value& a, const Value& b);
Value l2_normalize_rows(const Value& a);  // zero rows stay zero
Value cosine_similarity(const Value& a, const Value& b);  // 1xN rows -> scalar

// Reverse accumulation from a scalar loss. Gradients accumulate into every
// requires_grad node reachable from `loss`.
void backward(const Value& loss);

// Named parameter collection with a seeded init RNG.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  // Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
  Value add_param(const std::string& name, std::size_t rows, std::size_t cols,
                  std::size_t fan_in);
  Value add_param_tensor(const std::string& name, Tensor t);
  Value get(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }
  std::uint64_t seed() const { return seed_; }

  void zero_grad();
  // Overwrite a parameter's payload (used by checkpoint loading).
  void set_value(const std::string& name, const Tensor& t);

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::map<std::string, Value> params_;
  std::vector<std::string> order_;
};

enum class StepSign { kAscent, kDescent };

struct OptimizerState {
  double learning_rate = 1e-4;
  double momentum = 0.0;  // 0 = plain SGA/SGD
  StepSign sign = StepSign::kAscent;
  std::map<std::string, Tensor> velocity;
};

// param += lr * grad (ascent) or -= (descent); zeroes gradients afterwards.
void sga_step(ParamStore& store, OptimizerState& opt);

// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
double grad_check(const std::function<Value(const Value&)>& f, const Tensor& point,
                  double eps);

}  // namespace phishtgl

#endif  // PHISHTGL_TENSOR_HPP_

#include "phishtgl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace phishtgl {

Tensor::Tensor(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != r * c) throw ShapeError("tensor data length does not match shape");
}

Tensor Tensor::full(std::size_t r, std::size_t c, double v) {
  Tensor t(r, c);
  std::fill(t.data.begin(), t.data.end(), v);
  return t;
}

Tensor Tensor::row(std::vector<double> v) {
  std::size_t n = v.size();
  return Tensor(1, n, std::move(v));
}

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() requires a 1x1 tensor");
  return data[0];
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::check_finite(const std::string& what) const {
  if (!all_finite()) throw NumericalError("non-finite values in " + what);
}

namespace {

thread_local bool g_grad_enabled = true;

NodePtr make_leaf(Tensor t, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->value = std::move(t);
  n->requires_grad = requires_grad && g_grad_enabled;
  return n;
}

// Creates an op node; drops the tape when grads are globally off or no
// parent needs them.
Value make_op(Tensor out, std::vector<Value> parents, std::function<void(Node&)> bw) {
  auto n = std::make_shared<Node>();
  n->value = std::move(out);
  bool need = false;
  if (g_grad_enabled) {
    for (const auto& p : parents)
      if (p.requires_grad()) need = true;
  }
  if (need) {
    n->requires_grad = true;
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backward_fn = std::move(bw);
  }
  return Value(n);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols) + ")");
}

}  // namespace

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }
bool grad_enabled() { return g_grad_enabled; }

Value Value::constant(Tensor t) { return Value(make_leaf(std::move(t), false)); }

Value Value::param(Tensor t) {
  auto n = std::make_shared<Node>();
  n->value = std::move(t);
  n->requires_grad = true;  // parameters track gradients even under NoGrad creation
  return Value(n);
}

Value matmul(const Value& a, const Value& b) {
  const Tensor& A = a.tensor();
  const Tensor& B = b.tensor();
  if (A.cols != B.rows)
    throw ShapeError("matmul: inner dimensions differ (" + std::to_string(A.cols) + " vs " +
                     std::to_string(B.rows) + ")");
  Tensor out(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      double aik = A.data[i * A.cols + k];
      if (aik == 0.0) continue;
      const double* brow = &B.data[k * B.cols];
      double* orow = &out.data[i * out.cols];
      for (std::size_t j = 0; j < B.cols; ++j) orow[j] += aik * brow[j];
    }
  return make_op(std::move(out), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    const Tensor& A = pa.value;
    const Tensor& B = pb.value;
    const Tensor& G = n.grad;
    if (pa.requires_grad) {
      pa.ensure_grad();  // dA = G * B^T
      for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t k = 0; k < A.cols; ++k) {
          double s = 0.0;
          const double* grow = &G.data[i * G.cols];
          const double* brow = &B.data[k * B.cols];
          for (std::size_t j = 0; j < B.cols; ++j) s += grow[j] * brow[j];
          pa.grad.data[i * A.cols + k] += s;
        }
    }
    if (pb.requires_grad) {
      pb.ensure_grad();  // dB = A^T * G
      for (std::size_t k = 0; k < B.rows; ++k)
        for (std::size_t i = 0; i < A.rows; ++i) {
          double aik = A.data[i * A.cols + k];
          if (aik == 0.0) continue;
          const double* grow = &G.data[i * G.cols];
          double* brow = &pb.grad.data[k * B.cols];
          for (std::size_t j = 0; j < B.cols; ++j) brow[j] += aik * grow[j];
        }
    }
  });
}

Value transpose(const Value& a) {
  const Tensor& A = a.tensor();
  Tensor out(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) out.at(j, i) = A.at(i, j);
  return make_op(std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.rows; ++i)
      for (std::size_t j = 0; j < n.grad.cols; ++j) p.grad.at(j, i) += n.grad.at(i, j);
  });
}

Value add(const Value& a, const Value& b) {
  const Tensor& A = a.tensor();
  const Tensor& B = b.tensor();
  if (A.same_shape(B)) {
    Tensor out = A;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += B.data[i];
    return make_op(std::move(out), {a, b}, [](Node& n) {
      for (auto& pp : n.parents) {
        Node& p = *pp;
        if (!p.requires_grad) continue;
        p.ensure_grad();
        for (std::size_t i = 0; i < n.grad.data.size(); ++i) p.grad.data[i] += n.grad.data[i];
      }
    });
  }
  if (B.rows == 1 && B.cols == A.cols) {  // row broadcast
    Tensor out = A;
    for (std::size_t i = 0; i < A.rows; ++i)
      for (std::size_t j = 0; j < A.cols; ++j) out.at(i, j) += B.data[j];
    return make_op(std::move(out), {a, b}, [](Node& n) {
      Node& pa = *n.parents[0];
      Node& pb = *n.parents[1];
      if (pa.requires_grad) {
        pa.ensure_grad();
        for (std::size_t i = 0; i < n.grad.data.size(); ++i) pa.grad.data[i] += n.grad.data[i];
      }
      if (pb.requires_grad) {
        pb.ensure_grad();
        for (std::size_t i = 0; i < n.grad.rows; ++i)
          for (std::size_t j = 0; j < n.grad.cols; ++j) pb.grad.data[j] += n.grad.at(i, j);
      }
    });
  }
  throw ShapeError("add: incompatible shapes");
}

Value sub(const Value& a, const Value& b) { return add(a, neg(b)); }

Value mul(const Value& a, const Value& b) {
  check_same_shape(a.tensor(), b.tensor(), "mul");
  Tensor out = a.tensor();
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.tensor().data[i];
  return make_op(std::move(out), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t i = 0; i < n.grad.data.size(); ++i)
        pa.grad.data[i] += n.grad.data[i] * pb.value.data[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (std::size_t i = 0; i < n.grad.data.size(); ++i)
        pb.grad.data[i] += n.grad.data[i] * pa.value.data[i];
    }
  });
}

Value neg(const Value& a) { return scalar_mul(a, -1.0); }

Value scalar_mul(const Value& a, double c) {
  Tensor out = a.tensor();
  for (double& v : out.data) v *= c;
  return make_op(std::move(out), {a}, [c](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.data.size(); ++i) p.grad.data[i] += c * n.grad.data[i];
  });
}

Value scalar_add(const Value& a, double c) {
  Tensor out = a.tensor();
  for (double& v : out.data) v += c;
  return make_op(std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.data.size(); ++i) p.grad.data[i] += n.grad.data[i];
  });
}

Value concat_cols(const std::vector<Value>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  std::size_t rows = parts[0].rows(), cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw ShapeError("concat_cols: row count mismatch");
    cols += p.cols();
  }
  Tensor out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor& T = p.tensor();
    for (std::size_t i = 0; i < rows; ++i)
      std::copy(T.data.begin() + i * T.cols, T.data.begin() + (i + 1) * T.cols,
                out.data.begin() + i * cols + off);
    off += T.cols;
  }
  return make_op(std::move(out), parts, [](Node& n) {
    std::size_t off = 0;
    for (auto& pp : n.parents) {
      Node& p = *pp;
      std::size_t pc = p.value.cols;
      if (p.requires_grad) {
        p.ensure_grad();
        for (std::size_t i = 0; i < p.value.rows; ++i)
          for (std::size_t j = 0; j < pc; ++j)
            p.grad.at(i, j) += n.grad.at(i, off + j);
      }
      off += pc;
    }
  });
}

Value concat_rows(const std::vector<Value>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  std::size_t cols = parts[0].cols(), rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw ShapeError("concat_rows: column count mismatch");
    rows += p.rows();
  }
  Tensor out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor& T = p.tensor();
    std::copy(T.data.begin(), T.data.end(), out.data.begin() + off * cols);
    off += T.rows;
  }
  return make_op(std::move(out), parts, [](Node& n) {
    std::size_t off = 0;
    for (auto& pp : n.parents) {
      Node& p = *pp;
      if (p.requires_grad) {
        p.ensure_grad();
        for (std::size_t i = 0; i < p.value.data.size(); ++i)
          p.grad.data[i] += n.grad.data[off * n.grad.cols + i];
      }
      off += p.value.rows;
    }
  });
}

Value slice(const Value& a, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
  const Tensor& A = a.tensor();
  if (r1 > A.rows || c1 > A.cols || r0 > r1 || c0 > c1)
    throw ShapeError("slice: range out of bounds");
  Tensor out(r1 - r0, c1 - c0);
  for (std::size_t i = 0; i < out.rows; ++i)
    for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) = A.at(r0 + i, c0 + j);
  return make_op(std::move(out), {a}, [r0, c0](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.rows; ++i)
      for (std::size_t j = 0; j < n.grad.cols; ++j)
        p.grad.at(r0 + i, c0 + j) += n.grad.at(i, j);
  });
}

Value sum_all(const Value& a) {
  double s = 0.0;
  for (double v : a.tensor().data) s += v;
  return make_op(Tensor::scalar(s), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    double g = n.grad.data[0];
    for (double& v : p.grad.data) v += g;
  });
}

Value mean_all(const Value& a) {
  return scalar_mul(sum_all(a), 1.0 / static_cast<double>(a.tensor().numel()));
}

Value mean_rows(const Value& a) {
  const Tensor& A = a.tensor();
  if (A.rows == 0) throw ShapeError("mean_rows: empty input");
  Tensor out(1, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) out.data[j] += A.at(i, j);
  double inv = 1.0 / static_cast<double>(A.rows);
  for (double& v : out.data) v *= inv;
  return make_op(std::move(out), {a}, [inv](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < p.value.rows; ++i)
      for (std::size_t j = 0; j < p.value.cols; ++j)
        p.grad.at(i, j) += inv * n.grad.data[j];
  });
}

Value softmax_rows(const Value& a) {
  const Tensor& A = a.tensor();
  Tensor out(A.rows, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double mx = -1e300;
    for (std::size_t j = 0; j < A.cols; ++j) mx = std::max(mx, A.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < A.cols; ++j) {
      double e = std::exp(A.at(i, j) - mx);
      out.at(i, j) = e;
      z += e;
    }
    for (std::size_t j = 0; j < A.cols; ++j) out.at(i, j) /= z;
  }
  return make_op(std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    const Tensor& S = n.value;
    for (std::size_t i = 0; i < S.rows; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < S.cols; ++j) dot += n.grad.at(i, j) * S.at(i, j);
      for (std::size_t j = 0; j < S.cols; ++j)
        p.grad.at(i, j) += S.at(i, j) * (n.grad.at(i, j) - dot);
    }
  });
}

Value logsumexp_rows(const Value& a) {
  const Tensor& A = a.tensor();
  Tensor out(A.rows, 1);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double mx = -1e300;
    for (std::size_t j = 0; j < A.cols; ++j) mx = std::max(mx, A.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < A.cols; ++j) z += std::exp(A.at(i, j) - mx);
    out.at(i, 0) = mx + std::log(z);
  }
  return make_op(std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    const Tensor& A = p.value;
    for (std::size_t i = 0; i < A.rows; ++i) {
      double lse = n.value.at(i, 0);
      double g = n.grad.at(i, 0);
      for (std::size_t j = 0; j < A.cols; ++j)
        p.grad.at(i, j) += g * std::exp(A.at(i, j) - lse);
    }
  });
}

namespace {

template <typename F, typename DF>
Value elementwise(const Value& a, F f, DF df) {
  Tensor out = a.tensor();
  for (double& v : out.data) v = f(v);
  return make_op(std::move(out), {a}, [df](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < n.grad.data.size(); ++i)
      p.grad.data[i] += n.grad.data[i] * df(p.value.data[i], n.value.data[i]);
  });
}

}  // namespace

Value tanh_op(const Value& a) {
  return elementwise(a, [](double x) { return std::tanh(x); },
                     [](double, double y) { return 1.0 - y * y; });
}

Value sigmoid(const Value& a) {
  return elementwise(a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
                     [](double, double y) { return y * (1.0 - y); });
}

Value relu(const Value& a) {
  return elementwise(a, [](double x) { return x > 0.0 ? x : 0.0; },
                     [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Value exp_op(const Value& a) {
  return elementwise(a, [](double x) { return std::exp(x); },
                     [](double, double y) { return y; });
}

Value log_op(const Value& a) {
  return elementwise(a, [](double x) { return std::log(x); },
                     [](double x, double) { return 1.0 / x; });
}

Value cos_op(const Value& a) {
  return elementwise(a, [](double x) { return std::cos(x); },
                     [](double x, double) { return -std::sin(x); });
}

Value sin_op(const Value& a) {
  return elementwise(a, [](double x) { return std::sin(x); },
                     [](double x, double) { return std::cos(x); });
}

Value interleave_cols(const Value& a, const Value& b) {
  check_same_shape(a.tensor(), b.tensor(), "interleave_cols");
  const Tensor& A = a.tensor();
  const Tensor& B = b.tensor();
  Tensor out(A.rows, 2 * A.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) {
      out.at(i, 2 * j) = A.at(i, j);
      out.at(i, 2 * j + 1) = B.at(i, j);
    }
  return make_op(std::move(out), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    std::size_t cols = pa.value.cols;
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t i = 0; i < pa.value.rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) pa.grad.at(i, j) += n.grad.at(i, 2 * j);
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (std::size_t i = 0; i < pb.value.rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) pb.grad.at(i, j) += n.grad.at(i, 2 * j + 1);
    }
  });
}

Value l2_normalize_rows(const Value& a) {
  const Tensor& A = a.tensor();
  constexpr double kZeroNorm = 1e-30;
  Tensor out(A.rows, A.cols);
  std::vector<double> norms(A.rows, 0.0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < A.cols; ++j) s += A.at(i, j) * A.at(i, j);
    double nrm = std::sqrt(s);
    norms[i] = nrm;
    if (nrm > kZeroNorm)
      for (std::size_t j = 0; j < A.cols; ++j) out.at(i, j) = A.at(i, j) / nrm;
    // zero rows stay zero
  }
  return make_op(std::move(out), {a}, [norms](Node& n) {
    Node& p = *n.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    const Tensor& Y = n.value;
    for (std::size_t i = 0; i < Y.rows; ++i) {
      double nrm = norms[i];
      if (nrm <= kZeroNorm) continue;  // zero row: subgradient 0
      double dot = 0.0;
      for (std::size_t j = 0; j < Y.cols; ++j) dot += n.grad.at(i, j) * Y.at(i, j);
      for (std::size_t j = 0; j < Y.cols; ++j)
        p.grad.at(i, j) += (n.grad.at(i, j) - dot * Y.at(i, j)) / nrm;
    }
  });
}

Value cosine_similarity(const Value& a, const Value& b) {
  if (a.rows() != 1 || b.rows() != 1 || a.cols() != b.cols())
    throw ShapeError("cosine_similarity: expects two 1xN rows of equal length");
  return matmul(l2_normalize_rows(a), transpose(l2_normalize_rows(b)));
}

void backward(const Value& loss) {
  if (!loss.defined()) throw GraphError("backward: undefined loss");
  if (loss.tensor().numel() != 1) throw GraphError("backward: loss must be scalar");
  if (!loss.requires_grad()) return;  // nothing reachable

  // Topological order via iterative DFS (graphs can be deep).
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [n, idx] = stack.back();
    if (idx < n->parents.size()) {
      Node* p = n->parents[idx].get();
      ++idx;
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  loss.node()->ensure_grad();
  loss.node()->grad.data[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && n->grad.numel() == n->value.numel()) n->backward_fn(*n);
  }
}

Value ParamStore::add_param(const std::string& name, std::size_t rows, std::size_t cols,
                            std::size_t fan_in) {
  if (fan_in == 0) throw ShapeError("add_param: fan_in must be positive");
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(rows, cols);
  for (double& v : t.data) v = dist(rng_);
  return add_param_tensor(name, std::move(t));
}

Value ParamStore::add_param_tensor(const std::string& name, Tensor t) {
  if (params_.count(name)) throw GraphError("duplicate parameter name: " + name);
  Value v = Value::param(std::move(t));
  params_.emplace(name, v);
  order_.push_back(name);
  return v;
}

Value ParamStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw GraphError("unknown parameter: " + name);
  return it->second;
}

bool ParamStore::has(const std::string& name) const { return params_.count(name) > 0; }

void ParamStore::zero_grad() {
  for (const auto& name : order_) {
    Node& n = *params_.at(name).node();
    std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
  }
}

void ParamStore::set_value(const std::string& name, const Tensor& t) {
  Node& n = *get(name).node();
  if (!n.value.same_shape(t)) throw ShapeMismatch("set_value: shape mismatch for " + name);
  n.value = t;
}

void sga_step(ParamStore& store, OptimizerState& opt) {
  if (opt.learning_rate <= 0) throw ConfigError("learning rate must be positive");
  double dir = opt.sign == StepSign::kAscent ? 1.0 : -1.0;
  for (const auto& name : store.names()) {
    Node& n = *store.get(name).node();
    if (n.grad.numel() != n.value.numel()) {
      n.ensure_grad();
    }
    if (opt.momentum > 0.0) {
      Tensor& vel = opt.velocity.try_emplace(name, Tensor::zeros(n.value.rows, n.value.cols))
                        .first->second;
      for (std::size_t i = 0; i < n.value.data.size(); ++i) {
        vel.data[i] = opt.momentum * vel.data[i] + n.grad.data[i];
        n.value.data[i] += dir * opt.learning_rate * vel.data[i];
      }
    } else {
      for (std::size_t i = 0; i < n.value.data.size(); ++i)
        n.value.data[i] += dir * opt.learning_rate * n.grad.data[i];
    }
    std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
  }
}

double grad_check(const std::function<Value(const Value&)>& f, const Tensor& point,
                  double eps) {
  Value x = Value::param(point);
  Value y = f(x);
  if (y.tensor().numel() != 1) throw GraphError("grad_check: f must be scalar-valued");
  y.tensor().check_finite("grad_check forward");
  backward(y);
  Tensor analytic = x.grad();
  if (analytic.numel() != point.numel()) analytic = Tensor::zeros(point.rows, point.cols);

  double worst = 0.0;
  for (std::size_t i = 0; i < point.numel(); ++i) {
    Tensor pert = point;
    pert.data[i] = point.data[i] + eps;
    double fp = f(Value::constant(pert)).item();
    pert.data[i] = point.data[i] - eps;
    double fm = f(Value::constant(pert)).item();
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericalError("grad_check: non-finite probe");
    double numeric = (fp - fm) / (2.0 * eps);
    double err = std::abs(analytic.data[i] - numeric) /
                 std::max(1.0, std::abs(analytic.data[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace phishtgl

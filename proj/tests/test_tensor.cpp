#include <doctest.h>

#include <cmath>
#include <random>

#include "phishtgl/tensor.hpp"

using namespace phishtgl;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor t(r, c);
  for (double& v : t.data) v = dist(rng);
  return t;
}

}  // namespace

TEST_CASE("softmax of zeros is uniform and rows sum to one") {
  Value s = softmax_rows(Value::constant(Tensor::row({0, 0, 0})));
  for (std::size_t j = 0; j < 3; ++j) CHECK(s.tensor().at(0, j) == doctest::Approx(1.0 / 3));

  Tensor x = random_tensor(5, 7, 11);
  Value sm = softmax_rows(Value::constant(x));
  for (std::size_t i = 0; i < 5; ++i) {
    double sum = 0;
    for (std::size_t j = 0; j < 7; ++j) sum += sm.tensor().at(i, j);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("cosine similarity of a vector with itself is one") {
  Tensor x = random_tensor(1, 9, 3);
  CHECK(cosine_similarity(Value::constant(x), Value::constant(x)).item() ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("matmul matches naive triple loop") {
  Tensor a = random_tensor(4, 3, 1), b = random_tensor(3, 2, 2);
  Value c = matmul(Value::constant(a), Value::constant(b));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < 3; ++k) s += a.at(i, k) * b.at(k, j);
      CHECK(std::abs(c.tensor().at(i, j) - s) < 1e-12);
    }
}

TEST_CASE("backward on linear and quadratic losses") {
  Value w = Value::param(random_tensor(3, 4, 7));
  backward(sum_all(w));
  for (double g : w.grad().data) CHECK(g == doctest::Approx(1.0));

  Value w2 = Value::param(random_tensor(2, 5, 8));
  backward(sum_all(mul(w2, w2)));
  for (std::size_t i = 0; i < w2.tensor().numel(); ++i)
    CHECK(w2.grad().data[i] == doctest::Approx(2.0 * w2.tensor().data[i]));
}

TEST_CASE("parameters off the loss path keep zero gradient") {
  ParamStore store(1);
  Value a = store.add_param("a", 2, 2, 2);
  Value b = store.add_param("b", 2, 2, 2);
  backward(sum_all(a));
  CHECK(b.grad().numel() == 0);  // untouched: grad never allocated
  (void)b;
}

TEST_CASE("every op passes grad_check on random inputs") {
  auto check = [](const char* name, const std::function<Value(const Value&)>& f,
                  const Tensor& pt) {
    double err = grad_check(f, pt, 1e-5);
    INFO(name);
    CHECK(err < 1e-4);
  };
  Tensor p34 = random_tensor(3, 4, 21);
  Tensor w = random_tensor(4, 3, 22);
  check("matmul", [&](const Value& x) { return sum_all(mul(matmul(x, Value::constant(w)), matmul(x, Value::constant(w)))); }, p34);
  check("transpose", [&](const Value& x) { return sum_all(mul(transpose(x), transpose(x))); }, p34);
  check("add_broadcast", [&](const Value& x) {
    Value row = Value::constant(random_tensor(1, 4, 23));
    return sum_all(mul(add(x, row), add(x, row)));
  }, p34);
  check("softmax", [&](const Value& x) {
    Value s = softmax_rows(x);
    return sum_all(mul(s, Value::constant(random_tensor(3, 4, 24))));
  }, p34);
  check("logsumexp", [&](const Value& x) { return sum_all(logsumexp_rows(x)); }, p34);
  check("tanh", [&](const Value& x) { return sum_all(mul(tanh_op(x), tanh_op(x))); }, p34);
  check("sigmoid", [&](const Value& x) { return sum_all(mul(sigmoid(x), sigmoid(x))); }, p34);
  check("l2_normalize", [&](const Value& x) {
    return sum_all(mul(l2_normalize_rows(x), Value::constant(random_tensor(3, 4, 25))));
  }, p34);
  check("cosine", [&](const Value& x) {
    Value a = slice(x, 0, 1, 0, 4), b = slice(x, 1, 2, 0, 4);
    return cosine_similarity(a, b);
  }, p34);
  check("concat_mean", [&](const Value& x) {
    Value m = mean_rows(concat_rows({x, scalar_mul(x, 2.0)}));
    return sum_all(mul(m, m));
  }, p34);
  check("slice", [&](const Value& x) {
    Value s = slice(x, 1, 3, 1, 4);
    return sum_all(mul(s, s));
  }, p34);
  check("exp_log", [&](const Value& x) {
    return sum_all(log_op(scalar_add(exp_op(x), 1.0)));
  }, p34);
}

TEST_CASE("grad_check tight bounds on simple functions") {
  Tensor pt = random_tensor(2, 3, 42);
  double err_sq = grad_check([](const Value& x) { return sum_all(mul(x, x)); }, pt, 1e-5);
  CHECK(err_sq < 1e-6);
  Tensor c = random_tensor(2, 3, 43);
  double err_lin = grad_check(
      [&](const Value& x) { return sum_all(mul(x, Value::constant(c))); }, pt, 1e-5);
  CHECK(err_lin < 1e-10);
}

TEST_CASE("sga_step arithmetic and fixed point") {
  ParamStore store(5);
  Value w = store.add_param_tensor("w", Tensor::scalar(1.0));
  OptimizerState opt;
  opt.learning_rate = 0.1;
  opt.sign = StepSign::kAscent;

  sga_step(store, opt);  // zero gradients: no change
  CHECK(w.tensor().item() == doctest::Approx(1.0));

  w.node()->ensure_grad();
  w.node()->grad.data[0] = 2.0;
  sga_step(store, opt);
  CHECK(w.tensor().item() == doctest::Approx(1.2));
  CHECK(w.grad().data[0] == 0.0);  // gradients zeroed by the step
}

TEST_CASE("ascent converges to the maximum of -(w-3)^2") {
  ParamStore store(5);
  Value w = store.add_param_tensor("w", Tensor::scalar(0.0));
  OptimizerState opt;
  opt.learning_rate = 0.1;
  opt.sign = StepSign::kAscent;
  for (int i = 0; i < 50; ++i) {
    Value diff = scalar_add(w, -3.0);
    Value loss = neg(mul(diff, diff));
    backward(loss);
    sga_step(store, opt);
  }
  CHECK(std::abs(w.tensor().item() - 3.0) < 1e-2);
}

TEST_CASE("identical seeds give bit-identical parameters") {
  ParamStore s1(99), s2(99);
  Value a = s1.add_param("p", 4, 4, 4);
  Value b = s2.add_param("p", 4, 4, 4);
  CHECK(a.tensor().data == b.tensor().data);
}

TEST_CASE("no-grad mode records no graph") {
  Value w = Value::param(random_tensor(2, 2, 6));
  Value y;
  {
    NoGradGuard guard;
    y = sum_all(mul(w, w));
  }
  CHECK_FALSE(y.requires_grad());
  backward(y);  // no-op
  CHECK(w.grad().numel() == 0);
}

TEST_CASE("shape errors are reported") {
  Value a = Value::constant(Tensor::zeros(2, 3));
  Value b = Value::constant(Tensor::zeros(2, 2));
  CHECK_THROWS_AS((void)matmul(a, b), ShapeError);
  CHECK_THROWS_AS((void)mul(a, b), ShapeError);
  CHECK_THROWS_AS((void)backward(a), GraphError);  // non-scalar loss
}

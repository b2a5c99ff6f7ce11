//
// Project kgmol - Copyright 2026 The kgmol Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "kgmol/errors.hpp"
#include "kgmol/nn/dense.hpp"
#include "kgmol/nn/gradcheck.hpp"
#include "kgmol/nn/param_store.hpp"
#include "kgmol/nn/tensor.hpp"
#include "kgmol/rng.hpp"
#include "test_util.hpp"

using namespace kgmol;
using nn::Tensor2;

namespace {

Tensor2 random_tensor(std::size_t r, std::size_t c, Rng &rng) {
  Tensor2 t(r, c);
  for (auto &x : t.data()) x = rng.uniform(-1.0, 1.0);
  return t;
}

// Triple-loop reference product.
Tensor2 naive_matmul(const Tensor2 &a, const Tensor2 &b) {
  Tensor2 out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j)
        out(i, j) += a(i, k) * b(k, j);
  return out;
}

Tensor2 transpose(const Tensor2 &a) {
  Tensor2 out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

void check_close(const Tensor2 &a, const Tensor2 &b, double tol = 1e-12) {
  REQUIRE(a.same_shape(b));
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a.data()[i] == doctest::Approx(b.data()[i]).epsilon(tol));
}

}  // namespace

TEST_SUITE("nncore") {

TEST_CASE("matmul family agrees with naive reference") {
  Rng rng(fnv1a("matmul"));
  for (auto [m, k, n] : {std::array<std::size_t, 3>{1, 1, 1},
                         {2, 3, 4},
                         {5, 7, 3},
                         {8, 8, 8}}) {
    auto a = random_tensor(m, k, rng);
    auto b = random_tensor(k, n, rng);
    check_close(nn::matmul(a, b), naive_matmul(a, b));

    auto bt = random_tensor(n, k, rng);
    check_close(nn::matmul_nt(a, bt), naive_matmul(a, transpose(bt)));

    auto at = random_tensor(k, m, rng);
    check_close(nn::matmul_tn(at, b), naive_matmul(transpose(at), b));
  }
  CHECK_THROWS_AS((void)nn::matmul(Tensor2(2, 3), Tensor2(2, 3)),
                  InternalError);
  CHECK_THROWS_AS((void)nn::matmul_nt(Tensor2(2, 3), Tensor2(2, 4)),
                  InternalError);
}

TEST_CASE("tensor helpers") {
  Tensor2 a(2, 2), b(2, 2);
  a.fill(1.0);
  b.fill(2.0);
  nn::add_inplace(a, b);
  CHECK(a(1, 1) == 3.0);
  nn::axpy_inplace(a, -0.5, b);
  CHECK(a(0, 0) == 2.0);
  CHECK_THROWS_AS(nn::add_inplace(a, Tensor2(1, 2)), InternalError);

  CHECK(nn::dot({1.0, 2.0}, {3.0, -1.0}) == doctest::Approx(1.0));
  CHECK(nn::l2_norm({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK_THROWS_AS((void)nn::dot({1.0}, {1.0, 2.0}), InternalError);

  CHECK_THROWS_AS((void)Tensor2(2, 2, {1.0, 2.0, 3.0}), InternalError);
}

TEST_CASE("check_finite names the producing operation") {
  Tensor2 t(1, 2);
  t(0, 1) = std::nan("");
  try {
    nn::check_finite(t, "unit-test-op");
    FAIL("expected InternalError");
  } catch (const InternalError &e) {
    CHECK(std::string(e.what()).find("unit-test-op") != std::string::npos);
  }
  CHECK_NOTHROW(nn::check_finite(std::vector<double>{0.0, 1.0}, "ok"));
}

TEST_CASE("xavier_uniform deterministic and bounded") {
  Rng r1(7), r2(7), r3(8);
  auto a = nn::xavier_uniform(6, 9, r1);
  auto b = nn::xavier_uniform(6, 9, r2);
  auto c = nn::xavier_uniform(6, 9, r3);
  CHECK(a.data() == b.data());
  CHECK(a.data() != c.data());
  const double bound = std::sqrt(6.0 / (6 + 9));
  for (double x : a.data()) CHECK(std::abs(x) <= bound);
}

TEST_CASE("activations and derivatives consistent") {
  const double eps = 1e-6;
  for (auto act : {nn::Activation::Identity, nn::Activation::Relu,
                   nn::Activation::LeakyRelu, nn::Activation::Tanh}) {
    for (double z : {-1.3, -0.4, 0.2, 0.9}) {
      double fd = (nn::apply_activation(act, z + eps) -
                   nn::apply_activation(act, z - eps)) /
                  (2 * eps);
      CHECK(nn::activation_derivative(act, z) == doctest::Approx(fd));
    }
  }
  CHECK(nn::apply_activation(nn::Activation::LeakyRelu, -2.0, 0.2) ==
        doctest::Approx(-0.4));
}

TEST_CASE("dense layer gradients pass finite differences") {
  Rng rng(fnv1a("dense"));
  for (auto act : {nn::Activation::Identity, nn::Activation::Relu,
                   nn::Activation::LeakyRelu, nn::Activation::Tanh}) {
    auto x = random_tensor(3, 4, rng);
    nn::ParamStore store;
    store.add("W", random_tensor(4, 5, rng));
    store.add("b", random_tensor(1, 5, rng));

    auto forward = [&](nn::ParamStore &s) {
      auto y = nn::dense_forward(x, s.value("W"), s.value("b").data(), act);
      double total = 0.0;
      for (double v : y.data()) total += v;
      return total;
    };

    nn::DenseCache cache;
    auto y = nn::dense_forward(x, store.value("W"), store.value("b").data(),
                               act, &cache);
    Tensor2 dy(y.rows(), y.cols());
    dy.fill(1.0);
    auto grads = nn::dense_backward(cache, store.value("W"), dy);
    store.grad("W") = grads.dw;
    for (std::size_t j = 0; j < grads.db.size(); ++j)
      store.grad("b")(0, j) = grads.db[j];

    auto report = nn::finite_diff_gradcheck(forward, store, 1e-5, 1e-6, rng);
    CAPTURE(report.to_text());
    CHECK(report.passed);
  }
}

TEST_CASE("adam_step matches a reference implementation") {
  nn::ParamStore store;
  store.add("w", Tensor2(1, 3, {0.5, -0.2, 1.0}));
  nn::AdamConfig cfg;  // defaults: lr 1e-3, beta 0.9/0.999, eps 1e-8

  // Reference state mirrored outside the store.
  std::vector<double> w = {0.5, -0.2, 1.0}, m(3, 0.0), v(3, 0.0);
  std::vector<std::vector<double>> grads = {
      {0.1, -0.3, 0.2}, {-0.05, 0.2, 0.0}, {0.4, 0.4, -0.4}};

  for (std::size_t t = 0; t < grads.size(); ++t) {
    store.zero_grad();
    for (int j = 0; j < 3; ++j) store.grad("w")(0, j) = grads[t][j];
    nn::adam_step(store, cfg);

    for (int j = 0; j < 3; ++j) {
      m[j] = cfg.beta1 * m[j] + (1 - cfg.beta1) * grads[t][j];
      v[j] = cfg.beta2 * v[j] + (1 - cfg.beta2) * grads[t][j] * grads[t][j];
      double mh = m[j] / (1 - std::pow(cfg.beta1, double(t + 1)));
      double vh = v[j] / (1 - std::pow(cfg.beta2, double(t + 1)));
      w[j] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
    for (int j = 0; j < 3; ++j)
      CHECK(store.value("w")(0, j) == doctest::Approx(w[j]).epsilon(1e-14));
  }
  CHECK(store.step_count() == 3);
}

TEST_CASE("param store bookkeeping") {
  nn::ParamStore store;
  store.add("a", Tensor2(2, 3));
  store.add("b", Tensor2(1, 4));
  CHECK(store.num_scalars() == 10);
  CHECK(store.has("a"));
  CHECK_FALSE(store.has("c"));
  CHECK_THROWS_AS(store.add("a", Tensor2(1, 1)), InternalError);
  CHECK_THROWS_AS((void)store.entry("missing"), InternalError);

  store.grad("a").fill(2.0);
  store.zero_grad();
  for (double g : store.grad("a").data()) CHECK(g == 0.0);
}

TEST_CASE("checksum tracks values") {
  nn::ParamStore a, b;
  a.add("w", Tensor2(1, 2, {0.25, -1.5}));
  b.add("w", Tensor2(1, 2, {0.25, -1.5}));
  CHECK(nn::checksum(a) == nn::checksum(b));
  b.value("w")(0, 0) += 1e-12;
  CHECK(nn::checksum(a) != nn::checksum(b));
}

TEST_CASE("checkpoint roundtrip is exact") {
  Rng rng(fnv1a("ckpt"));
  nn::ParamStore store;
  store.add("layer/W", random_tensor(3, 4, rng));
  store.add("layer/b", random_tensor(1, 4, rng));

  auto dir = test::scratch_dir();
  auto path = (dir / "model.json").string();
  nn::save_checkpoint(store, path, {{"mode", "element_kg"}, {"note", "x"}});

  std::map<std::string, std::string> meta;
  auto loaded = nn::load_checkpoint(path, &meta);
  CHECK(meta.at("mode") == "element_kg");
  CHECK(meta.at("note") == "x");
  CHECK(loaded.step_count() == 0);  // optimizer state is not serialized
  CHECK(nn::checksum(loaded) == nn::checksum(store));
  for (const auto &[name, e] : store.entries())
    CHECK(loaded.value(name).data() == e.value.data());  // bitwise

  SUBCASE("malformed file") {
    auto bad = (dir / "bad.json").string();
    std::ofstream(bad) << "{not json";
    CHECK_THROWS_AS((void)nn::load_checkpoint(bad), InputError);
  }
  SUBCASE("unsupported version") {
    auto bad = (dir / "ver.json").string();
    std::ofstream(bad) << R"({"version": 9, "params": {}})";
    CHECK_THROWS_AS((void)nn::load_checkpoint(bad), InputError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("finite_diff_gradcheck detects wrong gradients") {
  nn::ParamStore store;
  store.add("v", Tensor2(1, 4, {0.3, -0.7, 1.1, 0.2}));
  auto f = [](nn::ParamStore &s) {
    double total = 0.0;
    for (double x : s.value("v").data()) total += x * x;
    return total;
  };

  Rng rng(fnv1a("gradcheck"));
  for (int j = 0; j < 4; ++j)
    store.grad("v")(0, j) = 2.0 * store.value("v")(0, j);
  auto good = nn::finite_diff_gradcheck(f, store, 1e-5, 1e-6, rng);
  CHECK(good.passed);
  CHECK(good.coords_checked == 4);

  store.grad("v")(0, 2) += 0.5;  // corrupt one coordinate
  auto bad = nn::finite_diff_gradcheck(f, store, 1e-5, 1e-6, rng);
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst_param == "v");
  CHECK(bad.worst_index == 2);
}

}  // TEST_SUITE

// tests/test_conditioning.cpp
//
// Copyright 2026  The SATForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "satforge/cond/conditioner.hpp"
#include "satforge/cond/spec.hpp"
#include "satforge/nn/grad_check.hpp"
#include "satforge/rng.hpp"

using namespace satforge;

namespace {

cond::Conditioner make_conditioner(const cond::ConditioningSpec& spec, std::size_t embed_dim,
                                   std::vector<std::size_t> sites,
                                   std::vector<std::size_t> site_dims, std::uint64_t seed = 5) {
  Rng rng(seed);
  return cond::Conditioner(spec, embed_dim, sites, site_dims, rng);
}

Matrix fill(std::initializer_list<std::initializer_list<float>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (float v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  Rng rng(seed);
  for (float& v : m.data) v = static_cast<float>(rng.gaussian());
  return m;
}

}  // namespace

TEST_CASE("control layer: zero weights with linear activation shift by nothing") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlLayer;
  spec.activation = nn::Activation::kLinear;
  spec.mode = cond::ApplyMode::kShift;
  cond::Conditioner c = make_conditioner(spec, 3, {0}, {2});
  c.site_params(0).weight.fill(0.0f);
  std::fill(c.site_params(0).bias.begin(), c.site_params(0).bias.end(), 0.0f);
  Matrix x = fill({{1.0f, -2.0f}});
  c.set_batch(fill({{0.3f, 0.7f, -0.1f}}));
  Matrix y = c.forward(0, x);
  CHECK(y(0, 0) == doctest::Approx(1.0));
  CHECK(y(0, 1) == doctest::Approx(-2.0));
}

TEST_CASE("control layer: scalar tanh shift matches hand computation") {
  // tanh(0.5) added to a single input of 1.0 gives 1.46211716.
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlLayer;
  spec.activation = nn::Activation::kTanh;
  spec.mode = cond::ApplyMode::kShift;
  cond::Conditioner c = make_conditioner(spec, 1, {0}, {1});
  c.site_params(0).weight(0, 0) = 0.5f;
  c.site_params(0).bias[0] = 0.0f;
  c.set_batch(fill({{1.0f}}));
  Matrix y = c.forward(0, fill({{1.0f}}));
  CHECK(y(0, 0) == doctest::Approx(1.4621171573).epsilon(1e-6));
}

TEST_CASE("control layer: sigmoid scale at zero pre-activation halves the input") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlLayer;
  spec.activation = nn::Activation::kSigmoid;
  spec.mode = cond::ApplyMode::kScale;
  cond::Conditioner c = make_conditioner(spec, 2, {0}, {2});
  c.site_params(0).weight.fill(0.0f);
  std::fill(c.site_params(0).bias.begin(), c.site_params(0).bias.end(), 0.0f);
  c.set_batch(fill({{0.4f, -0.9f}}));
  Matrix y = c.forward(0, fill({{2.0f, -4.0f}}));
  CHECK(y(0, 0) == doctest::Approx(1.0));
  CHECK(y(0, 1) == doctest::Approx(-2.0));
}

TEST_CASE("control vector: zero gate weights shift by half the embedding") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlVector;
  cond::Conditioner c = make_conditioner(spec, 2, {0}, {2});
  std::fill(c.site_params(0).bias.begin(), c.site_params(0).bias.end(), 0.0f);
  c.set_batch(fill({{2.0f, 4.0f}}));
  Matrix y = c.forward(0, fill({{1.0f, 1.0f}}));
  CHECK(y(0, 0) == doctest::Approx(2.0));
  CHECK(y(0, 1) == doctest::Approx(3.0));
}

TEST_CASE("control vector: strongly negative gates converge to identity") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlVector;
  cond::Conditioner c = make_conditioner(spec, 2, {0}, {2});
  std::fill(c.site_params(0).bias.begin(), c.site_params(0).bias.end(), -50.0f);
  c.set_batch(fill({{2.0f, 4.0f}}));
  Matrix y = c.forward(0, fill({{1.0f, 1.0f}}));
  CHECK(y(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(y(0, 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("control vector: saturated gates add the whole embedding") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlVector;
  cond::Conditioner c = make_conditioner(spec, 2, {0}, {2});
  std::fill(c.site_params(0).bias.begin(), c.site_params(0).bias.end(), 50.0f);
  c.set_batch(fill({{2.0f, 4.0f}}));
  Matrix y = c.forward(0, fill({{1.0f, 1.0f}}));
  CHECK(y(0, 0) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(y(0, 1) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("control variable: zero weight is the identity, one adds the embedding") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlVariable;
  cond::Conditioner c = make_conditioner(spec, 2, {0}, {2});
  c.set_batch(fill({{3.0f, 4.0f}}));
  Matrix x = fill({{1.0f, 2.0f}});
  Matrix y0 = c.forward(0, x);
  CHECK(y0(0, 0) == doctest::Approx(1.0));
  CHECK(y0(0, 1) == doctest::Approx(2.0));
  c.site_params(0).bias[0] = 1.0f;
  c.set_batch(fill({{3.0f, 4.0f}}));
  Matrix y1 = c.forward(0, x);
  CHECK(y1(0, 0) == doctest::Approx(4.0));
  CHECK(y1(0, 1) == doctest::Approx(6.0));
}

TEST_CASE("control variable: weight gradient is the embedding-weighted output gradient") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlVariable;
  cond::Conditioner c = make_conditioner(spec, 2, {0}, {2});
  c.site_params(0).bias[0] = 0.37f;
  Matrix e = random_matrix(5, 2, 303);
  Matrix dy = random_matrix(5, 2, 307);
  c.set_batch(e);
  c.forward(0, random_matrix(5, 2, 311));
  c.zero_grads();
  c.backward(0, dy);
  double expected = 0.0;
  for (std::size_t i = 0; i < dy.data.size(); ++i)
    expected += static_cast<double>(dy.data[i]) * e.data[i];
  CHECK(c.grad_views()[0].data[0] == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("constant scale: adds c times the embedding and has zero parameters") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kConstantScale;
  spec.constant_scale = 0.1f;
  cond::Conditioner c = make_conditioner(spec, 2, {0}, {2});
  c.set_batch(fill({{10.0f, 20.0f}}));
  Matrix y = c.forward(0, fill({{1.0f, 2.0f}}));
  CHECK(y(0, 0) == doctest::Approx(2.0));
  CHECK(y(0, 1) == doctest::Approx(4.0));
  CHECK(c.num_trainable_params() == 0);

  spec.constant_scale = 0.0f;
  cond::Conditioner czero = make_conditioner(spec, 2, {0}, {2});
  czero.set_batch(fill({{10.0f, 20.0f}}));
  Matrix y0 = czero.forward(0, fill({{1.0f, 2.0f}}));
  CHECK(y0(0, 0) == doctest::Approx(1.0));
  CHECK(y0(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("concatenate: widths add and per-frame embeddings vary per row") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kConcatenate;
  cond::Conditioner c = make_conditioner(spec, 3, {0}, {2});
  Matrix e = fill({{0.1f, 0.2f, 0.3f}, {0.4f, 0.5f, 0.6f}});
  c.set_batch(e);
  Matrix y = c.forward(0, fill({{1.0f, 2.0f}, {3.0f, 4.0f}}));
  CHECK(y.cols == 5);
  CHECK(y(0, 2) == doctest::Approx(0.1));
  CHECK(y(1, 4) == doctest::Approx(0.6));
  CHECK(y(0, 4) != y(1, 4));
}

TEST_CASE("concatenate: hidden sites are rejected") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kConcatenate;
  spec.site = cond::SiteSelection::kAllHidden;
  CHECK_THROWS_AS(cond::resolve_sites(spec, 4), std::invalid_argument);
  spec.site = cond::SiteSelection::kLayerSet;
  spec.layer_set = {1};
  CHECK_THROWS_AS(cond::resolve_sites(spec, 4), std::invalid_argument);
}

TEST_CASE("control network: forced unit gate and zero bias is identity without skip") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlNetwork;
  spec.shared_units = 4;
  spec.use_skip = false;
  cond::Conditioner c = make_conditioner(spec, 3, {0}, {2});
  c.site_params(0).scale_w.fill(0.0f);
  c.site_params(0).bias_w.fill(0.0f);
  std::fill(c.site_params(0).scale_b.begin(), c.site_params(0).scale_b.end(), 100.0f);
  std::fill(c.site_params(0).bias_b.begin(), c.site_params(0).bias_b.end(), 0.0f);
  c.set_batch(random_matrix(3, 3, 313));
  Matrix x = random_matrix(3, 2, 317);
  Matrix y = c.forward(0, x);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    CHECK(y.data[i] == doctest::Approx(x.data[i]).epsilon(1e-6));
}

TEST_CASE("control network: skip adds the gated adaptation") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlNetwork;
  spec.shared_units = 4;
  spec.use_skip = true;
  cond::Conditioner c = make_conditioner(spec, 3, {0}, {1});
  c.site_params(0).scale_w.fill(0.0f);
  c.site_params(0).bias_w.fill(0.0f);
  // gate s = 0.5 and bias output 0.25: h = 2 + (2 * 0.5 + 0.25)
  c.site_params(0).scale_b[0] = 0.0f;
  c.site_params(0).bias_b[0] = static_cast<float>(std::atanh(0.25));
  c.set_batch(fill({{1.0f, 0.0f, 0.0f}}));
  Matrix y = c.forward(0, fill({{2.0f}}));
  CHECK(y(0, 0) == doctest::Approx(3.25).epsilon(1e-6));
}

TEST_CASE("parameter counts: hand-checked cases") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlVariable;
  CHECK(cond::count_conditioning_params(spec, 10, {20}) == 1);
  spec.mechanism = cond::Mechanism::kConstantScale;
  CHECK(cond::count_conditioning_params(spec, 10, {20}) == 0);
  spec.mechanism = cond::Mechanism::kControlLayer;
  CHECK(cond::count_conditioning_params(spec, 10, {20}) == 10 * 20 + 20);
  spec.mechanism = cond::Mechanism::kControlVector;
  CHECK(cond::count_conditioning_params(spec, 20, {20}) == 20);
  spec.mechanism = cond::Mechanism::kControlNetwork;
  spec.shared_units = 100;
  CHECK(cond::count_conditioning_params(spec, 10, {20}) ==
        10 * 100 + 100 + 100 * 100 + 100 + 2 * (100 * 20 + 20));
}

TEST_CASE("parameter counts match the instantiated conditioners") {
  for (auto mech : {cond::Mechanism::kControlNetwork, cond::Mechanism::kControlLayer,
                    cond::Mechanism::kControlVector, cond::Mechanism::kControlVariable,
                    cond::Mechanism::kConstantScale}) {
    cond::ConditioningSpec spec;
    spec.mechanism = mech;
    spec.shared_units = 12;
    const std::size_t embed = 6, site = 6;
    cond::Conditioner c = make_conditioner(spec, embed, {0, 2}, {site, site});
    CHECK(c.num_trainable_params() ==
          cond::count_conditioning_params(spec, embed, {site, site}));
  }
}

TEST_CASE("parameter ladder: strict ordering for matching dims") {
  Rng rng(400);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = static_cast<std::size_t>(rng.uniform_int(2, 64));
    const std::size_t u = static_cast<std::size_t>(rng.uniform_int(d, 128));
    cond::ConditioningSpec spec;
    spec.shared_units = u;
    std::vector<std::size_t> dims = {d};
    spec.mechanism = cond::Mechanism::kControlNetwork;
    const std::size_t network = cond::count_conditioning_params(spec, d, dims);
    spec.mechanism = cond::Mechanism::kControlLayer;
    const std::size_t layer = cond::count_conditioning_params(spec, d, dims);
    spec.mechanism = cond::Mechanism::kControlVector;
    const std::size_t vector_count = cond::count_conditioning_params(spec, d, dims);
    spec.mechanism = cond::Mechanism::kControlVariable;
    const std::size_t variable = cond::count_conditioning_params(spec, d, dims);
    spec.mechanism = cond::Mechanism::kConstantScale;
    const std::size_t constant = cond::count_conditioning_params(spec, d, dims);
    CHECK(network > layer);
    CHECK(layer > vector_count);
    CHECK(vector_count == d);
    CHECK(vector_count > variable);
    CHECK(variable == 1);
    CHECK(variable > constant);
    CHECK(constant == 0);
  }
}

TEST_CASE("utterance-level broadcast: permuting frames permutes outputs identically") {
  for (auto mech : {cond::Mechanism::kControlNetwork, cond::Mechanism::kControlLayer,
                    cond::Mechanism::kControlVector, cond::Mechanism::kControlVariable,
                    cond::Mechanism::kConstantScale, cond::Mechanism::kConcatenate}) {
    cond::ConditioningSpec spec;
    spec.mechanism = mech;
    spec.shared_units = 6;
    cond::Conditioner c = make_conditioner(spec, 4, {0}, {4}, 500 + static_cast<int>(mech));
    const std::size_t t = 7;
    Matrix x = random_matrix(t, 4, 601);
    Matrix e(t, 4);
    Rng er(607);
    std::vector<float> ev(4);
    for (float& v : ev) v = static_cast<float>(er.gaussian());
    for (std::size_t i = 0; i < t; ++i) std::copy(ev.begin(), ev.end(), e.row_ptr(i));
    c.set_batch(e);
    Matrix y = c.forward(0, x);

    Matrix xr(t, 4);
    for (std::size_t i = 0; i < t; ++i)
      std::copy(x.row_ptr(t - 1 - i), x.row_ptr(t - 1 - i) + 4, xr.row_ptr(i));
    c.set_batch(e);
    Matrix yr = c.forward(0, xr);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < y.cols; ++j) CHECK(yr(i, j) == y(t - 1 - i, j));
  }
}

TEST_CASE("grad check: every mechanism at input and hidden sites") {
  const std::size_t feat = 8, hidden = 16, classes = 5, batch = 6;
  for (auto mech : {cond::Mechanism::kControlNetwork, cond::Mechanism::kControlLayer,
                    cond::Mechanism::kControlVector, cond::Mechanism::kControlVariable,
                    cond::Mechanism::kConstantScale, cond::Mechanism::kConcatenate}) {
    for (bool hidden_site : {false, true}) {
      if (mech == cond::Mechanism::kConcatenate && hidden_site) continue;
      cond::ConditioningSpec spec;
      spec.mechanism = mech;
      spec.shared_units = 10;
      spec.mode = cond::ApplyMode::kShift;
      // A linear shift bias is a uniform column offset that the next batch
      // norm cancels exactly; tanh keeps every parameter live here, and the
      // linear case is checked on a norm-free model below.
      spec.activation = nn::Activation::kTanh;
      spec.site = hidden_site ? cond::SiteSelection::kAllHidden : cond::SiteSelection::kInputOnly;
      const std::size_t site_dim = hidden_site ? hidden : feat;
      const bool dim_locked = mech == cond::Mechanism::kControlVector ||
                              mech == cond::Mechanism::kControlVariable ||
                              mech == cond::Mechanism::kConstantScale;
      const std::size_t embed = dim_locked ? site_dim : 5;

      nn::MlpConfig mcfg;
      mcfg.input_dim = feat + (mech == cond::Mechanism::kConcatenate ? embed : 0);
      mcfg.hidden_dims = {hidden, hidden, hidden};
      mcfg.num_classes = classes;
      mcfg.hidden_activation = nn::Activation::kTanh;  // smooth: kink-free differences
      mcfg.use_batchnorm = true;
      Rng mrng(700 + static_cast<int>(mech));
      nn::MLP mlp(mcfg, mrng);

      const auto sites = cond::resolve_sites(spec, mlp.num_layers());
      const auto site_dims = cond::site_dims_for(sites, feat, mcfg.hidden_dims);
      Rng crng(800 + static_cast<int>(mech));
      cond::Conditioner cnd(spec, embed, sites, site_dims, crng);
      // Jitter the parameters off the near-identity start so the check sees
      // a generic operating point.
      Rng pr(900 + static_cast<int>(mech));
      for (auto& view : cnd.param_views())
        for (std::size_t i = 0; i < view.size; ++i)
          view.data[i] += static_cast<float>(0.2 * pr.gaussian());

      Matrix x = random_matrix(batch, feat, 1000 + static_cast<int>(mech));
      Matrix e = random_matrix(batch, embed, 1100 + static_cast<int>(mech));
      std::vector<int> labels(batch);
      Rng lr(1200);
      for (int& l : labels) l = static_cast<int>(lr.uniform_int(0, classes - 1));

      auto result = nn::grad_check(mlp, &cnd, x, &e, labels, 1e-4);
      INFO(cond::mechanism_name(mech), hidden_site ? " hidden" : " input", " worst ",
           result.worst_param);
      CHECK(result.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("grad check: control layer scale mode and skipless control network") {
  const std::size_t feat = 8, classes = 4, batch = 6;
  for (int variant = 0; variant < 2; ++variant) {
    cond::ConditioningSpec spec;
    if (variant == 0) {
      spec.mechanism = cond::Mechanism::kControlLayer;
      spec.mode = cond::ApplyMode::kScale;
      spec.activation = nn::Activation::kSigmoid;
    } else {
      spec.mechanism = cond::Mechanism::kControlNetwork;
      spec.shared_units = 10;
      spec.use_skip = false;
    }
    nn::MlpConfig mcfg;
    mcfg.input_dim = feat;
    mcfg.hidden_dims = {12, 12};
    mcfg.num_classes = classes;
    mcfg.hidden_activation = nn::Activation::kTanh;
    Rng mrng(1300 + variant);
    nn::MLP mlp(mcfg, mrng);
    const auto sites = cond::resolve_sites(spec, mlp.num_layers());
    const auto site_dims = cond::site_dims_for(sites, feat, mcfg.hidden_dims);
    Rng crng(1400 + variant);
    cond::Conditioner cnd(spec, 5, sites, site_dims, crng);
    Rng pr(1500 + variant);
    for (auto& view : cnd.param_views())
      for (std::size_t i = 0; i < view.size; ++i)
        view.data[i] += static_cast<float>(0.3 * pr.gaussian());
    Matrix x = random_matrix(batch, feat, 1600 + variant);
    Matrix e = random_matrix(batch, 5, 1700 + variant);
    std::vector<int> labels(batch);
    Rng lr(1800);
    for (int& l : labels) l = static_cast<int>(lr.uniform_int(0, classes - 1));
    auto result = nn::grad_check(mlp, &cnd, x, &e, labels, 1e-4);
    CHECK(result.max_rel_error < 1e-4);
  }
}

TEST_CASE("grad check: linear control-layer shift on a norm-free model") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlLayer;
  spec.mode = cond::ApplyMode::kShift;
  spec.activation = nn::Activation::kLinear;
  nn::MlpConfig mcfg;
  mcfg.input_dim = 8;
  mcfg.hidden_dims = {12, 12};
  mcfg.num_classes = 4;
  mcfg.hidden_activation = nn::Activation::kTanh;
  mcfg.use_batchnorm = false;
  Rng mrng(1900);
  nn::MLP mlp(mcfg, mrng);
  const auto sites = cond::resolve_sites(spec, mlp.num_layers());
  const auto site_dims = cond::site_dims_for(sites, 8, mcfg.hidden_dims);
  Rng crng(1901);
  cond::Conditioner cnd(spec, 5, sites, site_dims, crng);
  Matrix x = random_matrix(6, 8, 1902);
  Matrix e = random_matrix(6, 5, 1903);
  std::vector<int> labels(6);
  Rng lr(1904);
  for (int& l : labels) l = static_cast<int>(lr.uniform_int(0, 3));
  auto result = nn::grad_check(mlp, &cnd, x, &e, labels, 1e-4);
  INFO("worst ", result.worst_param);
  CHECK(result.max_rel_error < 1e-4);
}

TEST_CASE("mismatched embedding width is rejected") {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::Mechanism::kControlVector;
  CHECK_THROWS_AS(make_conditioner(spec, 3, {0}, {2}), std::invalid_argument);
  spec.mechanism = cond::Mechanism::kControlLayer;
  cond::Conditioner c = make_conditioner(spec, 3, {0}, {2});
  CHECK_THROWS_AS(c.set_batch(Matrix(1, 4)), std::invalid_argument);
}

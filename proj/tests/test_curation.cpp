// Copyright 2026 The curmi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "curmi/curation.hpp"
#include "curmi/rng.hpp"
#include "curmi/synthetic.hpp"
#include "oracles.hpp"

using namespace curmi;

namespace {

EmbeddingMatrix embed(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixF m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = static_cast<float>(v);
    ++i;
  }
  return EmbeddingMatrix::validated(std::move(m));
}

GradientMatrix grads(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixF m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = static_cast<float>(v);
    ++i;
  }
  return GradientMatrix::with_unit_q(std::move(m));
}

}  // namespace

TEST_CASE("image_scores basic geometry") {
  SUBCASE("identical row scores 1") {
    const EmbeddingMatrix pool = embed({{1.0, 0.0}});
    const EmbeddingMatrix targets = embed({{1.0, 0.0}});
    const VectorD s = image_scores(pool, targets);
    CHECK(std::abs(s[0] - 1.0) < 1e-9);
  }
  SUBCASE("orthogonal target scores 0") {
    const EmbeddingMatrix pool = embed({{1.0, 0.0}});
    const EmbeddingMatrix targets = embed({{0.0, 1.0}});
    const VectorD s = image_scores(pool, targets);
    CHECK(std::abs(s[0]) < 1e-9);
  }
  SUBCASE("hand-computed max per row") {
    const EmbeddingMatrix pool = embed({{1.0, 0.0}, {0.6, 0.8}});
    const EmbeddingMatrix targets = embed({{0.0, 1.0}, {1.0, 0.0}});
    const VectorD s = image_scores(pool, targets);
    CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s[1] == doctest::Approx(0.8).epsilon(1e-7));
  }
}

TEST_CASE("image_scores validates inputs") {
  const EmbeddingMatrix pool = embed({{1.0, 0.0}});
  MatrixF bad(1, 3);
  bad << 1.0f, 0.0f, 0.0f;
  EmbeddingMatrix other = EmbeddingMatrix::validated(std::move(bad));
  CHECK_THROWS_AS(image_scores(pool, other), ParameterError);
}

TEST_CASE("image score monotone in the target set") {
  const EmbeddingMatrix pool = generate_embeddings(5, 50, 8, 3, 0.4);
  const EmbeddingMatrix targets = generate_embeddings(6, 12, 8, 3, 0.4);
  const Curator curator = Curator::image(pool, targets, 5);

  const std::vector<int> small = {1, 4, 7};
  const std::vector<int> big = {1, 2, 4, 7, 9};
  const VectorD s_small = curator.scores(small);
  const VectorD s_big = curator.scores(big);
  for (Index i = 0; i < s_small.size(); ++i) {
    CHECK(s_big[i] >= s_small[i]);
  }
}

TEST_CASE("trak_features identity fixtures") {
  SUBCASE("identity gram") {
    const GradientMatrix x = grads({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const TrakSystem sys = trak_features(x, 1e-9);
    CHECK((sys.phi - MatrixD::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("scaled identity") {
    const GradientMatrix x = grads({{2, 0}, {0, 2}});
    const TrakSystem sys = trak_features(x, 1e-9);
    // (4I)^-1 * 2I = 0.5I
    CHECK((sys.phi - 0.5 * MatrixD::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("trak_features inverse residual") {
  const GradientMatrix x = generate_gradients(17, 50, 16);
  const double lambda = 1.0;
  const TrakSystem sys = trak_features(x, lambda);

  MatrixD gram = x.data.cast<double>().transpose() * x.data.cast<double>();
  gram.diagonal().array() += lambda;
  const MatrixD residual = sys.g_inv * gram - MatrixD::Identity(16, 16);
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("trak_features rejects bad input") {
  const GradientMatrix x = generate_gradients(4, 4, 4);
  CHECK_THROWS_AS(trak_features(x, 0.0), ParameterError);

  GradientMatrix nan_x = x;
  nan_x.data(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(trak_features(nan_x, 1.0), Error);
}

TEST_CASE("trak_scores identity fixtures") {
  const GradientMatrix x = grads({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const TrakSystem sys = trak_features(x, 1e-9);

  SUBCASE("single target") {
    const GradientMatrix y = grads({{1, 2, 3}});
    const std::vector<int> sel = {0};
    const VectorD s = trak_scores(sys, y, sel);
    CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s[1] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(s[2] == doctest::Approx(3.0).epsilon(1e-6));
  }
  SUBCASE("two-target mean") {
    const GradientMatrix x2 = grads({{1, 0}, {0, 1}});
    const TrakSystem sys2 = trak_features(x2, 1e-9);
    const GradientMatrix y = grads({{2, 0}, {0, 2}});
    const std::vector<int> sel = {0, 1};
    const VectorD s = trak_scores(sys2, y, sel);
    CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("doubling q doubles scores") {
    GradientMatrix x2 = grads({{1, 0}, {0, 1}});
    const GradientMatrix y = grads({{1, 1}});
    const std::vector<int> sel = {0};
    const TrakSystem a = trak_features(x2, 1e-9);
    x2.q *= 2.0;
    const TrakSystem b = trak_features(x2, 1e-9);
    const VectorD sa = trak_scores(a, y, sel);
    const VectorD sb = trak_scores(b, y, sel);
    CHECK((sb - 2.0 * sa).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("empty selection rejected") {
    const GradientMatrix y = grads({{1, 2, 3}});
    const std::vector<int> none;
    CHECK_THROWS_AS(trak_scores(sys, y, none), ParameterError);
  }
}

TEST_CASE("trak linearity over disjoint selections") {
  const GradientMatrix x = generate_gradients(30, 40, 8);
  const TrakSystem sys = trak_features(x, 0.5);
  const GradientMatrix y = generate_gradients(31, 10, 8);

  const std::vector<int> a = {0, 2, 5};
  const std::vector<int> b = {1, 7, 8, 9};
  std::vector<int> ab = {0, 1, 2, 5, 7, 8, 9};

  const VectorD sa = trak_scores(sys, y, a);
  const VectorD sb = trak_scores(sys, y, b);
  const VectorD sab = trak_scores(sys, y, ab);
  const VectorD lhs = sab * static_cast<double>(ab.size());
  const VectorD rhs = sa * static_cast<double>(a.size()) + sb * static_cast<double>(b.size());
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("top_k_select") {
  SUBCASE("tie-break by lower index") {
    VectorD s(3);
    s << 0.5, 0.5, 0.1;
    const auto mask = top_k_select(s, 1);
    CHECK(mask == std::vector<std::uint8_t>{1, 0, 0});
  }
  SUBCASE("k = N selects everything") {
    VectorD s(4);
    s << 0.1, 0.2, 0.3, 0.4;
    const auto mask = top_k_select(s, 4);
    CHECK(mask == std::vector<std::uint8_t>{1, 1, 1, 1});
  }
  SUBCASE("matches full-sort oracle on random input with ties") {
    Rng rng(5);
    VectorD s(100);
    for (Index i = 0; i < 100; ++i) s[i] = std::floor(rng.uniform() * 20) / 20.0;
    CHECK(top_k_select(s, 10) == oracles::topk_full_sort(s, 10));
  }
  SUBCASE("k out of range") {
    VectorD s(3);
    s << 1, 2, 3;
    CHECK_THROWS_AS(top_k_select(s, 0), ParameterError);
    CHECK_THROWS_AS(top_k_select(s, 4), ParameterError);
  }
}

TEST_CASE("top_k_select invariant under sub-threshold append") {
  Rng rng(6);
  VectorD s(50);
  for (Index i = 0; i < 50; ++i) s[i] = rng.uniform();
  const auto base = top_k_select(s, 7);

  VectorD s2(51);
  s2.head(50) = s;
  double kth = 1.0;
  for (Index i = 0; i < 50; ++i) {
    if (base[static_cast<std::size_t>(i)]) kth = std::min(kth, s[i]);
  }
  s2[50] = kth - 0.01;
  const auto extended = top_k_select(s2, 7);
  for (Index i = 0; i < 50; ++i) {
    CHECK(extended[static_cast<std::size_t>(i)] == base[static_cast<std::size_t>(i)]);
  }
  CHECK(extended[50] == 0);
}

TEST_CASE("curate composes scorer and selection") {
  SUBCASE("image self-similarity dominates") {
    // Targets are pool rows 0..2; every other pool row is further away.
    const EmbeddingMatrix pool = generate_embeddings(21, 30, 16, 5, 0.3);
    MatrixF tgt = pool.data.topRows(3);
    EmbeddingMatrix targets;
    targets.data = tgt;
    targets.row_norm = true;

    const Curator curator = Curator::image(pool, targets, 3);
    const std::vector<int> all = {0, 1, 2};
    const CurationResult res = curator.run(all);
    CHECK(res.mask[0] == 1);
    CHECK(res.mask[1] == 1);
    CHECK(res.mask[2] == 1);
  }
  SUBCASE("trak identity argmax") {
    const GradientMatrix x = grads({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const TrakSystem sys = trak_features(x, 1e-9);
    const GradientMatrix y = grads({{1, 2, 3}});
    const Curator curator = Curator::trak(sys, y, 1);
    const std::vector<int> sel = {0};
    const CurationResult res = curator.run(sel);
    CHECK(res.mask == std::vector<std::uint8_t>{0, 0, 1});
  }
  SUBCASE("mask popcount is always k") {
    const EmbeddingMatrix pool = generate_embeddings(31, 64, 8, 4, 0.5);
    const EmbeddingMatrix targets = generate_embeddings(32, 10, 8, 4, 0.5);
    const Curator curator = Curator::image(pool, targets, 13);
    const std::vector<int> sel = {0, 3, 4, 9};
    const CurationResult res = curator.run(sel);
    int pop = 0;
    for (auto b : res.mask) pop += b;
    CHECK(pop == 13);
  }
}

TEST_CASE("curate is deterministic") {
  const EmbeddingMatrix pool = generate_embeddings(41, 40, 8, 2, 0.4);
  const EmbeddingMatrix targets = generate_embeddings(42, 6, 8, 2, 0.4);
  const Curator a = Curator::image(pool, targets, 9);
  const Curator b = Curator::image(pool, targets, 9);
  const std::vector<int> sel = {0, 2, 5};
  CHECK(a.run(sel).scores == b.run(sel).scores);
  CHECK(a.run(sel).mask == b.run(sel).mask);
}

TEST_CASE("project_gradients shape and determinism") {
  const GradientMatrix raw = generate_gradients(50, 12, 64);
  const GradientMatrix p1 = project_gradients(raw, 7, 16);
  const GradientMatrix p2 = project_gradients(raw, 7, 16);
  REQUIRE(p1.dim() == 16);
  CHECK(p1.data == p2.data);
  const GradientMatrix p3 = project_gradients(raw, 8, 16);
  CHECK(p1.data != p3.data);
}

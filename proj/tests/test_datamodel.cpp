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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "curmi/matrix_io.hpp"
#include "curmi/rng.hpp"
#include "curmi/synthetic.hpp"
#include "curmi/types.hpp"

using namespace curmi;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "curmi_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("generate_embeddings produces unit rows") {
  const EmbeddingMatrix m = generate_embeddings(7, 3, 4, 1, 0.1);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.dim() == 4);
  CHECK(m.row_norm);
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(m.data.row(i).cast<double>().norm() - 1.0) < 1e-6);
  }
}

TEST_CASE("generate_embeddings is deterministic and seed-sensitive") {
  const EmbeddingMatrix a = generate_embeddings(7, 16, 8, 2, 0.3);
  const EmbeddingMatrix b = generate_embeddings(7, 16, 8, 2, 0.3);
  CHECK(a.data == b.data);

  const EmbeddingMatrix c = generate_embeddings(8, 16, 8, 2, 0.3);
  CHECK(a.data != c.data);
}

TEST_CASE("generate_embeddings rejects bad parameters") {
  CHECK_THROWS_AS(generate_embeddings(1, 0, 4, 1, 0.1), ParameterError);
  CHECK_THROWS_AS(generate_embeddings(1, 4, 0, 1, 0.1), ParameterError);
  CHECK_THROWS_AS(generate_embeddings(1, 4, 4, 0, 0.1), ParameterError);
  CHECK_THROWS_AS(generate_embeddings(1, 4, 4, 1, 0.0), ParameterError);
}

TEST_CASE("generate_gradients shape and determinism") {
  const GradientMatrix g = generate_gradients(1, 2, 8);
  REQUIRE(g.rows() == 2);
  REQUIRE(g.dim() == 8);
  REQUIRE(g.q.size() == 2);
  CHECK((g.q.array() > 0).all());

  const GradientMatrix g2 = generate_gradients(1, 2, 8);
  CHECK(g.data == g2.data);
  CHECK_THROWS_AS(generate_gradients(1, 0, 8), ParameterError);
}

TEST_CASE("generate_gradients empirical mean is near zero") {
  // n * d_proj = 1e5 entries; the mean of that many unit-variance draws
  // should land within 5 sigma / sqrt(count).
  const GradientMatrix g = generate_gradients(42, 1000, 100);
  const double mean = g.data.cast<double>().mean();
  CHECK(std::abs(mean) < 5.0 / std::sqrt(1e5));
}

TEST_CASE("generate_gradients with planted signal") {
  MatrixD signal(1, 4);
  signal << 100.0, 0.0, 0.0, 0.0;
  const GradientMatrix g = generate_gradients(3, 10, 4, signal);
  // All rows share the planted offset in coordinate 0.
  CHECK(g.data.col(0).minCoeff() > 50.0f);
}

TEST_CASE("sample_selected cardinality and identity") {
  TargetSet ts = make_target_set(10);
  const TargetSet half = sample_selected(ts, 0.5, 3);
  CHECK(half.selected_count() == 5);

  const TargetSet all = sample_selected(ts, 1.0, 3);
  CHECK(all.selected_count() == 10);

  CHECK_THROWS_AS(sample_selected(ts, 0.01, 3), ParameterError);
}

TEST_CASE("sample_selected seed pairs differ") {
  TargetSet ts = make_target_set(10);
  int differing = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const TargetSet a = sample_selected(ts, 0.5, 2 * trial);
    const TargetSet b = sample_selected(ts, 0.5, 2 * trial + 1);
    if (a.selected != b.selected) ++differing;
  }
  CHECK(differing >= 95);
}

TEST_CASE("matrix file round trip is bit-identical") {
  const auto path = temp_file("roundtrip.curm");

  SUBCASE("single entry") {
    MatrixF m(1, 1);
    m(0, 0) = 0.5f;
    save_matrix(path.string(), m);
    const MatrixF back = load_matrix(path.string());
    CHECK(back(0, 0) == 0.5f);
  }

  SUBCASE("1000x64 random") {
    Rng rng(99);
    MatrixF m(1000, 64);
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<float>(rng.gaussian());
    }
    save_matrix(path.string(), m);
    const MatrixF back = load_matrix(path.string());
    REQUIRE(back.rows() == m.rows());
    REQUIRE(back.cols() == m.cols());
    CHECK(std::memcmp(back.data(), m.data(), sizeof(float) * 64000) == 0);

    // Saving the loaded matrix reproduces the file bytes exactly.
    const auto path2 = temp_file("roundtrip2.curm");
    save_matrix(path2.string(), back);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
  }
}

TEST_CASE("matrix file header validation") {
  const auto path = temp_file("corrupt.curm");
  MatrixF m(2, 2);
  m << 1.0f, 2.0f, 3.0f, 4.0f;
  save_matrix(path.string(), m);

  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(load_matrix(path.string()), FormatError);
  }
  SUBCASE("bad version") {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(4);
    const char v[4] = {9, 0, 0, 0};
    f.write(v, 4);
    f.close();
    CHECK_THROWS_AS(load_matrix(path.string()), FormatError);
  }
  SUBCASE("truncated payload") {
    fs::resize_file(path, fs::file_size(path) - 4);
    CHECK_THROWS_AS(load_matrix(path.string()), FormatError);
  }
  SUBCASE("trailing bytes") {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    f.write("zz", 2);
    f.close();
    CHECK_THROWS_AS(load_matrix(path.string()), FormatError);
  }
}

TEST_CASE("target set json round trip") {
  TargetSet ts = make_target_set(6);
  ts.selected[1] = 1;
  ts.selected[4] = 1;
  const auto path = temp_file("targets.json");
  save_target_set(path.string(), ts);
  const TargetSet back = load_target_set(path.string());
  CHECK(back.indices == ts.indices);
  CHECK(back.selected == ts.selected);
}

TEST_CASE("substreams are order-independent") {
  // Drawing stream 5 first or last does not change its values.
  Rng a = Rng::substream(11, "x", 5);
  const double v1 = a.gaussian();
  Rng::substream(11, "x", 0).gaussian();
  Rng b = Rng::substream(11, "x", 5);
  CHECK(b.gaussian() == v1);
}

TEST_CASE("embedding validation catches unnormalized rows") {
  MatrixF m(2, 2);
  m << 1.0f, 0.0f, 3.0f, 0.0f;
  CHECK_THROWS_AS(EmbeddingMatrix::validated(std::move(m)), ParameterError);
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dtwgi/align.hpp"
#include "dtwgi/error.hpp"
#include "dtwgi/io.hpp"
#include "dtwgi/synth.hpp"
#include "dtwgi/transforms.hpp"

using namespace dtwgi;

namespace {

constexpr double kPi = std::numbers::pi;

TimeSeries fixture(const char *name) {
  return load_series(std::string(DTWGI_FIXTURE_DIR) + "/" + name);
}

} // namespace

TEST_CASE("generator output is a pure function of the spec") {
  for (auto kind : {SeriesKind::spiral2d, SeriesKind::spiral3d, SeriesKind::folium,
                    SeriesKind::random_walk, SeriesKind::chroma_like, SeriesKind::motion_like}) {
    GeneratorSpec s;
    s.kind = kind;
    s.length = 40;
    s.noise_std = 0.1;
    s.warp_seed = 5;
    s.seed = 7;
    CHECK(generate(s).values() == generate(s).values());
    GeneratorSpec other = s;
    other.seed = 8;
    CHECK(generate(s).values() != generate(other).values());
  }
}

TEST_CASE("generator dimensions") {
  GeneratorSpec s;
  CHECK(generate(s).dims() == 2);
  s.kind = SeriesKind::spiral3d;
  CHECK(generate(s).dims() == 3);
  s.kind = SeriesKind::chroma_like;
  CHECK(generate(s).dims() == 12);
  s.kind = SeriesKind::random_walk;
  CHECK(generate(s).dims() == 8);
  s.dims = 5;
  CHECK(generate(s).dims() == 5);
  s.length = 0;
  CHECK_THROWS_AS(generate(s), ConfigError);
  CHECK_THROWS_AS(parse_series_kind("helix"), ConfigError);
  CHECK(parse_series_kind(to_string(SeriesKind::folium)) == SeriesKind::folium);
}

TEST_CASE("frozen curves match the closed-form parametrizations") {
  const TimeSeries spiral = fixture("spiral2d_v1.csv");
  const TimeSeries spiral3 = fixture("spiral3d_v1.csv");
  const TimeSeries folium = fixture("folium_v1.csv");
  REQUIRE(spiral.length() == 32);
  for (Eigen::Index k = 0; k < 32; ++k) {
    const double s = k / 31.0;
    const double u = kPi / 2 + 3.5 * kPi * s;
    const double r = u / (4 * kPi);
    CHECK(std::abs(spiral.values()(k, 0) - r * std::cos(u)) <= 1e-14);
    CHECK(std::abs(spiral.values()(k, 1) - r * std::sin(u)) <= 1e-14);
    CHECK(std::abs(spiral3.values()(k, 2) - 0.5 * s) <= 1e-14);

    // Implicit form of the folium: x^3 + y^3 = 3 a x y.
    const double x = folium.values()(k, 0), y = folium.values()(k, 1);
    const double a = 0.5 / std::cbrt(0.5);
    CHECK(std::abs(x * x * x + y * y * y - 3 * a * x * y) <= 1e-12);
  }
}

TEST_CASE("generator reproduces the frozen fixtures") {
  for (auto kind : {SeriesKind::spiral2d, SeriesKind::spiral3d, SeriesKind::folium}) {
    GeneratorSpec s;
    s.kind = kind;
    s.length = 32;
    const TimeSeries ref = fixture((std::string(to_string(kind)) + "_v1.csv").c_str());
    CHECK((generate(s).values() - ref.values()).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("rotation acts exactly on the clean curve") {
  Rng rng(71);
  for (double theta : {0.3, kPi / 3, kPi, 5.0}) {
    GeneratorSpec base;
    base.length = 50;
    GeneratorSpec rot = base;
    rot.theta = theta;
    const Matrix expect = generate(base).values() * rotation_2d(theta).transpose();
    CHECK((generate(rot).values() - expect).norm() <= 1e-12);

    const Matrix R = rotation_z(theta);
    CHECK((R.transpose() * R - Matrix::Identity(3, 3)).norm() <= 1e-14);
    CHECK(R.determinant() == doctest::Approx(1.0));
  }
  const Matrix Q = rotation_2d(0.7);
  const TimeSeries x(gaussian_matrix(9, 2, rng));
  for (Eigen::Index t = 0; t < 9; ++t)
    CHECK((rotate(x, Q).row(t).transpose() - Q * x.row(t).transpose()).norm() <= 1e-15);
}

TEST_CASE("monotone warp is strictly increasing with fixed endpoints") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (double strength : {0.0, 0.5, 0.9}) {
      const auto w = monotone_warp(37, seed, strength);
      REQUIRE(w.size() == 37);
      CHECK(w.front() == 0.0);
      CHECK(w.back() == doctest::Approx(36.0).epsilon(1e-14));
      for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] > w[i - 1]);
    }
  }
  const auto flat = monotone_warp(11, 3, 0.0);
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(flat[i] == doctest::Approx(double(i)));
}

TEST_CASE("resampling interpolates linearly") {
  const TimeSeries x = TimeSeries::from_rows({{0, 10}, {2, 20}, {4, 40}});
  const TimeSeries r = resample(x, {0.0, 0.25, 1.5, 2.0});
  CHECK(r.values()(1, 0) == doctest::Approx(0.5));
  CHECK(r.values()(1, 1) == doctest::Approx(12.5));
  CHECK(r.values()(2, 1) == doctest::Approx(30.0));
  CHECK(r.values()(3, 0) == doctest::Approx(4.0));
  CHECK(resample_linear(x, 5).values()(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("warped copy stays DTW-close to the source") {
  GeneratorSpec s;
  s.length = 80;
  GeneratorSpec w = s;
  w.warp_seed = 9;
  const double warped = dtw(cost_matrix(generate(s), generate(w))).cost;
  GeneratorSpec rot = s;
  rot.theta = kPi / 2;
  CHECK(warped < 0.1 * dtw(cost_matrix(generate(s), generate(rot))).cost);
}

TEST_CASE("rotation study pairs") {
  const auto angles = angle_grid(16);
  CHECK(angles.size() == 16);
  CHECK(angles[4] == doctest::Approx(kPi / 2));
  const auto pairs = generate_pairs_for_rotation_study(50, angles);
  CHECK(pairs.size() == 800);
  CHECK(pairs[0].theta == 0.0);
  CHECK(pairs[50].theta == doctest::Approx(angles[1]));
  CHECK(pairs[799].trial == 49);
  const auto again = generate_pairs_for_rotation_study(50, angles);
  CHECK(again[123].y.values() == pairs[123].y.values());

  RotationStudySpec clean;
  clean.noise_std = 0.0;
  const auto noiseless = generate_pairs_for_rotation_study(1, {1.2}, clean);
  CHECK((noiseless[0].y.values() - noiseless[0].x.values() * rotation_2d(1.2).transpose())
            .norm() <= 1e-12);
}

TEST_CASE("chroma corpus covers are transposed songs") {
  const ChromaCorpus c = make_transposed_chroma_corpus(6, 13, 4, 0.0);
  REQUIRE(c.queries.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    const int k = c.transpositions[i];
    CHECK(k >= 1);
    CHECK(k <= 11);
    CHECK(c.queries[i].dims() == 12);
    const Vector mean = c.queries[i].values().colwise().mean();
    CHECK(mean.maxCoeff() - mean.minCoeff() <= 1e-12);
    // Undoing the shift on a cover yields frames that exist in the song.
    const ChromaTransposition undo{(12 - k) % 12, 12};
    const TimeSeries back = apply_transform(Transform{undo}, c.covers[i]);
    CHECK(dtw(cost_matrix(c.queries[i], back)).cost <= 1e-12);
  }
}

TEST_CASE("equal-duration major progression over all roots has flat mean chroma") {
  std::vector<int> roots{3, 7, 0, 11, 5, 9, 1, 4, 8, 2, 10, 6};
  const TimeSeries x = chroma_progression(roots, std::vector<bool>(12, false),
                                          std::vector<Eigen::Index>(12, 3));
  CHECK(x.length() == 36);
  for (Eigen::Index t = 0; t < x.length(); ++t) CHECK(x.row(t).norm() == doctest::Approx(1.0));
  const Vector mean = x.values().colwise().mean();
  CHECK(mean.maxCoeff() - mean.minCoeff() <= 1e-12);
}

TEST_CASE("motion corpus shape") {
  MotionCorpusSpec spec;
  const MotionCorpus mc = make_motion_corpus(spec, 21);
  CHECK(mc.train.size() == static_cast<std::size_t>(spec.styles * spec.per_style));
  CHECK(mc.split == spec.split);
  for (const auto &s : mc.train) {
    CHECK(s.length() == spec.length);
    CHECK(s.dims() == 3);
  }
  REQUIRE(mc.queries.size() == 1);
  CHECK(make_motion_corpus(spec, 21).queries[0].values() == mc.queries[0].values());
  spec.queries = 3;
  CHECK(make_motion_corpus(spec, 21).queries.size() == 3);
  spec.split = spec.length;
  CHECK_THROWS_AS(make_motion_corpus(spec, 1), ConfigError);
}

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dtwgi/random.hpp"
#include "dtwgi/time_series.hpp"

namespace dtwgi {

enum class SeriesKind { spiral2d, spiral3d, folium, random_walk, chroma_like, motion_like };

SeriesKind parse_series_kind(std::string_view name);
std::string_view to_string(SeriesKind kind);

/// Recipe for one synthetic series. The clean curve is rotated, then noise
/// is added, then the samples are re-timed by the warp.
struct GeneratorSpec {
  SeriesKind kind = SeriesKind::spiral2d;
  Eigen::Index length = 64;
  /// Only read by random_walk (default 8) and chroma_like (default 12).
  Eigen::Index dims = 0;
  double noise_std = 0.0;
  /// Planar rotation angle; 2d kinds rotate the plane, 3d kinds rotate
  /// about the z axis. Ignored when `rotation` is set.
  double theta = 0.0;
  /// Full orthogonal matrix acting on each observation (q_t = Q x_t).
  std::optional<Matrix> rotation;
  std::optional<std::uint64_t> warp_seed;
  std::uint64_t seed = 0;

  Eigen::Index resolved_dims() const;
  void validate() const;
};

TimeSeries generate(const GeneratorSpec &spec);

Matrix rotation_2d(double theta);
/// Rotation about the third axis (3 x 3).
Matrix rotation_z(double theta);
/// Planar rotation for 2d, z-axis rotation for 3d.
Matrix rotation_for(Eigen::Index dims, double theta);
/// Each observation mapped to Q x_t (i.e. values * Q^T).
TimeSeries rotate(const TimeSeries &x, const Matrix &Q);

/// Strictly increasing sample positions in [0, length-1] with both
/// endpoints fixed; `strength` in [0, 1) controls how far the local rate
/// departs from uniform.
std::vector<double> monotone_warp(Eigen::Index length, std::uint64_t seed,
                                  double strength = 0.5);
/// Linear interpolation of x at fractional positions.
TimeSeries resample(const TimeSeries &x, const std::vector<double> &positions);
/// `length` evenly spaced positions over x.
TimeSeries resample_linear(const TimeSeries &x, Eigen::Index length);

/// k * 2 pi / count for k = 0..count-1.
std::vector<double> angle_grid(int count);

struct RotationPair {
  TimeSeries x;
  TimeSeries y;
  double theta = 0.0;
  int trial = 0;
};

struct RotationStudySpec {
  Eigen::Index length = 96;
  double noise_std = 0.05;
  std::uint64_t master_seed = 0;
};

/// n noisy spiral pairs per angle: x a reference spiral, y the same
/// spiral rotated by theta, each with independent noise. Seeds depend only
/// on (master seed, trial, angle index). Ordered angle-major.
std::vector<RotationPair> generate_pairs_for_rotation_study(
    int n, const std::vector<double> &angles, const RotationStudySpec &spec = {});

/// Chord-progression chroma: `roots` gives one chord root per segment,
/// `minor` its quality, `durations` its length in frames. Frames are
/// unit-norm 12-bin vectors.
TimeSeries chroma_progression(const std::vector<int> &roots,
                              const std::vector<bool> &minor,
                              const std::vector<Eigen::Index> &durations);

struct ChromaCorpus {
  std::vector<TimeSeries> queries;
  std::vector<TimeSeries> covers;
  std::vector<int> transpositions;
};

/// `pairs` songs and one cover each. Every song visits all 12 chord roots
/// for equal time with a single chord quality, so its average chroma is
/// flat and carries no key information; the
/// cover is re-timed, transposed by a nonzero shift and perturbed.
ChromaCorpus make_transposed_chroma_corpus(int pairs, std::uint64_t seed,
                                           Eigen::Index frames_per_chord = 4,
                                           double noise_std = 0.03);

/// Parameters of one periodic 3d limb-like movement.
struct MotionStyle {
  double stride = 0.0;     // forward drift per unit time along x
  double amplitude_x = 0.0;
  double amplitude_y = 0.0;
  double amplitude_z = 0.0;
  double frequency = 0.0;  // cycles over the whole series
  double phase_y = 0.0;
  double phase_z = 0.0;
};

MotionStyle random_motion_style(Rng &rng);
TimeSeries motion_trajectory(const MotionStyle &style, Eigen::Index length);

struct MotionCorpus {
  std::vector<TimeSeries> train;
  /// Full-length held-out series; forecasting sees only their beginnings.
  std::vector<TimeSeries> queries;
  Eigen::Index split = 0;
};

struct MotionCorpusSpec {
  Eigen::Index length = 60;
  Eigen::Index split = 30;
  int styles = 4;
  int per_style = 5;
  int queries = 1;
  double style_jitter = 0.05;
  double warp_strength = 0.7;
  double noise_std = 0.01;
  /// Multiplies every coordinate (noise included).
  double scale = 4.0;
};

/// Training trajectories spread over a few styles, each rotated by a
/// random angle about z and re-timed; each query is an unrotated, re-timed
/// member of a randomly picked style.
MotionCorpus make_motion_corpus(const MotionCorpusSpec &spec, std::uint64_t seed);

} // namespace dtwgi

#include "dtwgi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "dtwgi/error.hpp"

namespace dtwgi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Archimedean spiral r = a * u, u in [pi/2, 4 pi], scaled to unit outer
// radius. Uniform steps in u put samples closer together near the centre.
Matrix spiral_curve(Eigen::Index T, bool with_height) {
  const double u0 = 0.5 * std::numbers::pi, u1 = 4.0 * std::numbers::pi;
  Matrix m(T, with_height ? 3 : 2);
  for (Eigen::Index k = 0; k < T; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(T - 1);
    const double u = u0 + (u1 - u0) * s;
    const double r = u / u1;
    m(k, 0) = r * std::cos(u);
    m(k, 1) = r * std::sin(u);
    if (with_height) m(k, 2) = 0.5 * s;
  }
  return m;
}

// Folium of Descartes x = 3as/(1+s^3), y = 3as^2/(1+s^3) with s = tan(phi),
// phi uniform over most of (0, pi/2): one pass around the loop.
Matrix folium_curve(Eigen::Index T) {
  const double a = 1.0 / (3.0 * std::cbrt(0.5) / 1.5);
  const double phi0 = 0.15, phi1 = 0.5 * std::numbers::pi - 0.15;
  Matrix m(T, 2);
  for (Eigen::Index k = 0; k < T; ++k) {
    const double phi =
        phi0 + (phi1 - phi0) * static_cast<double>(k) / static_cast<double>(T - 1);
    const double s = std::tan(phi);
    const double den = 1.0 + s * s * s;
    m(k, 0) = 3.0 * a * s / den;
    m(k, 1) = 3.0 * a * s * s / den;
  }
  return m;
}

Matrix random_walk_curve(Eigen::Index T, Eigen::Index p, Rng &rng) {
  Matrix steps = gaussian_matrix(T, p, rng, 1.0 / std::sqrt(static_cast<double>(T)));
  for (Eigen::Index k = 1; k < T; ++k) steps.row(k) += steps.row(k - 1);
  return steps;
}

Vector chord_template(int root, bool minor) {
  Vector v = Vector::Constant(12, 0.05);
  const int third = minor ? 3 : 4;
  v((root % 12 + 12) % 12) += 1.0;
  v(((root + third) % 12 + 12) % 12) += 0.7;
  v(((root + 7) % 12 + 12) % 12) += 0.85;
  return v.normalized();
}

Matrix chroma_curve(Eigen::Index T, Rng &rng) {
  std::uniform_int_distribution<int> root(0, 11);
  std::bernoulli_distribution minor(0.3);
  std::vector<int> roots;
  std::vector<bool> qualities;
  std::vector<Eigen::Index> durations;
  Eigen::Index used = 0;
  while (used < T) {
    const Eigen::Index d = std::min<Eigen::Index>(T - used, 4 + static_cast<Eigen::Index>(rng() % 5));
    roots.push_back(root(rng));
    qualities.push_back(minor(rng));
    durations.push_back(d);
    used += d;
  }
  return chroma_progression(roots, qualities, durations).values();
}

} // namespace

SeriesKind parse_series_kind(std::string_view name) {
  if (name == "spiral2d") return SeriesKind::spiral2d;
  if (name == "spiral3d") return SeriesKind::spiral3d;
  if (name == "folium") return SeriesKind::folium;
  if (name == "random_walk" || name == "random-walk") return SeriesKind::random_walk;
  if (name == "chroma_like" || name == "chroma-like") return SeriesKind::chroma_like;
  if (name == "motion_like" || name == "motion-like") return SeriesKind::motion_like;
  throw ConfigError("unknown series kind '" + std::string(name) + "'");
}

std::string_view to_string(SeriesKind kind) {
  switch (kind) {
  case SeriesKind::spiral2d: return "spiral2d";
  case SeriesKind::spiral3d: return "spiral3d";
  case SeriesKind::folium: return "folium";
  case SeriesKind::random_walk: return "random_walk";
  case SeriesKind::chroma_like: return "chroma_like";
  case SeriesKind::motion_like: return "motion_like";
  }
  return "?";
}

Eigen::Index GeneratorSpec::resolved_dims() const {
  switch (kind) {
  case SeriesKind::spiral2d:
  case SeriesKind::folium: return 2;
  case SeriesKind::spiral3d:
  case SeriesKind::motion_like: return 3;
  case SeriesKind::random_walk: return dims > 0 ? dims : 8;
  case SeriesKind::chroma_like: return dims > 0 ? dims : 12;
  }
  return dims;
}

void GeneratorSpec::validate() const {
  if (length < 2) throw ConfigError("series length must be >= 2");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw ConfigError("noise_std must be >= 0");
  if (!std::isfinite(theta)) throw ConfigError("theta must be finite");
  if (kind == SeriesKind::chroma_like && dims > 0 && dims != 12)
    throw ConfigError("chroma_like series have 12 dims");
  if (dims < 0) throw ConfigError("dims must be >= 0");
  if (rotation) {
    const Eigen::Index p = resolved_dims();
    if (rotation->rows() != p || rotation->cols() != p)
      throw DimensionError("rotation matrix must be square in the series dims",
                           rotation->rows(), p);
    if ((rotation->transpose() * *rotation - Matrix::Identity(p, p)).norm() > 1e-8)
      throw ConfigError("rotation matrix is not orthogonal");
  }
}

Matrix rotation_2d(double theta) {
  Matrix R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return R;
}

Matrix rotation_z(double theta) {
  Matrix R = Matrix::Identity(3, 3);
  R.topLeftCorner(2, 2) = rotation_2d(theta);
  return R;
}

Matrix rotation_for(Eigen::Index dims, double theta) {
  if (dims == 2) return rotation_2d(theta);
  Matrix R = Matrix::Identity(dims, dims);
  if (dims >= 2) R.topLeftCorner(2, 2) = rotation_2d(theta);
  return R;
}

TimeSeries rotate(const TimeSeries &x, const Matrix &Q) {
  if (Q.cols() != x.dims())
    throw DimensionError("rotation does not match series dims", Q.cols(), x.dims());
  return TimeSeries(x.values() * Q.transpose());
}

std::vector<double> monotone_warp(Eigen::Index length, std::uint64_t seed,
                                  double strength) {
  if (length < 2) throw ConfigError("warp needs length >= 2");
  if (!(strength >= 0.0 && strength < 1.0))
    throw ConfigError("warp strength must be in [0, 1)");
  Rng rng(mix_seed(seed, 0x3A7FULL));
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  double a[3], ph[3];
  for (int h = 0; h < 3; ++h) {
    a[h] = weight(rng) / (h + 1);
    ph[h] = phase(rng);
  }
  const double norm = std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]);
  std::vector<double> rate(static_cast<std::size_t>(length - 1));
  for (std::size_t k = 0; k < rate.size(); ++k) {
    const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(rate.size());
    double v = 0.0;
    for (int h = 0; h < 3; ++h) v += a[h] * std::sin(kTwoPi * (h + 1) * s + ph[h]);
    // |v| / norm <= 1, so every rate stays in [1 - strength, 1 + strength].
    rate[k] = 1.0 + strength * (norm > 0 ? v / norm : 0.0);
  }
  const double total = std::accumulate(rate.begin(), rate.end(), 0.0);
  std::vector<double> pos(static_cast<std::size_t>(length));
  pos[0] = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < rate.size(); ++k) {
    acc += rate[k];
    pos[k + 1] = acc / total * static_cast<double>(length - 1);
  }
  pos.back() = static_cast<double>(length - 1);
  return pos;
}

TimeSeries resample(const TimeSeries &x, const std::vector<double> &positions) {
  const Eigen::Index T = x.length();
  Matrix out(static_cast<Eigen::Index>(positions.size()), x.dims());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const double s = std::clamp(positions[k], 0.0, static_cast<double>(T - 1));
    const auto lo = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(s)), T - 1);
    const auto hi = std::min<Eigen::Index>(lo + 1, T - 1);
    const double w = s - static_cast<double>(lo);
    out.row(static_cast<Eigen::Index>(k)) = (1.0 - w) * x.row(lo) + w * x.row(hi);
  }
  return TimeSeries(std::move(out));
}

TimeSeries resample_linear(const TimeSeries &x, Eigen::Index length) {
  if (length < 1) throw ConfigError("resample length must be >= 1");
  std::vector<double> pos(static_cast<std::size_t>(length), 0.0);
  if (length > 1)
    for (Eigen::Index k = 0; k < length; ++k)
      pos[static_cast<std::size_t>(k)] = static_cast<double>(k) *
                                         static_cast<double>(x.length() - 1) /
                                         static_cast<double>(length - 1);
  return resample(x, pos);
}

TimeSeries generate(const GeneratorSpec &spec) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, 0x5EEDULL));
  const Eigen::Index T = spec.length;
  Matrix m;
  switch (spec.kind) {
  case SeriesKind::spiral2d: m = spiral_curve(T, false); break;
  case SeriesKind::spiral3d: m = spiral_curve(T, true); break;
  case SeriesKind::folium: m = folium_curve(T); break;
  case SeriesKind::random_walk: m = random_walk_curve(T, spec.resolved_dims(), rng); break;
  case SeriesKind::chroma_like: m = chroma_curve(T, rng); break;
  case SeriesKind::motion_like:
    m = motion_trajectory(random_motion_style(rng), T).values();
    break;
  }
  const Eigen::Index p = m.cols();
  if (spec.rotation)
    m = m * spec.rotation->transpose();
  else if (spec.theta != 0.0 && p >= 2)
    m = m * rotation_for(p, spec.theta).transpose();

  if (spec.noise_std > 0.0) {
    Rng noise_rng(mix_seed(spec.seed, 0x401531ULL));
    m += gaussian_matrix(T, p, noise_rng, spec.noise_std);
  }
  TimeSeries out(std::move(m));
  if (spec.warp_seed) out = resample(out, monotone_warp(T, *spec.warp_seed));
  return out;
}

std::vector<double> angle_grid(int count) {
  if (count < 1) throw ConfigError("angle grid needs at least one angle");
  std::vector<double> a(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) a[static_cast<std::size_t>(k)] = kTwoPi * k / count;
  return a;
}

std::vector<RotationPair> generate_pairs_for_rotation_study(
    int n, const std::vector<double> &angles, const RotationStudySpec &spec) {
  if (n < 1) throw ConfigError("rotation study needs n >= 1");
  std::vector<RotationPair> out;
  out.reserve(static_cast<std::size_t>(n) * angles.size());
  for (std::size_t a = 0; a < angles.size(); ++a) {
    for (int trial = 0; trial < n; ++trial) {
      const auto base = mix_seed({spec.master_seed, static_cast<std::uint64_t>(trial),
                                  static_cast<std::uint64_t>(a)});
      GeneratorSpec gx;
      gx.kind = SeriesKind::spiral2d;
      gx.length = spec.length;
      gx.noise_std = spec.noise_std;
      gx.seed = mix_seed(base, 1);
      GeneratorSpec gy = gx;
      gy.theta = angles[a];
      gy.seed = mix_seed(base, 2);
      out.push_back({generate(gx), generate(gy), angles[a], trial});
    }
  }
  return out;
}

TimeSeries chroma_progression(const std::vector<int> &roots,
                              const std::vector<bool> &minor,
                              const std::vector<Eigen::Index> &durations) {
  if (roots.empty() || roots.size() != minor.size() || roots.size() != durations.size())
    throw ConfigError("chroma progression needs matching, non-empty chord lists");
  Eigen::Index T = 0;
  for (auto d : durations) {
    if (d < 1) throw ConfigError("chord durations must be >= 1");
    T += d;
  }
  Matrix m(T, 12);
  Eigen::Index t = 0;
  for (std::size_t c = 0; c < roots.size(); ++c) {
    const Vector v = chord_template(roots[c], minor[c]);
    for (Eigen::Index k = 0; k < durations[c]; ++k) m.row(t++) = v.transpose();
  }
  return TimeSeries(std::move(m));
}

ChromaCorpus make_transposed_chroma_corpus(int pairs, std::uint64_t seed,
                                           Eigen::Index frames_per_chord,
                                           double noise_std) {
  if (pairs < 1) throw ConfigError("corpus needs at least one pair");
  if (frames_per_chord < 2) throw ConfigError("frames_per_chord must be >= 2");
  ChromaCorpus corpus;
  for (int s = 0; s < pairs; ++s) {
    Rng rng(mix_seed({seed, static_cast<std::uint64_t>(s), 0xC0DAULL}));
    std::vector<int> roots(12);
    std::iota(roots.begin(), roots.end(), 0);
    std::shuffle(roots.begin(), roots.end(), rng);
    // One chord quality per song keeps the thirds spread evenly too.
    std::bernoulli_distribution coin(0.5);
    const std::vector<bool> minor(12, coin(rng));
    std::vector<Eigen::Index> even(12, frames_per_chord);
    corpus.queries.push_back(chroma_progression(roots, minor, even));

    std::uniform_int_distribution<int> shift(1, 11);
    const int k = shift(rng);
    std::vector<int> moved(12);
    for (std::size_t c = 0; c < 12; ++c) moved[c] = (roots[c] + k) % 12;
    std::uniform_int_distribution<Eigen::Index> dur(frames_per_chord - 1,
                                                    frames_per_chord + 1);
    std::vector<Eigen::Index> uneven(12);
    for (auto &d : uneven) d = dur(rng);
    Matrix cover = chroma_progression(moved, minor, uneven).values();
    cover += gaussian_matrix(cover.rows(), 12, rng, noise_std);
    corpus.covers.push_back(TimeSeries(cover.cwiseAbs()));
    corpus.transpositions.push_back(k);
  }
  return corpus;
}

MotionStyle random_motion_style(Rng &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MotionStyle s;
  s.stride = 0.5 + u(rng);
  s.amplitude_x = 0.1 + 0.2 * u(rng);
  s.amplitude_y = 0.2 + 0.3 * u(rng);
  s.amplitude_z = 0.1 + 0.2 * u(rng);
  s.frequency = 1.5 + 1.5 * u(rng);
  s.phase_y = kTwoPi * u(rng);
  s.phase_z = kTwoPi * u(rng);
  return s;
}

TimeSeries motion_trajectory(const MotionStyle &style, Eigen::Index length) {
  if (length < 2) throw ConfigError("motion length must be >= 2");
  Matrix m(length, 3);
  for (Eigen::Index k = 0; k < length; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(length - 1);
    const double u = kTwoPi * style.frequency * t;
    m(k, 0) = style.stride * t + style.amplitude_x * std::sin(u);
    m(k, 1) = style.amplitude_y * std::sin(u + style.phase_y);
    m(k, 2) = style.amplitude_z * std::sin(2.0 * u + style.phase_z);
  }
  return TimeSeries(std::move(m));
}

MotionCorpus make_motion_corpus(const MotionCorpusSpec &spec, std::uint64_t seed) {
  if (spec.split < 1 || spec.split >= spec.length)
    throw ConfigError("motion corpus split must satisfy 1 <= split < length");
  if (spec.styles < 1 || spec.per_style < 1 || spec.queries < 1)
    throw ConfigError("motion corpus needs styles, per_style and queries >= 1");
  Rng rng(mix_seed(seed, 0x40710ULL));
  std::vector<MotionStyle> styles;
  for (int s = 0; s < spec.styles; ++s) styles.push_back(random_motion_style(rng));

  std::normal_distribution<double> jitter(0.0, spec.style_jitter);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  auto perturbed = [&](const MotionStyle &base) {
    MotionStyle s = base;
    s.stride *= 1.0 + jitter(rng);
    s.amplitude_x *= 1.0 + jitter(rng);
    s.amplitude_y *= 1.0 + jitter(rng);
    s.amplitude_z *= 1.0 + jitter(rng);
    s.frequency *= 1.0 + 0.2 * jitter(rng);
    return s;
  };
  auto sample = [&](const MotionStyle &style, double theta) {
    TimeSeries clean = motion_trajectory(perturbed(style), spec.length);
    Matrix m = rotate(clean, rotation_z(theta)).values();
    m += gaussian_matrix(m.rows(), 3, rng, spec.noise_std);
    m *= spec.scale;
    return resample(TimeSeries(std::move(m)),
                    monotone_warp(spec.length, rng(), spec.warp_strength));
  };

  MotionCorpus corpus;
  corpus.split = spec.split;
  for (int s = 0; s < spec.styles; ++s)
    for (int k = 0; k < spec.per_style; ++k)
      corpus.train.push_back(sample(styles[static_cast<std::size_t>(s)], angle(rng)));
  std::uniform_int_distribution<int> pick(0, spec.styles - 1);
  for (int q = 0; q < spec.queries; ++q)
    corpus.queries.push_back(sample(styles[static_cast<std::size_t>(pick(rng))], 0.0));
  return corpus;
}

} // namespace dtwgi

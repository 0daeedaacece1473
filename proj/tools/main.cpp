// dtwgi: alignment distances, synthetic data and the experiment runners.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "dtwgi/error.hpp"
#include "dtwgi/experiments.hpp"
#include "dtwgi/io.hpp"

using namespace dtwgi;

namespace {

std::uint64_t default_seed() {
  const char *env = std::getenv("DTWGI_SEED");
  if (!env || !*env) return 0;
  char *end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw ConfigError(std::string("DTWGI_SEED is not an integer: ") + env);
  return v;
}

void write_table(const ResultTable &t, const std::string &path) {
  if (path.empty() || path == "-")
    t.write(std::cout);
  else
    t.save(path);
}

void write_matrix(std::ostream &os, const Matrix &m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? "," : "") << format_double(m(r, c));
    os << '\n';
  }
}

// Plain-text dump: cost line, transform block, then the path as i,j rows.
void write_result(const std::string &path, const GIResult &r) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path);
  os << "cost," << format_double(r.cost) << '\n';
  if (const auto *t = std::get_if<ChromaTransposition>(&r.transform)) {
    os << "transposition," << t->k << ',' << t->p << '\n';
  } else {
    const Matrix P = linear_part(r.transform);
    os << "matrix," << P.rows() << ',' << P.cols() << '\n';
    write_matrix(os, P);
    const Vector b = offset_part(r.transform);
    os << "offset," << b.size() << '\n';
    write_matrix(os, b.transpose());
  }
  if (r.path) {
    os << "path," << r.path->pairs.size() << '\n';
    for (const auto &[i, j] : r.path->pairs) os << i << ',' << j << '\n';
  }
}

template <class T>
std::vector<T> parse_list(const std::vector<std::string> &names, T (*parse)(std::string_view)) {
  std::vector<T> out;
  for (const auto &n : names) out.push_back(parse(n));
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Time series alignment under feature-space transforms"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::string family_name = "stiefel";
  std::string out;

  // dist
  auto *dist = app.add_subcommand("dist", "Distance between two series files");
  std::string file_x, file_y, method_name = "dtw";
  SolverConfig dist_cfg;
  dist_cfg.restarts = 8;
  dist->add_option("x", file_x, "First series file")->required();
  dist->add_option("y", file_y, "Second series file")->required();
  dist->add_option("--method", method_name, "dtw | softdtw | dtw-gi | softdtw-gi")
      ->capture_default_str();
  dist->add_option("--family", family_name, "stiefel | affine | transposition")
      ->capture_default_str();
  dist->add_option("--gamma", dist_cfg.gamma, "softDTW temperature")->capture_default_str();
  dist->add_option("--restarts", dist_cfg.restarts, "Solver restarts")->capture_default_str();
  dist->add_option("--max-iter", dist_cfg.max_iter)->capture_default_str();
  dist->add_option("--seed", seed, "Seed (default: $DTWGI_SEED or 0)");
  dist->add_option("--out", out, "Write cost, transform and path here");

  // gen
  auto *gen = app.add_subcommand("gen", "Generate a synthetic series");
  GeneratorSpec gspec;
  std::string kind_name = "spiral2d";
  std::optional<std::uint64_t> warp_seed;
  std::vector<double> rotation;
  gen->add_option("--kind", kind_name,
                  "spiral2d | spiral3d | folium | random_walk | chroma_like | motion_like")
      ->capture_default_str();
  gen->add_option("--length", gspec.length)->capture_default_str();
  gen->add_option("--dims", gspec.dims, "random_walk / chroma_like only");
  gen->add_option("--noise", gspec.noise_std)->capture_default_str();
  gen->add_option("--theta", gspec.theta, "Rotation angle")->capture_default_str();
  gen->add_option("--rotation", rotation, "Row-major orthogonal matrix (overrides --theta)")
      ->delimiter(',');
  gen->add_option("--warp-seed", warp_seed, "Re-time the samples with this seed");
  gen->add_option("--seed", seed);
  gen->add_option("--out", out)->required();

  // bench-timing
  auto *timing = app.add_subcommand("bench-timing", "Runtime versus length and dimension");
  TimingSpec tspec;
  tspec.lengths = {8, 16, 32, 64, 128, 256, 512, 1024};
  tspec.dims = {2, 4, 8, 16, 32, 64, 128};
  std::vector<std::string> timing_methods{"dtw", "softdtw", "dtw-gi", "softdtw-gi"};
  std::string timing_summary;
  timing->add_option("--lengths", tspec.lengths)->delimiter(',')->capture_default_str();
  timing->add_option("--dims", tspec.dims)->delimiter(',')->capture_default_str();
  timing->add_option("--methods", timing_methods)->delimiter(',')->capture_default_str();
  timing->add_option("--trials", tspec.trials)->capture_default_str();
  timing->add_option("--gi-iterations", tspec.gi_iterations)->capture_default_str();
  timing->add_option("--seed", seed);
  timing->add_option("--out", out, "Per-trial table (stdout if omitted)");
  timing->add_option("--summary", timing_summary, "Median / p20 / p80 table");

  // bench-rotation
  auto *rot = app.add_subcommand("bench-rotation", "Cost ratio versus rotation angle");
  RotationBenchSpec rspec;
  std::vector<std::string> rot_methods{"dtw", "dtw-gi"};
  std::string rot_summary;
  rot->add_option("--trials", rspec.trials)->capture_default_str();
  rot->add_option("--angles", rspec.angles)->capture_default_str();
  rot->add_option("--methods", rot_methods)->delimiter(',')->capture_default_str();
  rot->add_option("--length", rspec.series.length)->capture_default_str();
  rot->add_option("--noise", rspec.series.noise_std)->capture_default_str();
  rot->add_option("--restarts", rspec.solver.restarts)->capture_default_str();
  rot->add_option("--seed", seed);
  rot->add_option("--out", out);
  rot->add_option("--summary", rot_summary, "Median ratio per method and angle");

  // barycenter
  auto *bary = app.add_subcommand("barycenter", "Average a set of series");
  std::vector<std::string> inputs;
  std::string bary_method = "dba-gi", trace_out;
  BarycenterProblem problem;
  BarycenterOptions bopts;
  std::string bary_family = "affine";
  bary->add_option("--inputs", inputs)->required()->expected(1, -1);
  bary->add_option("--method", bary_method, "dba-gi | soft-gi | dba | softdtw")
      ->capture_default_str();
  bary->add_option("--length", problem.length, "Barycenter length (default: median input)");
  bary->add_option("--dim", problem.dims, "Barycenter dimension (default: smallest input)");
  bary->add_option("--family", bary_family, "stiefel | affine")->capture_default_str();
  bary->add_option("--gamma", bopts.solver.gamma)->capture_default_str();
  bary->add_option("--max-iter", bopts.solver.max_iter)->capture_default_str();
  bary->add_option("--minibatch", bopts.minibatch)->capture_default_str();
  bary->add_option("--seed", seed);
  bary->add_option("--out", out, "Barycenter series file")->required();
  bary->add_option("--trace", trace_out, "Loss trace table");

  // forecast-study
  auto *fc = app.add_subcommand("forecast-study", "Forecast error per backend and lambda");
  ForecastStudySpec fspec;
  std::vector<std::string> backends{"L2", "L2+Procrustes", "softDTW", "softDTW+Procrustes",
                                    "softDTW-GI"};
  std::string fc_summary;
  fc->add_option("--lambda-grid", fspec.lambdas)->delimiter(',')->capture_default_str();
  fc->add_option("--backends", backends)->delimiter(',')->capture_default_str();
  fc->add_option("--trials", fspec.trials)->capture_default_str();
  fc->add_option("--seed", seed);
  fc->add_option("--out", out);
  fc->add_option("--summary", fc_summary, "Median error per backend and lambda");

  // retrieval
  auto *ret = app.add_subcommand("retrieval", "Rank a corpus for each query");
  std::string query_dir, corpus_dir, ret_method = "dtw-gi-oti";
  SolverConfig ret_cfg;
  ret->add_option("--query-dir", query_dir)->required();
  ret->add_option("--corpus-dir", corpus_dir)->required();
  ret->add_option("--method", ret_method, "dtw | dtw+oti | dtw-gi-stiefel | dtw-gi-oti")
      ->capture_default_str();
  ret->add_option("--restarts", ret_cfg.restarts, "dtw-gi-stiefel restarts")
      ->capture_default_str();
  ret->add_option("--seed", seed);
  ret->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (dist->parsed()) {
      const TimeSeries x = load_series(file_x), y = load_series(file_y);
      dist_cfg.seed = seed;
      const GIResult r =
          run_method(parse_method(method_name), x, y, parse_family(family_name), dist_cfg);
      std::cout << format_double(r.cost) << '\n';
      if (!out.empty()) write_result(out, r);
    } else if (gen->parsed()) {
      gspec.kind = parse_series_kind(kind_name);
      gspec.seed = seed;
      gspec.warp_seed = warp_seed;
      if (!rotation.empty()) {
        const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(rotation.size())));
        if (n * n != static_cast<Eigen::Index>(rotation.size()))
          throw ConfigError("--rotation needs a square matrix");
        gspec.rotation = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                        Eigen::RowMajor>>(rotation.data(), n, n);
      }
      save_series(out, generate(gspec));
    } else if (timing->parsed()) {
      tspec.methods = parse_list(timing_methods, parse_method);
      tspec.seed = seed;
      const ResultTable t = bench_timing(tspec);
      write_table(t, out);
      if (!timing_summary.empty()) summarize_timing(t).save(timing_summary);
    } else if (rot->parsed()) {
      rspec.methods = parse_list(rot_methods, parse_method);
      rspec.series.master_seed = seed;
      rspec.solver.seed = seed;
      const ResultTable t = bench_rotation(rspec);
      write_table(t, out);
      if (!rot_summary.empty()) summarize_rotation(t).save(rot_summary);
    } else if (bary->parsed()) {
      for (const auto &f : inputs) problem.inputs.push_back(load_series(f));
      bopts.family = parse_family(bary_family);
      bopts.solver.seed = seed;
      const Barycenter b = run_barycenter(parse_barycenter_method(bary_method), problem, bopts);
      save_series(out, b.series);
      if (!trace_out.empty()) loss_trace_table(b).save(trace_out);
      std::cout << format_double(b.loss) << '\n';
    } else if (fc->parsed()) {
      fspec.backends = parse_list(backends, parse_backend);
      fspec.seed = seed;
      fspec.solver.seed = seed;
      const ResultTable t = forecast_study(fspec);
      write_table(t, out);
      if (!fc_summary.empty()) summarize_forecast(t).save(fc_summary);
    } else if (ret->parsed()) {
      std::vector<std::string> diagnostics;
      const auto queries = load_series_dir(query_dir, diagnostics);
      const auto corpus = load_series_dir(corpus_dir, diagnostics);
      for (const auto &d : diagnostics) std::cerr << "skipped " << d << '\n';
      ret_cfg.seed = seed;
      write_table(retrieval(queries, corpus, parse_retrieval_method(ret_method), ret_cfg), out);
    }
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

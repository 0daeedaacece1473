#include "dtwgi/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "dtwgi/align.hpp"
#include "dtwgi/error.hpp"
#include "dtwgi/random.hpp"
#include "parallel.hpp"

namespace dtwgi {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Linear-interpolated percentile, q in [0, 1].
double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string str(long long v) { return std::to_string(v); }

} // namespace

Method parse_method(std::string_view name) {
  if (name == "dtw") return Method::dtw;
  if (name == "softdtw") return Method::soft_dtw;
  if (name == "dtw-gi") return Method::dtw_gi;
  if (name == "softdtw-gi") return Method::soft_dtw_gi;
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected dtw, softdtw, dtw-gi or softdtw-gi)");
}

std::string_view to_string(Method method) {
  switch (method) {
  case Method::dtw: return "dtw";
  case Method::soft_dtw: return "softdtw";
  case Method::dtw_gi: return "dtw-gi";
  case Method::soft_dtw_gi: return "softdtw-gi";
  }
  return "?";
}

GIResult run_method(Method method, const TimeSeries &x, const TimeSeries &y, Family family,
                    const SolverConfig &cfg) {
  switch (method) {
  case Method::dtw:
  case Method::soft_dtw: {
    if (x.dims() != y.dims())
      throw DimensionError("plain alignment needs series of equal dimensionality",
                           x.dims(), y.dims());
    GIResult r;
    r.transform = StiefelLinear::identity(x.dims(), y.dims());
    r.converged = true;
    const Matrix C = cost_matrix(x, y);
    if (method == Method::dtw) {
      DtwResult d = dtw(C);
      r.cost = d.cost;
      r.path = std::move(d.path);
    } else {
      cfg.validate();
      r.cost = soft_dtw(C, cfg.gamma);
    }
    r.cost_trace.push_back(r.cost);
    return r;
  }
  case Method::dtw_gi:
  case Method::soft_dtw_gi: {
    const bool swap = x.dims() < y.dims();
    const TimeSeries &a = swap ? y : x;
    const TimeSeries &b = swap ? x : y;
    GIResult r = method == Method::dtw_gi ? dtw_gi_bcd(a, b, family, cfg)
                                          : soft_dtw_gi_grad(a, b, family, cfg);
    if (swap && r.path)
      for (auto &[i, j] : r.path->pairs) std::swap(i, j);
    return r;
  }
  }
  throw ConfigError("unknown method");
}

// ---- timing -------------------------------------------------------------

ResultTable bench_timing(const TimingSpec &spec) {
  if (spec.trials < 1) throw ConfigError("timing needs trials >= 1");
  if (spec.gi_iterations < 1) throw ConfigError("timing needs gi_iterations >= 1");
  ResultTable table({"method", "T", "p", "trial", "seconds"});

  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  for (auto T : spec.lengths) cells.emplace_back(T, spec.length_sweep_dims);
  for (auto p : spec.dims) cells.emplace_back(spec.dim_sweep_length, p);
  for (const auto &[T, p] : cells)
    if (T < 1 || p < 1) throw ConfigError("timing grid values must be >= 1");

  SolverConfig cfg;
  cfg.max_iter = spec.gi_iterations;
  cfg.patience = spec.gi_iterations + 1;  // never stop early
  cfg.tolerance = 0.0;

  for (Method m : spec.methods) {
    for (const auto &[T, p] : cells) {
      for (int trial = -1; trial < spec.trials; ++trial) {
        Rng rng(mix_seed({spec.seed, static_cast<std::uint64_t>(T),
                          static_cast<std::uint64_t>(p),
                          static_cast<std::uint64_t>(trial + 1)}));
        const TimeSeries x(gaussian_matrix(T, p, rng));
        const TimeSeries y(gaussian_matrix(T, p, rng));
        const auto t0 = std::chrono::steady_clock::now();
        const GIResult r = run_method(m, x, y, Family::stiefel, cfg);
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // BCD may reach its fixed point early; charge it the full budget.
        if (m == Method::dtw_gi && r.iterations > 0)
          seconds *= static_cast<double>(spec.gi_iterations) / r.iterations;
        if (trial < 0) continue;  // warm-up
        table.add_row({std::string(to_string(m)), str(T), str(p), str(trial),
                       format_double(seconds)});
      }
    }
  }
  return table;
}

ResultTable summarize_timing(const ResultTable &timings) {
  std::map<std::tuple<std::string, long long, long long>, std::vector<double>> groups;
  std::vector<std::tuple<std::string, long long, long long>> order;
  const auto mi = timings.column_index("method"), ti = timings.column_index("T"),
             pi = timings.column_index("p"), si = timings.column_index("seconds");
  for (const auto &row : timings.rows()) {
    auto key = std::make_tuple(row[mi], std::stoll(row[ti]), std::stoll(row[pi]));
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(parse_double(row[si]));
  }
  ResultTable out({"method", "T", "p", "median", "p20", "p80"});
  for (const auto &key : order) {
    const auto &v = groups[key];
    out.add_row({std::get<0>(key), str(std::get<1>(key)), str(std::get<2>(key)),
                 format_double(median_of(v)), format_double(percentile(v, 0.2)),
                 format_double(percentile(v, 0.8))});
  }
  return out;
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigError("slope needs at least two matching points");
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw DataError("log-log slope needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw ConfigError("slope needs at least two distinct x values");
  return sxy / sxx;
}

double timing_slope(const ResultTable &summary, Method method, const std::string &sweep,
                    const TimingSpec &spec) {
  const bool by_length = sweep == "T";
  if (!by_length && sweep != "p") throw ConfigError("sweep must be T or p");
  const auto mi = summary.column_index("method"), ti = summary.column_index("T"),
             pi = summary.column_index("p"), di = summary.column_index("median");
  std::vector<double> xs, ys;
  for (const auto &row : summary.rows()) {
    if (row[mi] != to_string(method)) continue;
    const long long T = std::stoll(row[ti]), p = std::stoll(row[pi]);
    const bool in_length_sweep =
        p == spec.length_sweep_dims &&
        std::find(spec.lengths.begin(), spec.lengths.end(), T) != spec.lengths.end();
    const bool in_dim_sweep =
        T == spec.dim_sweep_length &&
        std::find(spec.dims.begin(), spec.dims.end(), p) != spec.dims.end();
    if (by_length ? !in_length_sweep : !in_dim_sweep) continue;
    xs.push_back(static_cast<double>(by_length ? T : p));
    ys.push_back(parse_double(row[di]));
  }
  return loglog_slope(xs, ys);
}

// ---- rotation -----------------------------------------------------------

ResultTable bench_rotation(const RotationBenchSpec &spec) {
  if (spec.trials < 1) throw ConfigError("rotation study needs trials >= 1");
  const auto angles = angle_grid(spec.angles);
  const auto pairs = generate_pairs_for_rotation_study(spec.trials, angles, spec.series);

  ResultTable table({"method", "theta", "trial", "cost", "ratio_to_theta0"});
  for (Method m : spec.methods) {
    std::vector<double> cost(pairs.size());
    detail::parallel_for(pairs.size(), spec.threads, [&](std::size_t i) {
      cost[i] = run_method(m, pairs[i].x, pairs[i].y, spec.family, spec.solver).cost;
    });
    // Pairs are angle-major, so the first `trials` entries are theta = 0.
    double base = 0.0;
    for (int t = 0; t < spec.trials; ++t) base += cost[static_cast<std::size_t>(t)];
    base /= spec.trials;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      table.add_row({std::string(to_string(m)), format_double(pairs[i].theta),
                     str(pairs[i].trial), format_double(cost[i]),
                     format_double(cost[i] / base)});
  }
  return table;
}

ResultTable summarize_rotation(const ResultTable &rotation) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  const auto mi = rotation.column_index("method"), ti = rotation.column_index("theta"),
             ri = rotation.column_index("ratio_to_theta0");
  for (const auto &row : rotation.rows()) {
    auto key = std::make_pair(row[mi], row[ti]);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(parse_double(row[ri]));
  }
  ResultTable out({"method", "theta", "median_ratio"});
  for (const auto &key : order)
    out.add_row({key.first, key.second, format_double(median_of(groups[key]))});
  return out;
}

// ---- barycenters --------------------------------------------------------

BarycenterMethod parse_barycenter_method(std::string_view name) {
  if (name == "dba-gi") return BarycenterMethod::dba_gi;
  if (name == "soft-gi") return BarycenterMethod::soft_gi;
  if (name == "dba") return BarycenterMethod::dba;
  if (name == "softdtw") return BarycenterMethod::soft_dtw;
  throw ConfigError("unknown barycenter method '" + std::string(name) +
                    "' (expected dba-gi, soft-gi, dba or softdtw)");
}

std::string_view to_string(BarycenterMethod method) {
  switch (method) {
  case BarycenterMethod::dba_gi: return "dba-gi";
  case BarycenterMethod::soft_gi: return "soft-gi";
  case BarycenterMethod::dba: return "dba";
  case BarycenterMethod::soft_dtw: return "softdtw";
  }
  return "?";
}

Barycenter run_barycenter(BarycenterMethod method, const BarycenterProblem &problem,
                          const BarycenterOptions &opts) {
  switch (method) {
  case BarycenterMethod::dba_gi: return dba_gi(problem, opts);
  case BarycenterMethod::soft_gi: return soft_barycenter_gi(problem, opts);
  case BarycenterMethod::dba: return dba(problem, opts);
  case BarycenterMethod::soft_dtw: return soft_barycenter(problem, opts);
  }
  throw ConfigError("unknown barycenter method");
}

ResultTable loss_trace_table(const Barycenter &b) {
  ResultTable t({"iteration", "loss"});
  for (std::size_t i = 0; i < b.loss_trace.size(); ++i)
    t.add_row({str(static_cast<long long>(i)), format_double(b.loss_trace[i])});
  return t;
}

// ---- forecasting --------------------------------------------------------

ResultTable forecast_study(const ForecastStudySpec &spec) {
  if (spec.trials < 1) throw ConfigError("forecast study needs trials >= 1");
  if (spec.lambdas.empty() || spec.backends.empty())
    throw ConfigError("forecast study needs at least one lambda and one backend");
  for (double l : spec.lambdas)
    if (!(l > 0) || !std::isfinite(l)) throw ConfigError("lambda values must be positive");

  const std::size_t nb = spec.backends.size(), nl = spec.lambdas.size();
  // err[(trial * nb + b) * nl + l]
  std::vector<double> err(static_cast<std::size_t>(spec.trials) * nb * nl);
  detail::parallel_for(static_cast<std::size_t>(spec.trials), spec.threads,
                       [&](std::size_t trial) {
    const MotionCorpus mc = make_motion_corpus(spec.corpus, mix_seed(spec.seed, trial));
    const ForecastCorpus corpus{mc.train, mc.split};
    const double nq = static_cast<double>(mc.queries.size());
    for (const TimeSeries &query : mc.queries) {
      const TimeSeries y_begin = query.slice(0, mc.split);
      const TimeSeries y_end = query.slice(mc.split, query.length() - mc.split);
      for (std::size_t b = 0; b < nb; ++b) {
        const auto neighbors = score_corpus(y_begin, corpus, spec.backends[b], spec.solver, 1);
        for (std::size_t l = 0; l < nl; ++l)
          err[(trial * nb + b) * nl + l] +=
              l2_error(combine_futures(neighbors, corpus, spec.lambdas[l]), y_end) / nq;
      }
    }
  });

  ResultTable table({"backend", "lambda", "trial", "l2_error"});
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t l = 0; l < nl; ++l)
      for (int trial = 0; trial < spec.trials; ++trial)
        table.add_row({std::string(to_string(spec.backends[b])),
                       format_double(spec.lambdas[l]), str(trial),
                       format_double(err[(static_cast<std::size_t>(trial) * nb + b) * nl + l])});
  return table;
}

ResultTable summarize_forecast(const ResultTable &study) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  const auto bi = study.column_index("backend"), li = study.column_index("lambda"),
             ei = study.column_index("l2_error");
  for (const auto &row : study.rows()) {
    auto key = std::make_pair(row[bi], row[li]);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(parse_double(row[ei]));
  }
  ResultTable out({"backend", "lambda", "median_error"});
  for (const auto &key : order)
    out.add_row({key.first, key.second, format_double(median_of(groups[key]))});
  return out;
}

// ---- retrieval ----------------------------------------------------------

RetrievalMethod parse_retrieval_method(std::string_view name) {
  if (name == "dtw") return RetrievalMethod::dtw;
  if (name == "dtw+oti") return RetrievalMethod::dtw_oti;
  if (name == "dtw-gi-stiefel") return RetrievalMethod::dtw_gi_stiefel;
  if (name == "dtw-gi-oti") return RetrievalMethod::dtw_gi_oti;
  throw ConfigError("unknown retrieval method '" + std::string(name) +
                    "' (expected dtw, dtw+oti, dtw-gi-stiefel or dtw-gi-oti)");
}

std::string_view to_string(RetrievalMethod method) {
  switch (method) {
  case RetrievalMethod::dtw: return "dtw";
  case RetrievalMethod::dtw_oti: return "dtw+oti";
  case RetrievalMethod::dtw_gi_stiefel: return "dtw-gi-stiefel";
  case RetrievalMethod::dtw_gi_oti: return "dtw-gi-oti";
  }
  return "?";
}

int oti_index(const TimeSeries &x, const TimeSeries &y) {
  if (x.dims() != y.dims())
    throw DimensionError("transposition index needs equal dimensionality", x.dims(), y.dims());
  const Vector mx = x.values().colwise().mean();
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < x.dims(); ++k) {
    const Vector my = shift_coordinates(y, k).values().colwise().mean();
    const double s = mx.dot(my);
    if (s > best_score) {
      best_score = s;
      best = k;
    }
  }
  return best;
}

double retrieval_distance(RetrievalMethod method, const TimeSeries &query,
                          const TimeSeries &item, const SolverConfig &cfg) {
  switch (method) {
  case RetrievalMethod::dtw:
    return run_method(Method::dtw, query, item, Family::stiefel, cfg).cost;
  case RetrievalMethod::dtw_oti:
    return dtw(cost_matrix(query, shift_coordinates(item, oti_index(query, item)))).cost;
  case RetrievalMethod::dtw_gi_stiefel:
    return dtw_gi_bcd(query, item, Family::stiefel, cfg).cost;
  case RetrievalMethod::dtw_gi_oti: {
    // One restart per shift, so every transposition is tried as a start.
    SolverConfig c = cfg;
    c.restarts = static_cast<int>(query.dims());
    return dtw_gi_bcd(query, item, Family::transposition, c).cost;
  }
  }
  throw ConfigError("unknown retrieval method");
}

ResultTable retrieval(const std::vector<NamedSeries> &queries,
                      const std::vector<NamedSeries> &corpus, RetrievalMethod method,
                      const SolverConfig &cfg, unsigned threads) {
  if (corpus.empty()) throw ConfigError("retrieval needs a non-empty corpus");
  std::vector<std::size_t> active;
  std::vector<std::size_t> match;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto it = std::find_if(corpus.begin(), corpus.end(), [&](const NamedSeries &c) {
      return c.name == queries[q].name;
    });
    if (it == corpus.end()) continue;
    active.push_back(q);
    match.push_back(static_cast<std::size_t>(it - corpus.begin()));
  }
  const std::size_t n = corpus.size();
  std::vector<double> dist(active.size() * n);
  detail::parallel_for(dist.size(), threads, [&](std::size_t k) {
    dist[k] = retrieval_distance(method, queries[active[k / n]].series, corpus[k % n].series, cfg);
  });

  ResultTable table({"query", "rank", "recall_at_1", "recall_at_5", "recall_at_10"});
  const int ks[] = {1, 5, 10};
  double sum_rank = 0.0;
  double sum_recall[3] = {0, 0, 0};
  for (std::size_t a = 0; a < active.size(); ++a) {
    const double d_true = dist[a * n + match[a]];
    // Ties count against the true match.
    long long rank = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (j != match[a] && dist[a * n + j] <= d_true) ++rank;
    std::vector<std::string> row{queries[active[a]].name, str(rank)};
    for (int i = 0; i < 3; ++i) {
      const double hit = rank <= ks[i] ? 1.0 : 0.0;
      sum_recall[i] += hit;
      row.push_back(format_double(hit));
    }
    sum_rank += static_cast<double>(rank);
    table.add_row(std::move(row));
  }
  const double m = active.empty() ? 1.0 : static_cast<double>(active.size());
  table.add_row({"MEAN", format_double(sum_rank / m), format_double(sum_recall[0] / m),
                 format_double(sum_recall[1] / m), format_double(sum_recall[2] / m)});
  return table;
}

std::vector<NamedSeries> load_series_dir(const std::filesystem::path &dir,
                                         std::vector<std::string> &diagnostics) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto &e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<NamedSeries> out;
  for (const auto &f : files) {
    try {
      out.push_back({f.filename().string(), load_series(f)});
    } catch (const DataError &e) {
      diagnostics.push_back(f.string() + ": " + e.what());
    }
  }
  return out;
}

} // namespace dtwgi

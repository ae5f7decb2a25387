// Copyright 2026 The qsn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsn/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "qsn/cv_gaussian.hpp"
#include "qsn/echo_protocol.hpp"
#include "qsn/error.hpp"
#include "qsn/metrology_engine.hpp"
#include "qsn/noise_channels.hpp"
#include "qsn/parallel.hpp"
#include "qsn/probe_library.hpp"

namespace qsn {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out += format_number(v);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
              out += std::to_string(v);
            } else {
              out += v;
            }
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

Cell as_int(std::uint64_t x) { return static_cast<std::int64_t>(x); }

// Exact (or numerically averaged) channel used by the QFI oracle.
DensityMatrix oracle_channel(const Scenario& s, const DensityMatrix& rho, const NoiseModel& model) {
  switch (s.method.oracle_channel) {
    case OracleChannel::exact:
      if (rho.space().all_diagonal_generators()) return apply_exact_diagonal(rho, model).state;
      return apply_displacement_exact(rho, model, s.method.quadrature_points).state;
    case OracleChannel::quadrature:
      return apply_random_unitary_oracle(rho, model, GaussHermiteMethod{s.method.quadrature_points}).state;
    case OracleChannel::monte_carlo:
      return apply_random_unitary_oracle(rho, model, MonteCarloMethod{s.method.samples, s.method.seed}).state;
  }
  return rho;
}

TaskResult task_qfi(const Scenario& s, std::size_t threads) {
  const SpaceSpec space = build_space(s);
  const StateVector probe = build_probe(s.probe, space);
  const GeneratorMatrix H = generator_matrix(probe);
  const RMatrix v = build_v(s, space.num_sites());
  if (s.noise.background) fail(ErrorCode::ValidationError, "noise.background: only the rayleigh task uses a background");
  const double trace_vH = (v * H.H).trace();
  const double analytic = qfi_single(H, v);
  const DensityMatrix rho = DensityMatrix::from_pure(probe);

  TaskResult out;
  out.table.header = {"g", "trace_vH", "qfi_analytic"};
  if (s.method.oracle) out.table.header.insert(out.table.header.end(), {"qfi_oracle", "rel_deviation", "oracle_delta"});
  std::vector<QfiOracleResult> oracle(s.noise.g.size());
  if (s.method.oracle) {
    parallel_for(s.noise.g.size(), threads, [&](std::size_t i) {
      auto channel = [&](double g) { return oracle_channel(s, rho, NoiseModel::factored(std::abs(g), v)); };
      oracle[i] = qfi_oracle(channel, s.noise.g[i]);
    });
  }
  double worst = 0.0;
  PlotSeries series{"qfi_oracle", {}};
  for (std::size_t i = 0; i < s.noise.g.size(); ++i) {
    std::vector<Cell> row{s.noise.g[i], trace_vH, analytic};
    if (s.method.oracle) {
      const double dev = relative_deviation(analytic, oracle[i].value);
      worst = std::max(worst, dev);
      row.insert(row.end(), {oracle[i].value, dev, oracle[i].delta});
      series.points.emplace_back(s.noise.g[i], oracle[i].value);
    }
    out.table.rows.push_back(std::move(row));
  }
  out.summary = {{"qfi_analytic", analytic}, {"trace_vH", trace_vH}};
  if (s.method.oracle) {
    out.summary.emplace_back("max_rel_deviation", worst);
    out.plots.push_back(std::move(series));
  }
  return out;
}

TaskResult task_qfi_multi(const Scenario& s) {
  const SpaceSpec space = build_space(s);
  const StateVector probe = build_probe(s.probe, space);
  const GeneratorMatrix H = generator_matrix(probe);
  const std::size_t k = space.num_sites();
  const double g = s.noise.g.front();
  const RMatrix V = g * g * build_v(s, k);
  const RMatrix W = build_w(s, k);
  const CollectiveParameters cp = collective_parameters(V, W);
  const RMatrix F = qfi_matrix_multi(H, W, cp.correlation);

  TaskResult out;
  out.table.header = {"I", "J", "F_IJ", "C_IJ", "xi_I", "xi_J"};
  for (Eigen::Index i = 0; i < F.rows(); ++i) {
    for (Eigen::Index j = 0; j < F.cols(); ++j) {
      out.table.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j), F(i, j), cp.correlation(i, j),
                                cp.xi(i), cp.xi(j)});
    }
  }
  const double form = multi_quadratic_form(F, cp.xi);
  const double target = 4.0 * (V * H.H).trace();
  out.summary = {{"quadratic_form", form}, {"four_trace_VH", target}, {"identity_residual", std::abs(form - target)}};
  return out;
}

TaskResult task_echo(const Scenario& s, std::size_t threads) {
  const SpaceSpec space = build_space(s);
  const StateVector probe = build_probe(s.probe, space);
  const RMatrix v = build_v(s, space.num_sites());
  if (s.noise.background) fail(ErrorCode::ValidationError, "noise.background: only the rayleigh task uses a background");
  const EchoModel model(probe, NoiseModel::factored(1.0, v), s.method.backend);
  const std::string label(to_string(s.probe.family));
  MleOptions mle;
  mle.allow_saturation = s.method.allow_saturation;

  TaskResult out;
  out.table.header = {"seed", "nu", "g_true", "g_hat", "ci_lo", "ci_hi", "p1_model", "k1", "saturated"};
  PlotSeries variance{"variance_vs_g", {}};
  for (std::size_t gi = 0; gi < s.noise.g.size(); ++gi) {
    const double g = s.noise.g[gi];
    const std::vector<EchoRun> runs = run_echo_repetitions(model, label, g, s.method.shots,
                                                           repetition_seed(s.method.seed, gi), s.method.seeds, mle, threads);
    double mean = 0.0;
    for (const EchoRun& r : runs) {
      out.table.rows.push_back({as_int(r.seed), as_int(r.nu), r.g_true, r.estimate.g_hat, r.estimate.ci_lo,
                                r.estimate.ci_hi, r.p1_model, as_int(r.k1), static_cast<std::int64_t>(r.estimate.saturated)});
      mean += r.estimate.g_hat;
    }
    mean /= static_cast<double>(runs.size());
    double var = 0.0;
    for (const EchoRun& r : runs) var += (r.estimate.g_hat - mean) * (r.estimate.g_hat - mean);
    var = runs.size() > 1 ? var / static_cast<double>(runs.size() - 1) : 0.0;
    const std::string tag = "g[" + std::to_string(gi) + "].";
    out.summary.emplace_back(tag + "mean_g_hat", mean);
    out.summary.emplace_back(tag + "var_g_hat", var);
    out.summary.emplace_back(tag + "cramer_rao", 1.0 / (static_cast<double>(s.method.shots) * model.fisher_per_shot(g)));
    variance.points.emplace_back(g, var);
  }
  out.summary.emplace_back("qfi_analytic", 4.0 * model.trace_vH());
  out.plots.push_back(std::move(variance));
  return out;
}

TaskResult task_sweep_k(const Scenario& s, std::size_t threads) {
  const std::size_t count = s.sweep.k_max - s.sweep.k_min + 1;
  std::vector<std::pair<double, double>> values(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const std::size_t k = s.sweep.k_min + i;
    const SpaceSpec space = build_space(s, k);
    const RMatrix v = build_v(s, k);
    ProbeSpec ent = s.probe;
    ent.family = s.sweep.entangled;
    ProbeSpec sep = s.probe;
    sep.family = s.sweep.separable;
    values[i] = {qfi_single(generator_matrix(build_probe(ent, space)), v),
                 qfi_single(generator_matrix(build_probe(sep, space)), v)};
  });
  TaskResult out;
  out.table.header = {"K", "qfi_ent", "qfi_sep", "ratio"};
  PlotSeries ent{"qfi_ent", {}};
  PlotSeries sep{"qfi_sep", {}};
  for (std::size_t i = 0; i < count; ++i) {
    const auto k = static_cast<double>(s.sweep.k_min + i);
    out.table.rows.push_back({static_cast<std::int64_t>(s.sweep.k_min + i), values[i].first, values[i].second,
                              values[i].first / values[i].second});
    ent.points.emplace_back(k, values[i].first);
    sep.points.emplace_back(k, values[i].second);
  }
  out.plots = {std::move(ent), std::move(sep)};
  return out;
}

TaskResult task_rayleigh(const Scenario& s, std::size_t threads) {
  const SpaceSpec space = build_space(s);
  const StateVector probe = build_probe(s.probe, space);
  const GeneratorMatrix H = generator_matrix(probe);
  const RMatrix v = build_v(s, space.num_sites());
  const RankOneFactor f = rank_one_factor(v);
  const DensityMatrix rho = DensityMatrix::from_pure(probe);

  std::vector<RMatrix> backgrounds;
  std::vector<double> strengths;
  if (s.noise.background) {
    backgrounds.push_back(*s.noise.background);
    strengths.push_back(f.direction.dot(*s.noise.background * f.direction));
  } else {
    for (double s2 : s.noise.sigma2) {
      backgrounds.push_back(s2 * f.direction * f.direction.transpose());
      strengths.push_back(s2);
    }
  }
  const std::size_t ng = s.noise.g.size();
  const std::size_t ns = backgrounds.size();
  std::vector<QfiOracleResult> oracle(ng * ns);
  if (s.method.oracle) {
    parallel_for(ng * ns, threads, [&](std::size_t idx) {
      const RMatrix& sigma = backgrounds[idx % ns];
      auto channel = [&](double g) {
        return oracle_channel(s, rho, NoiseModel::factored(std::abs(g), v).with_background(sigma));
      };
      oracle[idx] = qfi_oracle(channel, s.noise.g[idx / ns]);
    });
  }

  TaskResult out;
  out.table.header = {"g", "sigma2", "signal", "factor", "qfi_cursed", "qfi_uncursed"};
  if (s.method.oracle) out.table.header.insert(out.table.header.end(), {"qfi_oracle", "rel_deviation"});
  const double uncursed = qfi_single(H, v);
  double worst = 0.0;
  for (std::size_t gi = 0; gi < ng; ++gi) {
    const double g = s.noise.g[gi];
    PlotSeries series{"factor_g" + std::to_string(gi), {}};
    for (std::size_t si = 0; si < ns; ++si) {
      const double signal = g * g * f.trace;
      const double cursed = qfi_rayleigh_single(g, v, backgrounds[si], H);
      std::vector<Cell> row{g, strengths[si], signal, cursed / uncursed, cursed, uncursed};
      if (s.method.oracle) {
        const double dev = relative_deviation(cursed, oracle[gi * ns + si].value);
        worst = std::max(worst, dev);
        row.insert(row.end(), {oracle[gi * ns + si].value, dev});
      }
      series.points.emplace_back(strengths[si], cursed / uncursed);
      out.table.rows.push_back(std::move(row));
    }
    out.plots.push_back(std::move(series));
  }
  out.summary = {{"qfi_uncursed", uncursed}};
  if (s.method.oracle) out.summary.emplace_back("max_rel_deviation", worst);
  return out;
}

TaskResult task_nogo(const Scenario& s, std::size_t threads) {
  const SpaceSpec space = build_space(s);
  const StateVector probe = build_probe(s.probe, space);
  const RMatrix v = build_v(s, space.num_sites());
  std::seed_seq seq{static_cast<std::uint32_t>(s.method.seed), static_cast<std::uint32_t>(s.method.seed >> 32)};
  std::mt19937_64 rng(seq);
  std::vector<PassiveNetwork> networks;
  for (std::size_t n = 0; n < s.nogo.networks; ++n) {
    networks.push_back(random_passive_network(space.num_sites(), s.nogo.layers, rng));
  }
  const double var_in = average_number_variance(probe);
  const double qfi_in = qfi_single(generator_matrix(probe), v);
  struct Row {
    double var_out, qfi_out, leakage;
  };
  std::vector<Row> rows(networks.size());
  parallel_for(networks.size(), threads, [&](std::size_t n) {
    const PassiveResult r = apply_passive_network(probe, networks[n]);
    rows[n] = {average_number_variance(r.state), qfi_single(generator_matrix(r.state), v), r.max_leakage};
  });
  TaskResult out;
  out.table.header = {"network", "var_in", "var_out", "abs_delta", "qfi_in", "qfi_out", "max_leakage"};
  double worst = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const double delta = std::abs(rows[n].var_out - var_in);
    worst = std::max(worst, delta);
    out.table.rows.push_back({static_cast<std::int64_t>(n), var_in, rows[n].var_out, delta, qfi_in, rows[n].qfi_out,
                              rows[n].leakage});
  }
  out.summary = {{"max_abs_delta", worst}, {"qfi_in", qfi_in}};
  return out;
}

TaskResult task_cv(const Scenario& s) {
  const AdvantageReport report =
      multiparam_advantage_report(s.cv.modes, s.cv.parameters, s.cv.nbar, s.cv.allocation, build_w(s, s.cv.modes));
  TaskResult out;
  out.table.header = {"parameter", "f_ent", "f_sep", "ratio", "ideal_ratio", "sep_bound", "ent_bound"};
  double worst = 0.0;
  for (const AdvantageRow& r : report.rows) {
    out.table.rows.push_back({static_cast<std::int64_t>(r.parameter), r.f_ent, r.f_sep, r.ratio, r.ideal_ratio, r.sep_bound,
                              r.ent_bound});
    worst = std::max(worst, std::abs(r.ratio / r.ideal_ratio - 1.0));
  }
  out.summary = {{"max_rel_gap_to_ideal", worst}};
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::ValidationError, "cannot write " + p.string());
  out << content;
}

std::string hex(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace

TaskResult compute_task(const Scenario& s, std::size_t threads) {
  switch (s.task) {
    case Task::qfi: return task_qfi(s, threads);
    case Task::qfi_multi: return task_qfi_multi(s);
    case Task::echo: return task_echo(s, threads);
    case Task::sweep_K: return task_sweep_k(s, threads);
    case Task::rayleigh: return task_rayleigh(s, threads);
    case Task::nogo_passive: return task_nogo(s, threads);
    case Task::cv_advantage: return task_cv(s);
  }
  return {};
}

RunArtifacts run_scenario(Scenario s, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (options.seed) s.method.seed = *options.seed;
  if (options.threads) s.method.threads = std::max<std::size_t>(1, *options.threads);

  RunArtifacts art;
  art.result = compute_task(s, s.method.threads);

  std::filesystem::create_directories(options.out_dir);
  art.csv = options.out_dir / (s.output + ".csv");
  art.resolved = options.out_dir / (s.output + ".resolved.toml");
  art.manifest = options.out_dir / (s.output + ".manifest.json");

  const std::string csv = format_csv(art.result.table);
  write_file(art.csv, csv);
  const std::string resolved = resolved_toml(s);
  write_file(art.resolved, resolved);

  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  outputs.push_back({{"file", art.csv.filename().string()}, {"fnv1a64", hex(fnv1a64(csv))}});
  outputs.push_back({{"file", art.resolved.filename().string()}, {"fnv1a64", hex(fnv1a64(resolved))}});
  if (s.plots) {
    for (const PlotSeries& series : art.result.plots) {
      std::string dat = "# " + series.name + "\n";
      for (const auto& [x, y] : series.points) dat += format_number(x) + ' ' + format_number(y) + '\n';
      const auto path = options.out_dir / (s.output + "." + series.name + ".dat");
      write_file(path, dat);
      art.plots.push_back(path);
      outputs.push_back({{"file", path.filename().string()}, {"fnv1a64", hex(fnv1a64(dat))}});
    }
  }

  nlohmann::ordered_json m;
  m["name"] = s.name;
  m["task"] = std::string(to_string(s.task));
  m["versions"] = {{"qsn", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"tomlplusplus", std::to_string(TOML_LIB_MAJOR) + "." + std::to_string(TOML_LIB_MINOR) + "." +
                                        std::to_string(TOML_LIB_PATCH)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__}};
  m["seed"] = s.method.seed;
  m["threads"] = s.method.threads;
  m["tolerances"] = {{"state_norm", 1e-12},        {"density_hermiticity", 1e-10}, {"density_trace", 1e-10},
                     {"density_min_eigenvalue", -1e-9}, {"psd", 1e-10},          {"orthogonality", 1e-10},
                     {"truncation_tail", 1e-10},   {"passive_leakage", 1e-8},       {"oracle_eigen_floor", 1e-12},
                     {"oracle_step_disagreement", 0.05}, {"weak_noise_guard", 0.1}, {"csv_significant_digits", 17}};
  m["source"] = s.source.string();
  m["scenario"] = nlohmann::ordered_json::parse(resolved_json(s));
  m["defaults_filled"] = s.defaults_filled;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, val] : art.result.summary) summary[k] = val;
  m["summary"] = summary;
  m["outputs"] = outputs;
  m["content_hash"] = hex(fnv1a64(m.dump()));
  m["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(art.manifest, m.dump(2) + "\n");
  return art;
}

}  // namespace qsn

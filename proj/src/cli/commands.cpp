#include "mfqp/cli/app.hpp"

#include "mfqp/cascade.hpp"
#include "mfqp/cli/output.hpp"
#include "mfqp/cli/svg.hpp"
#include "mfqp/empirical.hpp"
#include "mfqp/error.hpp"
#include "mfqp/fitting.hpp"
#include "mfqp/ingest.hpp"
#include "mfqp/mfa.hpp"
#include "mfqp/mrw.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace mfqp::cli {

namespace {

using nlohmann::json;

// Flags shared by every subcommand.
struct CommonOptions
{
  std::string out_dir;
  unsigned threads = 1;
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool svg_flag = true)
{
  cmd->add_option("--out", o.out_dir, "Output directory (default: $MFQP_OUT_DIR or .)");
  cmd->add_option("--threads", o.threads, "Worker threads for grid and ensemble loops")
    ->check(CLI::PositiveNumber);
  if (svg_flag)
    cmd->add_flag("--svg", o.svg, "Also write an SVG plot");
}

const CLI::Validator open_unit_interval(
  [](std::string& s) -> std::string {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || !(v > 0.0 && v < 1.0))
      return "value " + s + " must lie strictly between 0 and 1";
    return {};
  },
  "(0,1)");

struct GridOptions
{
  std::optional<double> x_min;
  std::optional<double> x_max;
  std::size_t n = 2001;
};

void add_grid(CLI::App* cmd, GridOptions& g)
{
  cmd->add_option("--x-min", g.x_min, "Left end of the evaluation grid");
  cmd->add_option("--x-max", g.x_max, "Right end of the evaluation grid");
  cmd->add_option("--n", g.n, "Number of grid points")->check(CLI::Range(3, 100000000));
}

Grid resolve_grid(const GridOptions& g, const CascadeParams& p, std::ostream& err)
{
  const double half = 8.0 * p.effective_sigma();
  const Grid grid(g.x_min.value_or(-half), g.x_max.value_or(half), g.n);
  if (!covers_effective_range(p, grid))
    err << "warning: grid does not cover +/-6 effective sigma ("
        << 6.0 * p.effective_sigma() << ")\n";
  return grid;
}

void write_path_csv(const std::filesystem::path& file, const Path& path)
{
  CsvWriter csv(file, {"t", "x", "dx"});
  for (std::size_t t = 1; t < path.cumulative.size(); ++t)
    csv.add(t).add(path.cumulative[t]).add(path.increments[t - 1]).end_row();
}

void write_curve_csv(const std::filesystem::path& file, const GridFunction& f, const char* column)
{
  CsvWriter csv(file, {"x", column});
  for (std::size_t i = 0; i < f.size(); ++i)
    csv.add(f.grid[i]).add(f[i]).end_row();
}

void write_potential_csv(const std::filesystem::path& file, const QuantumPotentialCurve& qp)
{
  CsvWriter csv(file, {"x", "u", "masked"});
  const auto& f = qp.potential;
  for (std::size_t i = 0; i < f.size(); ++i)
    csv.add(f.grid[i]).add(f[i]).add(qp.floor_mask[i] ? 1 : 0).end_row();
}

void write_plot(const std::filesystem::path& file,
                const PlotSpec& spec,
                std::vector<PlotSeries> series)
{
  write_text(file, render_line_plot(spec, series));
}

PlotSeries curve_series(std::string label, const GridFunction& f, std::vector<bool> skip = {})
{
  return {std::move(label), f.grid.points(), f.values, std::move(skip)};
}

json potential_summary(const QuantumPotentialCurve& qp)
{
  json maxima = json::array();
  for (auto i : potential_local_maxima(qp))
    maxima.push_back({{"x", qp.potential.grid[i]}, {"u", qp.potential[i]}});
  std::size_t masked = 0;
  for (bool m : qp.floor_mask)
    masked += m ? 1 : 0;
  return {{"local_maxima", maxima}, {"barrier", !maxima.empty()}, {"masked_points", masked}};
}

void write_structure_function(const std::filesystem::path& file, const StructureFunctionTable& t)
{
  CsvWriter csv(file, {"q", "tau", "m", "n"});
  for (std::size_t i = 0; i < t.qs.size(); ++i)
    for (std::size_t j = 0; j < t.taus.size(); ++j)
      csv.add(t.qs[i]).add(t.taus[j]).add(t.m[i][j]).add(t.n_samples[i][j]).end_row();
}

void write_xi(const std::filesystem::path& file, const XiMap& xi)
{
  CsvWriter csv(file, {"q", "xi", "stderr"});
  for (const auto& [q, e] : xi)
    csv.add(q).add(e.value).add(e.std_error).end_row();
}

json scaling_json(const ScalingFit& fit)
{
  const auto& p = fit.params;
  const double se_h = std::sqrt(p.covariance[0]);
  const double se_l2 = std::sqrt(p.covariance[3]);
  json xi = json::array();
  for (const auto& [q, e] : fit.xi)
    xi.push_back({{"q", q}, {"xi", e.value}, {"stderr", e.std_error}, {"r_squared", e.r_squared}});
  return {{"h_hat", p.hurst},
          {"lambda_hat", p.lambda},
          {"lambda_squared", p.lambda_squared},
          {"stderr", {{"h", se_h},
                      {"lambda_squared", se_l2},
                      {"lambda", p.lambda > 0.0 ? json(se_l2 / (2.0 * p.lambda)) : json(nullptr)}}},
          {"covariance_h_lambda2", p.covariance},
          {"fit_range", {fit.fit_range.first, fit.fit_range.second}},
          {"flags", {{"monofractal", p.monofractal},
                     {"hurst_out_of_range", fit.hurst_out_of_range},
                     {"weighted", p.weighted}}},
          {"xi", xi}};
}

// Structure-function analysis of one or more series with shared axes.
struct MfaSettings
{
  std::vector<double> qs = default_qs();
  std::optional<std::size_t> tau_min, tau_max, fit_min, fit_max;
  std::size_t tau_count = 20;
};

struct MfaResult
{
  StructureFunctionTable table;
  ScalingFit fit;
};

MfaResult run_mfa(const std::vector<std::vector<double>>& series,
                  const MfaSettings& s,
                  unsigned threads)
{
  std::size_t shortest = series.front().size();
  for (const auto& x : series)
    shortest = std::min(shortest, x.size());
  const auto def = default_fit_range(shortest);
  const std::pair<std::size_t, std::size_t> fit{s.fit_min.value_or(def.first),
                                                s.fit_max.value_or(def.second)};
  const auto taus =
    log_spaced_taus(s.tau_min.value_or(fit.first), s.tau_max.value_or(fit.second), s.tau_count);
  std::vector<StructureFunctionTable> tables;
  tables.reserve(series.size());
  for (const auto& x : series)
    tables.push_back(structure_function(x, s.qs, taus, threads));
  MfaResult r{pool_tables(tables), {}};
  r.fit = fit_scaling(r.table, fit);
  return r;
}

std::vector<double> cumulative_from_zero(std::span<const double> dx)
{
  std::vector<double> x(dx.size() + 1, 0.0);
  for (std::size_t i = 0; i < dx.size(); ++i)
    x[i + 1] = x[i] + dx[i];
  return x;
}

std::vector<double> read_numeric_column(const std::filesystem::path& path, const std::string& column)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::parse_error, "row 1: empty file " + path.string());
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string h;
    while (std::getline(ss, h, ','))
      header.push_back(h);
  }
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end())
    throw Error(ErrorCode::parse_error, "row 1: column '" + column + "' not in " + path.string());
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty())
      continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) {
      if (!std::getline(ss, cell, ','))
        throw Error(ErrorCode::parse_error, "row " + std::to_string(row) + ": too few columns");
    }
    double v = 0.0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc{} || r.ptr != cell.data() + cell.size())
      throw Error(ErrorCode::parse_error,
                  "row " + std::to_string(row) + ", column '" + column + "': bad number '" + cell + "'");
    values.push_back(v);
  }
  return values;
}

// Everything `analyze` and `reproduce fig2 --data` compute from one return series.
struct ReturnAnalysis
{
  ReturnSeries raw;
  ReturnSeries normalized;
  KdeResult kde;
  QuantumPotentialCurve potential;
  FitReport mle;
  MfaResult mfa;
};

struct AnalysisSettings
{
  std::optional<double> bandwidth;
  std::size_t grid_n = 801;
  double p_floor = default_p_floor;
  MfaSettings mfa;
};

ReturnAnalysis analyze_returns(const ReturnSeries& raw, const AnalysisSettings& s, unsigned threads)
{
  ReturnAnalysis a{raw, normalize(raw), {GridFunction(Grid(0, 1, 3), {0, 0, 0}),
                                         GridFunction(Grid(0, 1, 3), {0, 0, 0}), 0.0},
                   {GridFunction(Grid(0, 1, 3), {0, 0, 0}), {}, {}}, {}, {}};
  const auto& z = a.normalized.values;
  const double h = s.bandwidth.value_or(silverman_bandwidth(z));
  KdeConfig cfg{h, kde_grid(z, h, s.grid_n), threads};
  a.kde = kde_with_derivatives(a.normalized, cfg);
  a.potential = empirical_quantum_potential(a.normalized, cfg, s.p_floor);
  a.mle = fit_castaing(z, CascadeParams{0.2, 1.0});
  a.mfa = run_mfa({cumulative_from_zero(z)}, s.mfa, threads);
  return a;
}

json analysis_report(const ReturnAnalysis& a, const PriceSeries* prices)
{
  json j;
  j["schema"] = "mfqp.report";
  j["schema_version"] = 1;
  j["tool_version"] = MFQP_VERSION;
  j["source"] = a.raw.source_id;
  j["n_returns"] = a.raw.values.size();
  if (prices != nullptr) {
    j["n_prices"] = prices->closes.size();
    j["first_date"] = prices->dates.front();
    j["last_date"] = prices->dates.back();
  }
  j["sample_mean"] = a.normalized.mean_removed;
  j["sample_sd"] = a.normalized.scale_applied;
  j["castaing_mle"] = {{"lambda", a.mle.lambda_hat},
                       {"sigma0", a.mle.sigma0_hat},
                       {"stderr_lambda", a.mle.std_error[0]},
                       {"stderr_sigma0", a.mle.std_error[1]},
                       {"nll", a.mle.nll},
                       {"iterations", a.mle.iterations},
                       {"converged", a.mle.converged},
                       {"fitted_on", "normalized returns"}};
  j["scaling"] = scaling_json(a.mfa.fit);
  j["lambda_estimates"] = {{"likelihood", a.mle.lambda_hat}, {"structure_function", a.mfa.fit.params.lambda}};
  j["hurst"] = a.mfa.fit.params.hurst;
  j["monofractal"] = a.mfa.fit.params.monofractal;
  j["kde"] = {{"bandwidth", a.kde.bandwidth}, {"grid_points", a.kde.density.size()}};
  j["quantum_potential"] = potential_summary(a.potential);
  return j;
}

void write_analysis(RunManifest& m,
                    const std::string& prefix,
                    const ReturnAnalysis& a,
                    const PriceSeries* prices,
                    bool svg)
{
  {
    std::vector<std::string> header{"t", "r", "r_normalized"};
    if (prices != nullptr)
      header.insert(header.begin() + 1, "date");
    CsvWriter csv(m.artifact(prefix + "returns.csv"), header);
    for (std::size_t k = 0; k < a.raw.values.size(); ++k) {
      csv.add(k + 1);
      if (prices != nullptr)
        csv.add(std::string_view(prices->dates[k + 1]));
      csv.add(a.raw.values[k]).add(a.normalized.values[k]).end_row();
    }
  }
  write_curve_csv(m.artifact(prefix + "kde.csv"), a.kde.density, "p");
  write_potential_csv(m.artifact(prefix + "qp.csv"), a.potential);
  write_structure_function(m.artifact(prefix + "sf.csv"), a.mfa.table);
  write_xi(m.artifact(prefix + "xi.csv"), a.mfa.fit.xi);
  write_json(m.artifact(prefix + "report.json"), analysis_report(a, prices));
  if (!svg)
    return;
  std::vector<double> t(a.normalized.values.size());
  for (std::size_t k = 0; k < t.size(); ++k)
    t[k] = static_cast<double>(k + 1);
  write_plot(m.artifact(prefix + "returns.svg"),
             {"Normalized returns", "t (steps)", "r", std::nullopt, std::nullopt},
             {{"returns", t, a.normalized.values, {}}});
  write_plot(m.artifact(prefix + "kde.svg"),
             {"Return density (Gaussian KDE)", "x", "P(x)", std::nullopt, std::nullopt},
             {curve_series("KDE", a.kde.density)});
  write_plot(m.artifact(prefix + "qp.svg"),
             {"Empirical quantum potential", "x", "U = P''/P", std::nullopt, std::pair{-15.0, 15.0}},
             {curve_series("U", a.potential.potential, a.potential.floor_mask)});
}

json mfa_settings_json(const MfaSettings& s)
{
  json j{{"q", s.qs}, {"tau_count", s.tau_count}};
  if (s.tau_min) j["tau_min"] = *s.tau_min;
  if (s.tau_max) j["tau_max"] = *s.tau_max;
  if (s.fit_min) j["fit_min"] = *s.fit_min;
  if (s.fit_max) j["fit_max"] = *s.fit_max;
  return j;
}

void add_mfa_flags(CLI::App* cmd, MfaSettings& s)
{
  cmd->add_option("--q", s.qs, "Moment orders (nonzero)")->delimiter(',');
  cmd->add_option("--tau-min", s.tau_min, "Smallest lag in the table")->check(CLI::PositiveNumber);
  cmd->add_option("--tau-max", s.tau_max, "Largest lag in the table")->check(CLI::PositiveNumber);
  cmd->add_option("--tau-count", s.tau_count, "Number of log-spaced lags")->check(CLI::Range(4, 10000));
  cmd->add_option("--fit-min", s.fit_min, "Smallest lag used in the fit")->check(CLI::PositiveNumber);
  cmd->add_option("--fit-max", s.fit_max, "Largest lag used in the fit")->check(CLI::PositiveNumber);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Quantum potentials, multifractal random walks and scaling analysis of returns", "mfqp"};
  app.set_version_flag("--version", MFQP_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  std::function<void()> action;

  // pdf
  CascadeParams pdf_params;
  GridOptions pdf_grid;
  auto* pdf = app.add_subcommand("pdf", "Castaing log-normal mixture density on a grid");
  pdf->add_option("--lambda", pdf_params.lambda, "Non-Gaussianity lambda >= 0")
    ->required()
    ->check(CLI::NonNegativeNumber);
  pdf->add_option("--sigma0", pdf_params.sigma0, "Reference scale sigma0 > 0")
    ->check(CLI::PositiveNumber);
  add_grid(pdf, pdf_grid);
  add_common(pdf, common);
  pdf->callback([&] {
    action = [&] {
      const auto dir = resolve_output_dir(common.out_dir);
      RunManifest m("pdf", dir);
      const Grid grid = resolve_grid(pdf_grid, pdf_params, err);
      m.parameters() = {{"lambda", pdf_params.lambda}, {"sigma0", pdf_params.sigma0},
                        {"x_min", grid.x_min()}, {"x_max", grid.x_max()}, {"n", grid.size()}};
      const auto p = castaing_pdf(pdf_params, grid);
      write_curve_csv(m.artifact("pdf.csv"), p, "p");
      if (common.svg)
        write_plot(m.artifact("pdf.svg"),
                   {"Castaing density, lambda=" + format_double(pdf_params.lambda), "x", "P(x)",
                    std::nullopt, std::nullopt},
                   {curve_series("P", p)});
      m.write();
      out << "wrote " << (dir / "pdf.csv").string() << "\n";
    };
  });

  // qpotential
  CascadeParams qp_params;
  GridOptions qp_grid;
  double qp_floor = default_p_floor;
  auto* qpc = app.add_subcommand("qpotential", "Quantum potential U = P''/P of the Castaing density");
  qpc->add_option("--lambda", qp_params.lambda, "Non-Gaussianity lambda >= 0")
    ->required()
    ->check(CLI::NonNegativeNumber);
  qpc->add_option("--sigma0", qp_params.sigma0, "Reference scale sigma0 > 0")
    ->check(CLI::PositiveNumber);
  qpc->add_option("--p-floor", qp_floor, "Mask points where P falls below this value")
    ->check(CLI::PositiveNumber);
  add_grid(qpc, qp_grid);
  add_common(qpc, common);
  qpc->callback([&] {
    action = [&] {
      const auto dir = resolve_output_dir(common.out_dir);
      RunManifest m("qpotential", dir);
      const Grid grid = resolve_grid(qp_grid, qp_params, err);
      m.parameters() = {{"lambda", qp_params.lambda}, {"sigma0", qp_params.sigma0},
                        {"x_min", grid.x_min()}, {"x_max", grid.x_max()}, {"n", grid.size()},
                        {"p_floor", qp_floor}};
      const auto qp = quantum_potential(qp_params, grid, qp_floor);
      write_potential_csv(m.artifact("qp.csv"), qp);
      json summary = potential_summary(qp);
      summary["lambda"] = qp_params.lambda;
      summary["sigma0"] = qp_params.sigma0;
      write_json(m.artifact("qp_summary.json"), summary);
      if (common.svg)
        write_plot(m.artifact("qp.svg"),
                   {"Quantum potential, lambda=" + format_double(qp_params.lambda), "x",
                    "U = P''/P", std::nullopt, std::nullopt},
                   {curve_series("U", qp.potential, qp.floor_mask)});
      m.write();
      out << "wrote " << (dir / "qp.csv").string() << "\n";
    };
  });

  // synth
  MrwParams mrw;
  mrw.seed = 1;
  auto* synth = app.add_subcommand("synth", "Synthesize a multifractal random walk");
  synth->add_option("--lambda", mrw.lambda, "Intermittency lambda >= 0")->check(CLI::NonNegativeNumber);
  synth->add_option("--hurst", mrw.hurst, "Hurst exponent in (0,1)")->check(open_unit_interval);
  synth->add_option("--L", mrw.corr_length, "Correlation length in steps")->check(CLI::Range(2, 1 << 30));
  synth->add_option("--n", mrw.n_steps, "Number of increments")->check(CLI::Range(2, 1 << 30));
  synth->add_option("--sigma0", mrw.sigma0, "Increment scale")->check(CLI::PositiveNumber);
  synth->add_option("--seed", mrw.seed, "Random seed");
  add_common(synth, common);
  synth->callback([&] {
    action = [&] {
      const auto dir = resolve_output_dir(common.out_dir);
      RunManifest m("synth", dir);
      m.parameters() = {{"lambda", mrw.lambda}, {"hurst", mrw.hurst}, {"L", mrw.corr_length},
                        {"n", mrw.n_steps}, {"sigma0", mrw.sigma0}};
      m.set_seed(mrw.seed);
      const auto path = synthesize(mrw);
      write_path_csv(m.artifact("path.csv"), path);
      if (common.svg) {
        std::vector<double> t(path.cumulative.size());
        for (std::size_t k = 0; k < t.size(); ++k)
          t[k] = static_cast<double>(k);
        write_plot(m.artifact("path.svg"),
                   {"Multifractal random walk", "t (steps)", "X(t)", std::nullopt, std::nullopt},
                   {{"X", t, path.cumulative, {}}});
      }
      m.write();
      out << "wrote " << path.increments.size() << " increments to "
          << (dir / "path.csv").string() << "\n";
    };
  });

  // mfa
  std::vector<std::string> mfa_inputs;
  std::string mfa_column = "dx";
  bool mfa_levels = false;
  MfaSettings mfa_settings;
  auto* mfa = app.add_subcommand("mfa", "Structure functions and (H, lambda) estimation");
  mfa->add_option("--input", mfa_inputs, "CSV file(s); several files are pooled as an ensemble")
    ->required()
    ->check(CLI::ExistingFile);
  mfa->add_option("--column", mfa_column, "Column to analyse");
  mfa->add_flag("--levels", mfa_levels, "Column holds levels X(t) rather than increments");
  add_mfa_flags(mfa, mfa_settings);
  add_common(mfa, common, false);
  mfa->callback([&] {
    action = [&] {
      const auto dir = resolve_output_dir(common.out_dir);
      RunManifest m("mfa", dir);
      m.parameters() = mfa_settings_json(mfa_settings);
      m.parameters()["inputs"] = mfa_inputs;
      m.parameters()["column"] = mfa_column;
      m.parameters()["levels"] = mfa_levels;
      std::vector<std::vector<double>> series;
      for (const auto& f : mfa_inputs) {
        auto col = read_numeric_column(f, mfa_column);
        series.push_back(mfa_levels ? std::move(col) : cumulative_from_zero(col));
      }
      const auto r = run_mfa(series, mfa_settings, common.threads);
      write_structure_function(m.artifact("sf.csv"), r.table);
      write_xi(m.artifact("xi.csv"), r.fit.xi);
      auto fit = scaling_json(r.fit);
      fit["n_series"] = series.size();
      write_json(m.artifact("fit.json"), fit);
      m.write();
      out << "H = " << r.fit.params.hurst << ", lambda = " << r.fit.params.lambda
          << (r.fit.params.monofractal ? " (monofractal)" : "") << "\n";
    };
  });

  // analyze
  std::string prices_path;
  CsvSpec csv_spec;
  AnalysisSettings analysis;
  auto* analyze = app.add_subcommand("analyze", "Analyse a daily close-price CSV");
  analyze->add_option("--prices", prices_path, "Price CSV with date and close columns")->required();
  analyze->add_option("--date-column", csv_spec.date_column, "Date column name");
  analyze->add_option("--close-column", csv_spec.close_column, "Close column name");
  analyze->add_flag("--skip-missing", csv_spec.skip_missing, "Drop rows with a missing close");
  analyze->add_option("--bandwidth", analysis.bandwidth, "KDE bandwidth (default: Silverman)")
    ->check(CLI::PositiveNumber);
  analyze->add_option("--grid-n", analysis.grid_n, "KDE grid points")->check(CLI::Range(5, 10000000));
  analyze->add_option("--p-floor", analysis.p_floor, "Potential mask threshold")->check(CLI::PositiveNumber);
  add_mfa_flags(analyze, analysis.mfa);
  add_common(analyze, common);
  analyze->callback([&] {
    action = [&] {
      const auto dir = resolve_output_dir(common.out_dir);
      RunManifest m("analyze", dir);
      m.parameters() = {{"prices", prices_path},
                        {"date_column", csv_spec.date_column},
                        {"close_column", csv_spec.close_column},
                        {"skip_missing", csv_spec.skip_missing},
                        {"grid_n", analysis.grid_n},
                        {"p_floor", analysis.p_floor},
                        {"mfa", mfa_settings_json(analysis.mfa)}};
      if (analysis.bandwidth)
        m.parameters()["bandwidth"] = *analysis.bandwidth;
      const auto read = read_prices(prices_path, csv_spec);
      for (auto row : read.skipped_rows)
        err << "skipped row " << row << ": missing close\n";
      const auto a = analyze_returns(log_returns(read.prices), analysis, common.threads);
      write_analysis(m, "", a, &read.prices, common.svg);
      m.write();
      out << "lambda (likelihood) = " << a.mle.lambda_hat << ", sigma0 = " << a.mle.sigma0_hat
          << ", lambda (scaling) = " << a.mfa.fit.params.lambda << ", H = " << a.mfa.fit.params.hurst
          << "\n";
    };
  });

  // reproduce
  std::string figure;
  std::uint64_t repro_seed = 7;
  std::string repro_data;
  std::size_t fig1_n = 3201;
  double fig1_span = 16.0;
  auto* repro = app.add_subcommand("reproduce", "Regenerate the figure data sets");
  repro->add_option("figure", figure, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
  repro->add_option("--seed", repro_seed, "Random seed for the toy model");
  repro->add_option("--data", repro_data, "Daily close-price CSV for the real-data panels")
    ->check(CLI::ExistingFile);
  repro->add_option("--n", fig1_n, "fig1 grid points")->check(CLI::Range(5, 10000000));
  repro->add_option("--span", fig1_span, "fig1 grid half-width")->check(CLI::PositiveNumber);
  add_common(repro, common, false);
  repro->callback([&] {
    action = [&] {
      const auto dir = resolve_output_dir(common.out_dir);
      if (figure == "fig1") {
        RunManifest m("reproduce fig1", dir);
        m.parameters() = {{"figure", "fig1"}, {"n", fig1_n}, {"span", fig1_span}, {"sigma0", 1.0},
                          {"lambdas", {0.0, 0.1, 0.5, 0.9}}};
        const Grid grid(-fig1_span, fig1_span, fig1_n);
        const std::vector<double> lambdas{0.0, 0.1, 0.5, 0.9};
        std::vector<GridFunction> pdfs;
        std::vector<QuantumPotentialCurve> qps;
        for (double lam : lambdas) {
          pdfs.push_back(castaing_pdf({lam, 1.0}, grid));
          qps.push_back(quantum_potential({lam, 1.0}, grid));
        }
        auto label = [](double lam) {
          return lam == 0.0 ? std::string("gaussian") : "lambda_" + format_double(lam);
        };
        {
          std::vector<std::string> header{"x"};
          for (double lam : lambdas)
            header.push_back("p_" + label(lam));
          CsvWriter csv(m.artifact("fig1a.csv"), header);
          for (std::size_t i = 0; i < grid.size(); ++i) {
            csv.add(grid[i]);
            for (const auto& p : pdfs)
              csv.add(p[i]);
            csv.end_row();
          }
        }
        {
          std::vector<std::string> header{"x"};
          for (double lam : lambdas) {
            header.push_back("u_" + label(lam));
            header.push_back("masked_" + label(lam));
          }
          CsvWriter csv(m.artifact("fig1b.csv"), header);
          for (std::size_t i = 0; i < grid.size(); ++i) {
            csv.add(grid[i]);
            for (const auto& q : qps)
              csv.add(q.potential[i]).add(q.floor_mask[i] ? 1 : 0);
            csv.end_row();
          }
        }
        json curves = json::array();
        bool ordered = true;
        double prev = -1.0;
        for (std::size_t k = 0; k < lambdas.size(); ++k) {
          const double p5 = CastaingKernel({lambdas[k], 1.0}).density(5.0);
          ordered = ordered && p5 > prev;
          prev = p5;
          json c = potential_summary(qps[k]);
          c["lambda"] = lambdas[k];
          c["p_at_5"] = p5;
          curves.push_back(c);
        }
        write_json(m.artifact("fig1_summary.json"),
                   {{"sigma0", 1.0}, {"curves", curves}, {"tail_ordering_holds", ordered}});
        std::vector<PlotSeries> pa, pb;
        for (std::size_t k = 0; k < lambdas.size(); ++k) {
          const auto name = lambdas[k] == 0.0 ? std::string("Gaussian") : "lambda=" + format_double(lambdas[k]);
          pa.push_back(curve_series(name, pdfs[k]));
          pb.push_back(curve_series(name, qps[k].potential, qps[k].floor_mask));
        }
        write_plot(m.artifact("fig1a.svg"),
                   {"Cascade densities, sigma0=1", "x", "P(x)", std::pair{-6.0, 6.0}, std::nullopt}, pa);
        write_plot(m.artifact("fig1b.svg"),
                   {"Quantum potentials U = P''/P", "x", "U", std::pair{-fig1_span, fig1_span},
                    std::pair{-30.0, 30.0}},
                   pb);
        m.write();
        out << "wrote fig1 panels to " << dir.string() << "\n";
        return;
      }

      RunManifest m("reproduce fig2", dir);
      MrwParams toy;
      toy.lambda = 0.3;
      toy.hurst = 0.6;
      toy.corr_length = 2000;
      toy.n_steps = 100000;
      toy.sigma0 = 1.0;
      toy.seed = repro_seed;
      m.set_seed(repro_seed);
      m.parameters() = {{"figure", "fig2"}, {"lambda", toy.lambda}, {"hurst", toy.hurst},
                        {"L", toy.corr_length}, {"n", toy.n_steps}, {"sigma0", toy.sigma0},
                        {"data", repro_data.empty() ? json(nullptr) : json(repro_data)}};
      const auto path = synthesize(toy);
      write_path_csv(m.artifact("fig2_toy_path.csv"), path);
      {
        std::vector<double> t(path.cumulative.size());
        for (std::size_t k = 0; k < t.size(); ++k)
          t[k] = static_cast<double>(k);
        write_plot(m.artifact("fig2_toy_path.svg"),
                   {"MRW toy model (lambda=0.3, H=0.6, L=2000)", "t (steps)", "X(t)", std::nullopt,
                    std::nullopt},
                   {{"X", t, path.cumulative, {}}});
      }
      AnalysisSettings settings;
      ReturnSeries toy_returns{path.increments, "mrw-toy", false, 0.0, 1.0};
      write_analysis(m, "fig2_toy_", analyze_returns(toy_returns, settings, common.threads), nullptr,
                     true);
      if (repro_data.empty()) {
        out << "notice: no --data price file supplied; wrote toy-model panels only\n";
      } else {
        const auto read = read_prices(repro_data, CsvSpec{});
        write_analysis(m, "fig2_data_", analyze_returns(log_returns(read.prices), settings, common.threads),
                       &read.prices, true);
      }
      m.write();
      out << "wrote fig2 panels to " << dir.string() << "\n";
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty())
    reversed.pop_back(); // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << MFQP_VERSION << "\n";
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (action)
      action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_ok;
}

int run(int argc, const char* const* argv)
{
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace mfqp::cli

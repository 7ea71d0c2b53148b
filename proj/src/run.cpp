#include "qwflow/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "qwflow/analysis.hpp"
#include "qwflow/errors.hpp"
#include "qwflow/graph_model.hpp"
#include "qwflow/parallel.hpp"
#include "qwflow/reduced_dynamics.hpp"
#include "qwflow/series_io.hpp"
#include "qwflow/spectral.hpp"

namespace qwflow {

namespace {

using nlohmann::json;
using Params = std::map<std::string, std::string>;

class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

const std::vector<std::string> kCommon{"output", "format", "config"};

std::vector<std::string> with_common(std::vector<std::string> keys) {
  keys.insert(keys.end(), kCommon.begin(), kCommon.end());
  return keys;
}

int parse_int(const Params& p, const std::string& key) {
  const std::string& s = p.at(key);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("--" + key + ": expected an integer, got '" + s + "'");
  }
  return v;
}

double parse_real(const Params& p, const std::string& key) {
  const std::string& s = p.at(key);
  std::istringstream in(s);
  double v = 0.0;
  in >> v;
  if (!in || !in.eof() || !std::isfinite(v)) {
    throw UsageError("--" + key + ": expected a number, got '" + s + "'");
  }
  return v;
}

template <class T, class Parse>
std::vector<T> parse_list(const Params& p, const std::string& key, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(p.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    Params one{{key, item}};
    out.push_back(parse(one, key));
  }
  if (out.empty()) throw UsageError("--" + key + " must not be empty");
  return out;
}

Format output_format(const Params& p, bool csv_allowed) {
  const auto f = parse_format(p.at("format"));
  if (!f) throw UsageError("--format must be csv or json");
  if (*f == Format::Csv && !csv_allowed) throw UsageError("this command only emits json");
  return *f;
}

std::string default_eps_list() {
  std::string s;
  for (int k = 0; k < 8; ++k) {
    const double e = std::pow(10.0, -3.0 + k / 7.0);
    if (k) s += ',';
    s += format_double(e);
  }
  return s;
}

Params load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
  Params p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    p[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
  }
  return p;
}

Params resolve(const RunSpec& spec) {
  const auto& allowed = allowed_keys(spec.command);
  auto check_keys = [&](const Params& p, const std::string& where) {
    for (const auto& [k, v] : p) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        throw UsageError("unknown parameter '" + k + "' for " + command_name(spec.command) +
                         where);
      }
    }
  };
  check_keys(spec.params, "");

  Params merged;
  if (auto it = spec.params.find("config"); it != spec.params.end()) {
    Params file = load_config(it->second);
    if (file.count("config")) throw UsageError("config files cannot nest 'config'");
    check_keys(file, " in config file");
    merged = file;
  }
  for (const auto& [k, v] : spec.params) merged[k] = v;

  auto def = [&](const std::string& k, std::string v) { merged.try_emplace(k, std::move(v)); };
  const bool has_n = std::find(allowed.begin(), allowed.end(), "n") != allowed.end();
  if (has_n) def("n", "100");
  switch (spec.command) {
    case Command::Simulate:
    case Command::Reduced: {
      const double n = parse_int(merged, "n");
      def("t-max", std::to_string(static_cast<int>(std::floor(n * std::log(std::max(n, 1.0))))));
      if (spec.command == Command::Simulate) {
        def("marked", "0");
        def("tail-mode", "source-sink");
      }
      def("format", "csv");
      break;
    }
    case Command::Spectrum:
      def("eps-list", default_eps_list());
      def("format", "json");
      break;
    case Command::MixingTime:
      def("theta", "3");
      def("horizon-factor", "2");
      def("format", "json");
      break;
    case Command::Pulsation:
      def("t-max", merged.at("n"));
      def("window", "5");
      def("format", "json");
      break;
    case Command::Sweep:
      def("command", "mixing-time");
      def("n-list", "50,100,200,400");
      def("theta", "3");
      def("horizon-factor", "2");
      def("window", "5");
      def("jobs", "0");
      def("format", "json");
      break;
  }
  merged.erase("config");
  return merged;
}

json summary(Command c, const Params& params, json results, const std::string& method) {
  json p = json::object();
  for (const auto& [k, v] : params) p[k] = v;
  return {{"command", command_name(c)},
          {"params", p},
          {"results", std::move(results)},
          {"method", method},
          {"tool_version", kToolVersion}};
}

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

std::string run_simulate(const Params& p) {
  ModelConfig cfg;
  cfg.n_vertices = parse_int(p, "n");
  cfg.t_max = parse_int(p, "t-max");
  cfg.marked = parse_int(p, "marked");
  const std::string& mode = p.at("tail-mode");
  if (mode == "source-sink") {
    cfg.tail_mode = TailMode::SourceSink;
  } else if (mode == "truncated") {
    cfg.tail_mode = TailMode::TruncatedTails;
  } else {
    throw UsageError("--tail-mode must be source-sink or truncated");
  }
  const Format fmt = output_format(p, true);
  cfg.validate();

  const FullRun run = evolve(cfg);
  if (fmt == Format::Csv) return series_to_csv(run.series);
  json results = series_to_json(run.series);
  results["max_class_deviation"] = run.max_class_deviation;
  results["max_imag"] = run.max_imag;
  return summary(Command::Simulate, p, results, "full").dump(2) + "\n";
}

std::string run_reduced(const Params& p) {
  const int n = parse_int(p, "n");
  const int t_max = parse_int(p, "t-max");
  const Format fmt = output_format(p, true);
  if (t_max < 0) throw UsageError("--t-max must be >= 0");
  const TimeSeries series = reduced_series(Epsilon::from_vertices(n), t_max);
  if (fmt == Format::Csv) return series_to_csv(series);
  return summary(Command::Reduced, p, series_to_json(series), "reduced").dump(2) + "\n";
}

std::string run_spectrum(const Params& p) {
  output_format(p, false);
  const int n = parse_int(p, "n");
  const auto eps_list = parse_list<double>(p, "eps-list", parse_real);
  const Epsilon eps = Epsilon::from_vertices(n);
  const SpectralDecomp d = decompose(eps);
  const ReducedState inf = stationary_state(eps);

  json eig = json::array();
  for (Branch b : {Branch::Minus1, Branch::Plus1Pos, Branch::Plus1Neg}) {
    const cd l = d.eigenvalue(b);
    json proj = json::array();
    const Mat3c& pm = d.projection(b);
    for (int i = 0; i < 3; ++i) {
      json row = json::array();
      for (int j = 0; j < 3; ++j) row.push_back(complex_json(pm(i, j)));
      proj.push_back(row);
    }
    eig.push_back({{"branch", to_string(b)},
                   {"value", complex_json(l)},
                   {"modulus", std::abs(l)},
                   {"projection", proj}});
  }
  json fits = json::array();
  for (Branch b : {Branch::Minus1, Branch::Plus1Pos, Branch::Plus1Neg}) {
    const PerturbationFit f = fit_perturbation(b, eps_list);
    fits.push_back({{"branch", to_string(b)},
                    {"coeff1", complex_json(f.coeff1)},
                    {"coeff2", complex_json(f.coeff2)},
                    {"residual", f.residual},
                    {"target1", complex_json(f.target1)},
                    {"target2", complex_json(f.target2)}});
  }
  json results = {{"n", n},
                  {"eps", eps.value()},
                  {"eigenvalues", eig},
                  {"spectral_radius", d.spectral_radius()},
                  {"spectral_period", spectral_period(d)},
                  {"stationary_alpha", {inf.alpha(0), inf.alpha(1), inf.alpha(2)}},
                  {"mu_marked", *nu_marked(inf)},
                  {"fits", fits}};
  return summary(Command::Spectrum, p, results, "closed-form").dump(2) + "\n";
}

json mixing_json(const MixingResult& m) {
  const double nlogn = m.n_vertices * std::log(static_cast<double>(m.n_vertices));
  return {{"n", m.n_vertices},
          {"theta", m.theta},
          {"t_theta", m.t_theta},
          {"horizon", m.horizon_used},
          {"converged", m.converged},
          {"certified_from", m.certified_from},
          {"n_log_n", nlogn},
          {"ratio", m.t_theta / nlogn}};
}

std::string run_mixing(const Params& p) {
  output_format(p, false);
  const MixingResult m =
      mixing_time(parse_int(p, "n"), parse_real(p, "theta"), parse_real(p, "horizon-factor"));
  return summary(Command::MixingTime, p, mixing_json(m), "reduced").dump(2) + "\n";
}

struct PulsationSummary {
  int n = 0;
  int t_max = 0;
  TimeSeries series;
  PulsationReport report;
  double spectral_period = 0.0;
  double formula_max_error = 0.0;
};

PulsationSummary pulsation_summary(int n, int t_max, int window) {
  if (t_max < n) throw UsageError("pulsation needs --t-max >= N");
  PulsationSummary s;
  s.n = n;
  s.t_max = t_max;
  const Epsilon eps = Epsilon::from_vertices(n);
  s.series = reduced_series(eps, t_max);
  s.report = detect_peaks(s.series, window);
  s.spectral_period = spectral_period(decompose(eps));
  s.formula_max_error = compare_pulsation_formula(n, n);
  return s;
}

json pulsation_json(const PulsationSummary& s) {
  return {{"n", s.n},
          {"t_max", s.t_max},
          {"peak_times", s.report.peak_times},
          {"peak_values", s.report.peak_values},
          {"first_peak", s.report.peak_times.empty() ? json(nullptr)
                                                     : json(s.report.peak_times.front())},
          {"fitted_period", s.report.fitted_period ? json(*s.report.fitted_period)
                                                   : json(nullptr)},
          {"predicted_period", s.report.predicted_period},
          {"predicted_first_peak", s.report.predicted_first_peak},
          {"spectral_period", s.spectral_period},
          {"formula_max_error", s.formula_max_error}};
}

std::string run_pulsation(const Params& p) {
  const Format fmt = output_format(p, true);
  const int n = parse_int(p, "n");
  const PulsationSummary s = pulsation_summary(n, parse_int(p, "t-max"), parse_int(p, "window"));
  if (fmt == Format::Json) {
    return summary(Command::Pulsation, p, pulsation_json(s), "reduced").dump(2) + "\n";
  }
  std::string csv = "t,nu_marked,formula,smoothed\n";
  for (const auto& r : s.series.records) {
    csv += std::to_string(r.t) + ',' + format_double(r.nu_marked) + ',' +
           format_double(pulsation_formula(r.t, n)) + ',' +
           format_double(s.report.smoothed[r.t]) + '\n';
  }
  return csv;
}

std::string run_sweep(const Params& p) {
  const Format fmt = output_format(p, true);
  const auto target = parse_command(p.at("command"));
  const auto ns = parse_list<int>(p, "n-list", parse_int);
  const int jobs = parse_int(p, "jobs");
  if (jobs < 0) throw UsageError("--jobs must be >= 0");

  if (target == Command::MixingTime) {
    const ScalingReport rep = mixing_scaling(ns, parse_real(p, "theta"),
                                             parse_real(p, "horizon-factor"),
                                             static_cast<unsigned>(jobs));
    if (fmt == Format::Csv) {
      std::string csv = "n,t_theta,horizon,converged,n_log_n,ratio\n";
      for (const auto& r : rep.rows) {
        csv += std::to_string(r.result.n_vertices) + ',' + std::to_string(r.result.t_theta) + ',' +
               std::to_string(r.result.horizon_used) + ',' + (r.result.converged ? "1" : "0") +
               ',' + format_double(r.n_log_n) + ',' + format_double(r.ratio) + '\n';
      }
      return csv;
    }
    json rows = json::array();
    for (const auto& r : rep.rows) rows.push_back(mixing_json(r.result));
    json results = {{"rows", rows},
                    {"mean_ratio", rep.mean_ratio},
                    {"max_relative_deviation", rep.max_relative_deviation},
                    {"superlinear", rep.superlinear}};
    return summary(Command::Sweep, p, results, "reduced").dump(2) + "\n";
  }

  if (target == Command::Pulsation) {
    std::vector<int> sorted = ns;
    std::sort(sorted.begin(), sorted.end());
    const int window = parse_int(p, "window");
    const auto rows = parallel_map<PulsationSummary>(
        sorted.size(), static_cast<unsigned>(jobs),
        [&](std::size_t i) { return pulsation_summary(sorted[i], sorted[i], window); });
    if (fmt == Format::Csv) {
      std::string csv = "n,first_peak,fitted_period,spectral_period,formula_max_error\n";
      for (const auto& s : rows) {
        csv += std::to_string(s.n) + ',' +
               (s.report.peak_times.empty() ? "nan" : std::to_string(s.report.peak_times[0])) +
               ',' + format_double(s.report.fitted_period.value_or(kUndefined)) + ',' +
               format_double(s.spectral_period) + ',' + format_double(s.formula_max_error) + '\n';
      }
      return csv;
    }
    json arr = json::array();
    for (const auto& s : rows) {
      json j = pulsation_json(s);
      j.erase("peak_times");
      j.erase("peak_values");
      arr.push_back(j);
    }
    return summary(Command::Sweep, p, json{{"rows", arr}}, "reduced").dump(2) + "\n";
  }
  throw UsageError("--command for sweep must be mixing-time or pulsation");
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "reduced") return Command::Reduced;
  if (name == "spectrum") return Command::Spectrum;
  if (name == "mixing-time") return Command::MixingTime;
  if (name == "pulsation") return Command::Pulsation;
  if (name == "sweep") return Command::Sweep;
  return std::nullopt;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Simulate:
      return "simulate";
    case Command::Reduced:
      return "reduced";
    case Command::Spectrum:
      return "spectrum";
    case Command::MixingTime:
      return "mixing-time";
    case Command::Pulsation:
      return "pulsation";
    case Command::Sweep:
      return "sweep";
  }
  return "?";
}

const std::vector<std::string>& allowed_keys(Command c) {
  static const std::vector<std::string> simulate =
      with_common({"n", "t-max", "marked", "tail-mode"});
  static const std::vector<std::string> reduced = with_common({"n", "t-max"});
  static const std::vector<std::string> spectrum = with_common({"n", "eps-list"});
  static const std::vector<std::string> mixing = with_common({"n", "theta", "horizon-factor"});
  static const std::vector<std::string> pulsation = with_common({"n", "t-max", "window"});
  static const std::vector<std::string> sweep =
      with_common({"command", "n-list", "theta", "horizon-factor", "window", "jobs"});
  switch (c) {
    case Command::Simulate:
      return simulate;
    case Command::Reduced:
      return reduced;
    case Command::Spectrum:
      return spectrum;
    case Command::MixingTime:
      return mixing;
    case Command::Pulsation:
      return pulsation;
    case Command::Sweep:
      return sweep;
  }
  return simulate;
}

ExitCode run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const Params p = resolve(spec);
    std::string text;
    switch (spec.command) {
      case Command::Simulate:
        text = run_simulate(p);
        break;
      case Command::Reduced:
        text = run_reduced(p);
        break;
      case Command::Spectrum:
        text = run_spectrum(p);
        break;
      case Command::MixingTime:
        text = run_mixing(p);
        break;
      case Command::Pulsation:
        text = run_pulsation(p);
        break;
      case Command::Sweep:
        text = run_sweep(p);
        break;
    }
    if (auto it = p.find("output"); it != p.end()) {
      write_text_file(it->second, text);
    } else {
      out << text;
    }
    return ExitCode::Ok;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return ExitCode::Io;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return ExitCode::Usage;
  } catch (const std::out_of_range& e) {
    err << "usage error: missing parameter (" << e.what() << ")\n";
    return ExitCode::Usage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return ExitCode::Numeric;
  }
}

}  // namespace qwflow

#include "qwflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qwflow/errors.hpp"
#include "qwflow/parallel.hpp"
#include "qwflow/reduced_dynamics.hpp"
#include "qwflow/spectral.hpp"

namespace qwflow {

LimitDistribution limit_marked_probability(int n_vertices) {
  const Epsilon eps = Epsilon::from_vertices(n_vertices);
  const ReducedState inf = stationary_state(eps);
  const double marked = *nu_marked(inf);
  return {marked, (1.0 - marked) / (n_vertices - 1)};
}

MixingResult mixing_time(int n_vertices, double theta, double horizon_factor) {
  if (!(theta > 0.0)) throw ConfigError("theta must be > 0");
  if (!(horizon_factor >= 2.0)) throw ConfigError("horizon_factor must be >= 2");
  const Epsilon eps = Epsilon::from_vertices(n_vertices);
  const double n = n_vertices;
  const int horizon = static_cast<int>(std::ceil(horizon_factor * n * std::log(n)));
  const double threshold = std::exp(-theta);

  const SpectralDecomp decomp = decompose(eps);
  const Vec3 b = b_vector(eps);
  std::array<double, 3> coeff{};
  std::array<double, 3> modulus{};
  for (int k = 0; k < 3; ++k) {
    const cd lam = decomp.eigenvalues[k];
    coeff[k] = (decomp.projections[k] * b.cast<cd>() / (1.0 - lam)).norm();
    modulus[k] = std::abs(lam);
  }
  auto tail_bound = [&](int t) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += coeff[k] * std::pow(modulus[k], t);
    return s;
  };

  MixingResult res;
  res.n_vertices = n_vertices;
  res.theta = theta;
  res.horizon_used = horizon;
  res.certified_from = horizon + 1;
  for (int t = 0; t <= horizon; ++t) {
    if (tail_bound(t) < threshold) {
      res.certified_from = t;
      break;
    }
  }
  res.converged = res.certified_from <= horizon;

  // e_t = alpha_inf - alpha_t evolves as e_{t+1} = T e_t.
  const Mat3 tm = t_matrix(eps);
  Vec3 err = stationary_state(eps).alpha;
  const int scan_end = std::min(horizon, res.certified_from);
  int last_fail = -1;
  for (int t = 0; t <= scan_end; ++t) {
    if (err.norm() >= threshold) last_fail = t;
    err = tm * err;
  }
  res.t_theta = std::max(last_fail, 0);
  return res;
}

ScalingReport mixing_scaling(std::span<const int> n_list, double theta, double horizon_factor,
                             unsigned jobs) {
  if (n_list.empty()) throw ConfigError("n-list must not be empty");
  std::vector<int> ns(n_list.begin(), n_list.end());
  std::sort(ns.begin(), ns.end());

  ScalingReport report;
  report.rows = parallel_map<ScalingRow>(ns.size(), jobs, [&](std::size_t i) {
    ScalingRow row;
    row.result = mixing_time(ns[i], theta, horizon_factor);
    const double n = ns[i];
    row.n_log_n = n * std::log(n);
    row.ratio = row.result.t_theta / row.n_log_n;
    return row;
  });

  double sum = 0.0;
  for (const auto& r : report.rows) sum += r.ratio;
  report.mean_ratio = sum / report.rows.size();
  for (const auto& r : report.rows) {
    report.max_relative_deviation = std::max(
        report.max_relative_deviation, std::abs(r.ratio - report.mean_ratio) / report.mean_ratio);
  }
  report.superlinear = report.rows.size() >= 2;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& a = report.rows[i - 1].result;
    const auto& b = report.rows[i].result;
    if (!(static_cast<double>(b.t_theta) / b.n_vertices >
          static_cast<double>(a.t_theta) / a.n_vertices)) {
      report.superlinear = false;
    }
  }
  return report;
}

double pulsation_formula(double t, int n_vertices) {
  if (t < 0) throw ConfigError("pulsation_formula needs t >= 0");
  if (n_vertices < 1) throw ConfigError("pulsation_formula needs N >= 1");
  const double n = n_vertices;
  const double c = std::exp(-2.5 * t / n);
  const double x = 1.0 - c * std::cos(t * std::sqrt(2.0 / n));
  return 0.5 * x * x / (1.0 + c * c);
}

namespace {

std::vector<double> moving_average(std::span<const double> v, int window) {
  std::vector<double> out(v.begin(), v.end());
  if (window <= 1) return out;
  const int half = window / 2;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    int c = 0;
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      if (!std::isnan(v[j])) {
        s += v[j];
        ++c;
      }
    }
    out[i] = c ? s / c : kUndefined;
  }
  return out;
}

}  // namespace

PulsationReport detect_peaks(std::span<const double> values, int n_vertices, int window) {
  if (n_vertices < 3) throw ConfigError("detect_peaks needs N >= 3");
  if (static_cast<int>(values.size()) < n_vertices + 1) {
    throw ConfigError("series must cover t <= N (" + std::to_string(n_vertices) + ")");
  }
  const double eps = std::sqrt(2.0 / n_vertices);

  PulsationReport rep;
  rep.window = std::max(1, window);
  rep.predicted_period = 2.0 * std::numbers::pi / eps;
  rep.predicted_first_peak = std::numbers::pi / eps;
  rep.smoothed = moving_average(values, rep.window);

  const int n = static_cast<int>(values.size());
  for (int i = 1; i + 1 < n; ++i) {
    if (!(values[i] > values[i - 1])) continue;
    int j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    if (j + 1 < n && values[j + 1] < values[i]) {
      rep.peak_times.push_back(i);
      rep.peak_values.push_back(values[i]);
    }
    i = j;
  }

  std::vector<int> early;
  for (int t : rep.peak_times) {
    if (t <= n_vertices) early.push_back(t);
  }
  if (early.size() >= 2) {
    rep.fitted_period = static_cast<double>(early.back() - early.front()) / (early.size() - 1);
  }
  return rep;
}

PulsationReport detect_peaks(const TimeSeries& series, int window) {
  const auto v = series.nu_marked();
  return detect_peaks(v, series.n_vertices, window);
}

double compare_pulsation_formula(int n_vertices, int t_max) {
  if (t_max < 0 || t_max > n_vertices) {
    throw ConfigError("compare_pulsation_formula needs 0 <= t_max <= N");
  }
  const Epsilon eps = Epsilon::from_vertices(n_vertices);
  const Mat3 tm = t_matrix(eps);
  const Vec3 b = b_vector(eps);
  ReducedState st;
  double worst = 0.0;
  for (int t = 0; t <= t_max; ++t) {
    const double exact = nu_marked(st).value_or(0.0);
    worst = std::max(worst, std::abs(exact - pulsation_formula(t, n_vertices)));
    st = {tm * st.alpha + b, t + 1};
  }
  return worst;
}

std::vector<double> window_amplitudes(std::span<const double> values, int start, int width) {
  if (width < 1 || start < 0) throw ConfigError("window_amplitudes needs start >= 0, width >= 1");
  std::vector<double> amps;
  const int n = static_cast<int>(values.size());
  for (int lo = start; lo + width <= n; lo += width) {
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (int t = lo; t < lo + width; ++t) {
      if (std::isnan(values[t])) continue;
      mx = std::max(mx, values[t]);
      mn = std::min(mn, values[t]);
    }
    amps.push_back(mx >= mn ? mx - mn : kUndefined);
  }
  return amps;
}

DecayRates decay_rates(int n_vertices, int early_lo, int early_hi, int late_lo, int late_hi) {
  if (!(0 <= early_lo && early_lo < early_hi && early_hi <= late_lo && late_lo < late_hi)) {
    throw ConfigError("decay_rates needs ordered, non-empty windows");
  }
  const Epsilon eps = Epsilon::from_vertices(n_vertices);
  const Mat3 tm = t_matrix(eps);
  Vec3 err = stationary_state(eps).alpha;

  std::vector<double> log_d(static_cast<std::size_t>(late_hi) + 1);
  for (int t = 0; t <= late_hi; ++t) {
    log_d[t] = std::log(err.norm());
    err = tm * err;
  }
  auto slope = [&](int lo, int hi) {
    const double m = hi - lo + 1;
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (int t = lo; t <= hi; ++t) {
      st += t;
      sy += log_d[t];
      stt += static_cast<double>(t) * t;
      sty += t * log_d[t];
    }
    return (m * sty - st * sy) / (m * stt - st * st);
  };

  const SpectralDecomp d = decompose(eps);
  DecayRates r;
  r.early = -slope(early_lo, early_hi) / eps.squared();
  r.late = -slope(late_lo, late_hi) / eps.squared();
  r.spectral_pair = -std::log(std::abs(d.eigenvalue(Branch::Plus1Pos))) / eps.squared();
  r.spectral_minus = -std::log(std::abs(d.eigenvalue(Branch::Minus1))) / eps.squared();
  return r;
}

}  // namespace qwflow

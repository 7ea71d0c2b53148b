#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qwflow/time_series.hpp"

namespace qwflow {

struct LimitDistribution {
  double marked = 0.0;        // mu_N(u_*)
  double per_unmarked = 0.0;  // (1 - mu_N(u_*)) / (N - 1)
};

// Limit distribution evaluated at the exact stationary fixed point.
LimitDistribution limit_marked_probability(int n_vertices);

struct MixingResult {
  int n_vertices = 0;
  double theta = 0.0;
  int t_theta = 0;         // last t with d_t >= e^{-theta}; a lower bound if !converged
  int horizon_used = 0;    // ceil(horizon_factor * N ln N)
  int certified_from = 0;  // first t where the spectral tail bound drops below e^{-theta}
  bool converged = false;
};

// l2 mixing time of the internal state, d_t = ||alpha_inf - alpha_t||.
// The infinite tail "for all t > s" is certified by the bound
// d_t <= sum_i |lambda_i|^t ||P_i b / (1 - lambda_i)||.
MixingResult mixing_time(int n_vertices, double theta, double horizon_factor = 2.0);

struct ScalingRow {
  MixingResult result;
  double n_log_n = 0.0;
  double ratio = 0.0;  // t_theta / (N ln N)
};

struct ScalingReport {
  std::vector<ScalingRow> rows;  // sorted by N
  double mean_ratio = 0.0;
  double max_relative_deviation = 0.0;  // max |ratio - mean| / mean
  bool superlinear = false;             // t_theta / N strictly increasing in N
};

// Independent per-N runs fanned out over `jobs` worker threads (0: hardware
// concurrency).
ScalingReport mixing_scaling(std::span<const int> n_list, double theta,
                             double horizon_factor = 2.0, unsigned jobs = 0);

// (1/2) (1 - c_t cos(t sqrt(2/N)))^2 / (1 + c_t^2), c_t = exp(-(5/2) t / N)
double pulsation_formula(double t, int n_vertices);

struct PulsationReport {
  std::vector<int> peak_times;
  std::vector<double> peak_values;
  std::optional<double> fitted_period;  // mean gap of consecutive peaks with t <= N
  double predicted_period = 0.0;        // 2 pi / eps
  double predicted_first_peak = 0.0;    // pi / eps
  int window = 1;
  std::vector<double> smoothed;         // centered moving average, reporting only
};

// Strict interior local maxima of the raw series; a plateau counts once, at
// its earliest index. values[k] is the value at t = k; NaN entries never peak.
PulsationReport detect_peaks(std::span<const double> values, int n_vertices, int window);
PulsationReport detect_peaks(const TimeSeries& series, int window);

// max_{t <= t_max} |nu_t(u_*) - pulsation_formula(t, N)| with the exact side
// from the reduced recursion (nu_0 taken as 0).
double compare_pulsation_formula(int n_vertices, int t_max);

// max - min of the values over consecutive full windows [start + k w, start + (k+1) w).
std::vector<double> window_amplitudes(std::span<const double> values, int start, int width);

struct DecayRates {
  double early = 0.0;  // -slope of log d_t over the early window, in units of eps^2
  double late = 0.0;
  double spectral_pair = 0.0;   // -log|lambda_{1,+}| / eps^2
  double spectral_minus = 0.0;  // -log|lambda_{-1}| / eps^2
};

// Least-squares slopes of log d_t over [early_lo, early_hi] and [late_lo, late_hi].
DecayRates decay_rates(int n_vertices, int early_lo, int early_hi, int late_lo, int late_hi);

}  // namespace qwflow

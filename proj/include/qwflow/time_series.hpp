#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qwflow {

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// One time step of a run. Quantities that are undefined at a given step
// (e.g. the normalized probabilities at t = 0) hold NaN.
struct StepRecord {
  int t = 0;
  double nu_marked = kUndefined;
  double nu_unmarked = kUndefined;  // per unmarked vertex, all equal by symmetry
  double norm_kn = 0.0;             // ||Psi_t||_{K_N} == ||alpha_t||
  double dist_stationary = kUndefined;
  std::array<double, 3> class_values{};  // (a_t, b_t, c_t)
};

struct TimeSeries {
  std::string method;  // "full", "reduced" or "closed-form"
  int n_vertices = 0;
  std::vector<StepRecord> records;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }

  std::vector<double> nu_marked() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.nu_marked);
    return out;
  }
};

}  // namespace qwflow

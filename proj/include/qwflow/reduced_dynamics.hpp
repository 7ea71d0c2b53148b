#pragma once

// Three-dimensional invariant subspace of the walk: the arc amplitudes are
// constant on A_+ (into u_*), A_- (out of u_*) and A_0 (avoiding u_*), so the
// internal state is captured by the class values (a, b, c), or by
// alpha = diag(sqrt(N-1), sqrt(N-1), sqrt((N-1)(N-2))) (a, b, c) whose
// Euclidean norm equals the l2 norm over internal arcs.

#include <optional>

#include <Eigen/Dense>

#include "qwflow/time_series.hpp"

namespace qwflow {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Perturbation parameter eps = sqrt(2/N). Stores N alongside so class
// weights use the exact vertex count; from_value() gives the effective
// (generally non-integer) N = 2/eps^2 for parameter sweeps.
class Epsilon {
 public:
  static Epsilon from_vertices(int n_vertices);
  static Epsilon from_value(double eps);

  double value() const { return value_; }
  double squared() const { return squared_; }
  double n_effective() const { return n_; }
  std::optional<int> n_vertices() const { return vertices_; }

 private:
  Epsilon(double value, double squared, double n, std::optional<int> vertices)
      : value_(value), squared_(squared), n_(n), vertices_(vertices) {}

  double value_;
  double squared_;
  double n_;
  std::optional<int> vertices_;
};

struct ReducedState {
  Vec3 alpha = Vec3::Zero();
  int time = 0;
};

// T(eps). Accepts eps = 0, where it reduces to the unperturbed matrix.
Mat3 t_matrix(double eps);
Mat3 t_matrix(const Epsilon& eps);

Vec3 b_vector(double eps);
Vec3 b_vector(const Epsilon& eps);

// alpha_{t+1} = T(eps) alpha_t + b_eps
ReducedState reduced_step(const ReducedState& state, const Epsilon& eps);

// One step of the raw class-value recursion for (a, b, c).
Vec3 unnormalized_step(const Vec3& abc, int n_vertices);

// diag(sqrt(N-1), sqrt(N-1), sqrt((N-1)(N-2)))
Vec3 class_weights(double n_vertices);
Vec3 to_reduced(const Vec3& abc, double n_vertices);
Vec3 to_class_values(const Vec3& alpha, double n_vertices);

// Fixed point alpha_inf = (I - T)^{-1} b by direct solve. Throws NumericError
// at eps = 0 or when the relative residual exceeds 1e-12.
ReducedState stationary_state(const Epsilon& eps);
ReducedState stationary_state(double eps);

// alpha(1)^2 / ||alpha||^2; empty for the zero state.
std::optional<double> nu_marked(const ReducedState& state);
// Per-vertex relative probability of one unmarked vertex.
std::optional<double> nu_unmarked(const ReducedState& state, double n_vertices);

double spectral_radius(const Mat3& m);

// Iterates the reduced recursion for t = 0..t_max and records the same
// columns as the full simulator.
TimeSeries reduced_series(const Epsilon& eps, int t_max);

}  // namespace qwflow

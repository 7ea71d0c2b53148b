#include "qwflow/reduced_dynamics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qwflow/errors.hpp"

namespace qwflow {

Epsilon Epsilon::from_vertices(int n_vertices) {
  if (n_vertices < 3) {
    throw ConfigError("epsilon needs N >= 3 (got " + std::to_string(n_vertices) + ")");
  }
  const double n = static_cast<double>(n_vertices);
  return Epsilon(std::sqrt(2.0 / n), 2.0 / n, n, n_vertices);
}

Epsilon Epsilon::from_value(double eps) {
  if (!(eps > 0.0) || eps * eps > 2.0 / 3.0 * (1.0 + 1e-15)) {
    throw ConfigError("epsilon must lie in (0, sqrt(2/3)] (got " + std::to_string(eps) + ")");
  }
  return Epsilon(eps, eps * eps, 2.0 / (eps * eps), std::nullopt);
}

namespace {

Mat3 t_matrix_sq(double e2) {
  const double off = -1.0 + e2;
  const double mix = std::sqrt(2.0 * e2 * (1.0 - e2));
  Mat3 t;
  t << 0.0, off, mix,
       off, 0.0, 0.0,
       0.0, mix, 1.0 - 2.0 * e2;
  return t;
}

Vec3 b_vector_sq(double eps, double e2) {
  const double side = eps * std::sqrt(2.0 - e2);
  return Vec3(side, -side, std::sqrt(4.0 - 6.0 * e2 + 2.0 * e2 * e2));
}

}  // namespace

Mat3 t_matrix(double eps) { return t_matrix_sq(eps * eps); }
Mat3 t_matrix(const Epsilon& eps) { return t_matrix_sq(eps.squared()); }

Vec3 b_vector(double eps) { return b_vector_sq(eps, eps * eps); }
Vec3 b_vector(const Epsilon& eps) { return b_vector_sq(eps.value(), eps.squared()); }

ReducedState reduced_step(const ReducedState& state, const Epsilon& eps) {
  return {t_matrix(eps) * state.alpha + b_vector(eps), state.time + 1};
}

Vec3 unnormalized_step(const Vec3& abc, int n_vertices) {
  if (n_vertices < 3) throw ConfigError("unnormalized_step needs N >= 3");
  const double g = 2.0 / n_vertices;
  Mat3 m;
  m << 0.0, -1.0 + g, 2.0 - 2.0 * g,
       -1.0 + g, 0.0, 0.0,
       0.0, g, 1.0 - 2.0 * g;
  return m * abc + g * Vec3(1.0, -1.0, 1.0);
}

Vec3 class_weights(double n_vertices) {
  const double m = n_vertices - 1.0;
  return Vec3(std::sqrt(m), std::sqrt(m), std::sqrt(m * (n_vertices - 2.0)));
}

Vec3 to_reduced(const Vec3& abc, double n_vertices) {
  return class_weights(n_vertices).cwiseProduct(abc);
}

Vec3 to_class_values(const Vec3& alpha, double n_vertices) {
  return alpha.cwiseQuotient(class_weights(n_vertices));
}

namespace {

ReducedState solve_fixed_point(const Mat3& t, const Vec3& b) {
  const Mat3 a = Mat3::Identity() - t;
  Eigen::FullPivLU<Mat3> lu(a);
  if (!lu.isInvertible()) {
    throw NumericError("no fixed point at unperturbed limit: I - T(eps) is singular");
  }
  ReducedState st{lu.solve(b), 0};
  const double residual = (t * st.alpha + b - st.alpha).norm() / st.alpha.norm();
  if (!(residual < 1e-12)) {
    throw NumericError("fixed-point residual " + std::to_string(residual) + " exceeds 1e-12");
  }
  return st;
}

}  // namespace

ReducedState stationary_state(const Epsilon& eps) {
  return solve_fixed_point(t_matrix(eps), b_vector(eps));
}

ReducedState stationary_state(double eps) { return solve_fixed_point(t_matrix(eps), b_vector(eps)); }

std::optional<double> nu_marked(const ReducedState& state) {
  const double n2 = state.alpha.squaredNorm();
  if (n2 == 0.0) return std::nullopt;
  return state.alpha(0) * state.alpha(0) / n2;
}

std::optional<double> nu_unmarked(const ReducedState& state, double n_vertices) {
  const double n2 = state.alpha.squaredNorm();
  if (n2 == 0.0) return std::nullopt;
  const double rest = state.alpha(1) * state.alpha(1) + state.alpha(2) * state.alpha(2);
  return rest / ((n_vertices - 1.0) * n2);
}

double spectral_radius(const Mat3& m) {
  Eigen::EigenSolver<Mat3> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

TimeSeries reduced_series(const Epsilon& eps, int t_max) {
  if (t_max < 0) throw ConfigError("t_max must be >= 0");
  const double n = eps.n_effective();
  const Mat3 t = t_matrix(eps);
  const Vec3 b = b_vector(eps);
  const Vec3 stationary = stationary_state(eps).alpha;

  TimeSeries series;
  series.method = "reduced";
  series.n_vertices = eps.n_vertices().value_or(static_cast<int>(std::lround(n)));
  series.records.reserve(static_cast<std::size_t>(t_max) + 1);

  ReducedState st;
  for (int k = 0;; ++k) {
    StepRecord rec;
    rec.t = k;
    rec.norm_kn = st.alpha.norm();
    rec.dist_stationary = (stationary - st.alpha).norm();
    const Vec3 abc = to_class_values(st.alpha, n);
    rec.class_values = {abc(0), abc(1), abc(2)};
    if (auto v = nu_marked(st)) rec.nu_marked = *v;
    if (auto v = nu_unmarked(st, n)) rec.nu_unmarked = *v;
    series.records.push_back(rec);
    if (k == t_max) break;
    st = {t * st.alpha + b, k + 1};
  }
  return series;
}

}  // namespace qwflow

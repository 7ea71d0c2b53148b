#include "qwflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "qwflow/errors.hpp"

namespace qwflow {

namespace {

constexpr double kCollisionTol = 1e-10;
constexpr double kBiorthoTol = 1e-8;
constexpr double kRealityTol = 1e-10;

// Assign the three eigenvalues to branches by matching the eps -> 0 limits
// -1 and 1 +/- i eps, so that sweeps in eps never swap branches.
std::array<int, 3> identify_branches(const Eigen::Vector3cd& w, double eps) {
  const std::array<cd, 3> anchors{cd(-1.0, 0.0), cd(1.0, eps), cd(1.0, -eps)};
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int k = 0; k < 3; ++k) cost += std::abs(w(perm[k]) - anchors[k]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (w(best[1]).imag() < w(best[2]).imag()) std::swap(best[1], best[2]);
  return best;
}

}  // namespace

const char* to_string(Branch b) {
  switch (b) {
    case Branch::Minus1:
      return "minus1";
    case Branch::Plus1Pos:
      return "plus1_pos";
    case Branch::Plus1Neg:
      return "plus1_neg";
  }
  return "?";
}

double SpectralDecomp::spectral_radius() const {
  double r = 0.0;
  for (const cd& l : eigenvalues) r = std::max(r, std::abs(l));
  return r;
}

SpectralDecomp decompose(const Epsilon& eps) {
  const Mat3 t = t_matrix(eps);
  Eigen::EigenSolver<Mat3> right(t);
  Eigen::EigenSolver<Mat3> left(t.transpose());
  if (right.info() != Eigen::Success || left.info() != Eigen::Success) {
    throw NumericError("eigen-decomposition of T(eps) did not converge");
  }
  const Eigen::Vector3cd w = right.eigenvalues();
  const Eigen::Vector3cd wl = left.eigenvalues();

  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(w(i) - w(j)) < kCollisionTol) {
        throw NumericError("degenerate spectrum of T(eps) at eps=" + std::to_string(eps.value()));
      }
    }
  }

  const auto order = identify_branches(w, eps.value());
  SpectralDecomp d;
  d.eps = eps.value();
  for (int k = 0; k < 3; ++k) {
    const int i = order[k];
    int j = 0;
    for (int m = 1; m < 3; ++m) {
      if (std::abs(wl(m) - w(i)) < std::abs(wl(j) - w(i))) j = m;
    }
    const Vec3c r = right.eigenvectors().col(i);
    const Vec3c l = left.eigenvectors().col(j);
    const cd pairing = l.transpose() * r;
    if (std::abs(pairing) < kBiorthoTol) {
      throw NumericError("ill-conditioned eigenprojection: |l^T r| = " +
                         std::to_string(std::abs(pairing)));
    }
    d.eigenvalues[k] = w(i);
    d.projections[k] = r * l.transpose() / pairing;
  }
  return d;
}

Vec3c closed_form_alpha_complex(int t, const SpectralDecomp& decomp, const Vec3& b) {
  if (t < 0) throw ConfigError("closed_form_alpha needs t >= 0");
  const Vec3c bc = b.cast<cd>();
  Vec3c alpha = Vec3c::Zero();
  if (t == 0) return alpha;
  for (int k = 0; k < 3; ++k) {
    const cd lam = decomp.eigenvalues[k];
    const cd gain = (1.0 - std::pow(lam, t)) / (1.0 - lam);
    alpha += gain * (decomp.projections[k] * bc);
  }
  return alpha;
}

ReducedState closed_form_alpha(int t, const SpectralDecomp& decomp, const Vec3& b) {
  const Vec3c a = closed_form_alpha_complex(t, decomp, b);
  const double scale = std::max(1.0, a.norm());
  if (a.imag().norm() > kRealityTol * scale) {
    throw NumericError("closed-form alpha_t has imaginary residue " +
                       std::to_string(a.imag().norm()));
  }
  return {a.real(), t};
}

ReducedState closed_form_alpha(int t, const Epsilon& eps) {
  return closed_form_alpha(t, decompose(eps), b_vector(eps));
}

UnperturbedData unperturbed_data() {
  UnperturbedData u;
  u.t = t_matrix(0.0);

  const Vec3 v = Vec3(1.0, 1.0, 0.0) / std::numbers::sqrt2;
  u.p_minus1 = v * v.transpose();
  u.p_plus1 = Mat3::Identity() - u.p_minus1;
  u.s_minus1 = 0.5 * (Mat3::Identity() - u.p_minus1);

  const double r2 = std::numbers::sqrt2;
  u.t1 << 0.0, 0.0, r2,
          0.0, 0.0, 0.0,
          0.0, r2, 0.0;
  u.t2 << 0.0, 1.0, 0.0,
          1.0, 0.0, 0.0,
          0.0, 0.0, -2.0;
  u.reduced_first = u.p_plus1 * u.t1 * u.p_plus1;
  u.reduced_first_printed << 0.0, 0.0, -1.0,
                             0.0, 0.0, 1.0,
                             1.0, -1.0, 0.0;
  u.reduced_first_printed /= r2;

  const cd i(0.0, 1.0);
  u.v_plus_i = 0.5 * Vec3c(-i, i, cd(r2, 0.0));
  u.v_minus_i = u.v_plus_i.conjugate();
  return u;
}

cd series_target1(Branch b) {
  switch (b) {
    case Branch::Minus1:
      return {0.0, 0.0};
    case Branch::Plus1Pos:
      return {0.0, 1.0};
    case Branch::Plus1Neg:
      return {0.0, -1.0};
  }
  return {};
}

cd series_target2(Branch b) { return b == Branch::Minus1 ? cd(0.5, 0.0) : cd(-1.25, 0.0); }

PerturbationFit fit_perturbation(Branch branch, std::span<const double> eps_list) {
  if (eps_list.size() < 4) throw NumericError("fit needs at least 4 epsilon values");
  const auto [lo, hi] = std::minmax_element(eps_list.begin(), eps_list.end());
  if (!(*lo > 0.0) || *hi > 0.1) throw NumericError("fit epsilons must lie in (0, 0.1]");
  if (*hi < 10.0 * *lo * (1.0 - 1e-12)) {
    throw NumericError("fit epsilons must span at least one decade");
  }

  const Eigen::Index m = static_cast<Eigen::Index>(eps_list.size());
  Eigen::MatrixX2cd design(m, 2);
  Eigen::VectorXcd rhs(m);
  const cd origin = branch == Branch::Minus1 ? cd(-1.0, 0.0) : cd(1.0, 0.0);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double e = eps_list[k];
    const SpectralDecomp d = decompose(Epsilon::from_value(e));
    design(k, 0) = e;
    design(k, 1) = e * e;
    rhs(k) = d.eigenvalue(branch) - origin;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixX2cd> qr(design);
  if (qr.rank() < 2) throw NumericError("degenerate epsilon list: fit is rank deficient");
  const Eigen::Vector2cd c = qr.solve(rhs);

  PerturbationFit fit;
  fit.branch = branch;
  fit.coeff1 = c(0);
  fit.coeff2 = c(1);
  fit.residual = (design * c - rhs).cwiseAbs().maxCoeff();
  fit.target1 = series_target1(branch);
  fit.target2 = series_target2(branch);
  return fit;
}

ReducedState approx_alpha(int t, const SpectralDecomp& decomp, const Vec3& b) {
  if (t < 0) throw ConfigError("approx_alpha needs t >= 0");
  const double e = decomp.eps;
  const double e2 = e * e;
  const double tt = static_cast<double>(t);
  const cd i(0.0, 1.0);
  const Vec3c bc = b.cast<cd>();
  const Vec3c b_m = decomp.projection(Branch::Minus1) * bc;
  const Vec3c b_p = decomp.projection(Branch::Plus1Pos) * bc;
  const Vec3c b_n = decomp.projection(Branch::Plus1Neg) * bc;

  const double parity = (t % 2 == 0) ? 1.0 : -1.0;
  const double damp = std::exp(-1.25 * e2 * tt);
  const cd first = 0.5 * (1.0 - parity * std::exp(-0.5 * e2 * tt)) * std::exp(0.25 * e2);
  const cd second = (i / e) * (1.0 - std::exp(i * e * tt) * damp) * std::exp(1.25 * i * e);
  const cd third = -(i / e) * (1.0 - std::exp(-i * e * tt) * damp) * std::exp(-1.25 * i * e);

  const Vec3c a = first * b_m + second * b_p + third * b_n;
  return {a.real(), t};
}

ReducedState approx_alpha(int t, const Epsilon& eps) {
  return approx_alpha(t, decompose(eps), b_vector(eps));
}

double spectral_period(const SpectralDecomp& decomp) {
  return 2.0 * std::numbers::pi / std::arg(decomp.eigenvalue(Branch::Plus1Pos));
}

}  // namespace qwflow

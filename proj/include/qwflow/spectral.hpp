#pragma once

// Spectral data of the non-normal matrix T(eps): eigenvalues, oblique
// eigenprojections, the geometric-sum closed form of alpha_t, the
// unperturbed (eps = 0) perturbation data and numerical fits of the
// eigenvalue series.

#include <array>
#include <complex>
#include <span>

#include <Eigen/Dense>

#include "qwflow/reduced_dynamics.hpp"

namespace qwflow {

using cd = std::complex<double>;
using Vec3c = Eigen::Vector3cd;
using Mat3c = Eigen::Matrix3cd;

enum class Branch {
  Minus1 = 0,    // lambda_{-1}(eps), real, near -1
  Plus1Pos = 1,  // lambda_{1,+}(eps) ~ 1 + i eps
  Plus1Neg = 2,  // lambda_{1,-}(eps) ~ 1 - i eps
};

const char* to_string(Branch b);

struct SpectralDecomp {
  double eps = 0.0;
  std::array<cd, 3> eigenvalues{};     // indexed by Branch
  std::array<Mat3c, 3> projections{};  // P_i = r_i l_i^T / (l_i^T r_i)

  cd eigenvalue(Branch b) const { return eigenvalues[static_cast<int>(b)]; }
  const Mat3c& projection(Branch b) const { return projections[static_cast<int>(b)]; }
  double spectral_radius() const;
};

// Throws NumericError when two eigenvalues collide (|diff| < 1e-10) or a
// left/right eigenvector pair is near-orthogonal (|l^T r| < 1e-8).
SpectralDecomp decompose(const Epsilon& eps);

// alpha_t = sum_i (1 - lambda_i^t)/(1 - lambda_i) P_i b. Throws NumericError if
// the imaginary residue exceeds 1e-10 * max(1, ||alpha_t||).
ReducedState closed_form_alpha(int t, const Epsilon& eps);
ReducedState closed_form_alpha(int t, const SpectralDecomp& decomp, const Vec3& b);
// Complex-valued sum before taking the real part.
Vec3c closed_form_alpha_complex(int t, const SpectralDecomp& decomp, const Vec3& b);

struct UnperturbedData {
  Mat3 t;                 // T(0); spectrum {-1, 1, 1}
  Mat3 p_minus1;          // projection onto span{(1, 1, 0)}
  Mat3 p_plus1;           // I - p_minus1
  Mat3 s_minus1;          // reduced resolvent at -1: (1/2)(I - p_minus1)
  Mat3 t1;                // d T(eps)/d eps at eps = 0
  Mat3 t2;                // second-order coefficient
  Mat3 reduced_first;     // P_1 T1 P_1, computed
  Mat3 reduced_first_printed;  // tabulated reference; equals -reduced_first
  Vec3c v_plus_i;         // eigenvector of reduced_first for +i
  Vec3c v_minus_i;        // eigenvector of reduced_first for -i
};

UnperturbedData unperturbed_data();

// Least-squares fit of lambda(eps) - lambda(0) against (eps, eps^2).
struct PerturbationFit {
  Branch branch = Branch::Minus1;
  cd coeff1{};
  cd coeff2{};
  double residual = 0.0;  // max |lambda - series| over the fitted points
  cd target1{};
  cd target2{};
};

// Requires >= 4 distinct values in (0, 0.1] with max/min >= 10; otherwise
// throws NumericError.
PerturbationFit fit_perturbation(Branch branch, std::span<const double> eps_list);

// Series targets of each branch (coefficients of eps and eps^2).
cd series_target1(Branch b);
cd series_target2(Branch b);

// Asymptotic form of alpha_t with the O(eps) exponent corrections dropped;
// b^(j) = P_j(eps) b_eps come from decompose().
ReducedState approx_alpha(int t, const Epsilon& eps);
ReducedState approx_alpha(int t, const SpectralDecomp& decomp, const Vec3& b);

// Oscillation period of alpha_t implied by the spectrum: 2 pi / arg lambda_{1,+}.
double spectral_period(const SpectralDecomp& decomp);

}  // namespace qwflow

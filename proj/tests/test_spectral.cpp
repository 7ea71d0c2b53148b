#include <doctest.h>

#include <cmath>
#include <vector>

#include "qwflow/errors.hpp"
#include "qwflow/spectral.hpp"

using namespace qwflow;

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1)));
  }
  return out;
}

constexpr Branch kBranches[] = {Branch::Minus1, Branch::Plus1Pos, Branch::Plus1Neg};

}  // namespace

TEST_CASE("projection algebra") {
  for (double eps : {1e-3, 1e-2, 0.05, 0.2, 0.5}) {
    const SpectralDecomp d = decompose(Epsilon::from_value(eps));
    Mat3c sum = Mat3c::Zero();
    const Mat3c t = t_matrix(eps).cast<cd>();
    for (int i = 0; i < 3; ++i) {
      const Mat3c& p = d.projections[i];
      sum += p;
      CHECK((p * p - p).norm() < 1e-10);
      CHECK((t * p - d.eigenvalues[i] * p).norm() < 1e-10);
      for (int j = 0; j < 3; ++j) {
        if (j != i) CHECK((p * d.projections[j]).norm() < 1e-10);
      }
    }
    CHECK((sum - Mat3c::Identity()).norm() < 1e-10);
    CHECK(d.spectral_radius() < 1.0);
  }
}

TEST_CASE("branch identification") {
  const SpectralDecomp d = decompose(Epsilon::from_value(0.01));
  CHECK(std::abs(d.eigenvalue(Branch::Minus1) - cd(-1.0, 0.0)) < 1e-3);
  CHECK(d.eigenvalue(Branch::Minus1).imag() == doctest::Approx(0.0));
  CHECK(d.eigenvalue(Branch::Plus1Pos).imag() > 0.0);
  CHECK(std::abs(d.eigenvalue(Branch::Plus1Pos) - std::conj(d.eigenvalue(Branch::Plus1Neg))) < 1e-14);
  CHECK(std::string(to_string(Branch::Plus1Neg)) == "plus1_neg");
}

TEST_CASE("unperturbed data") {
  const UnperturbedData u = unperturbed_data();
  CHECK((u.p_minus1 * u.p_minus1 - u.p_minus1).norm() < 1e-15);
  CHECK((u.t * u.p_minus1 + u.p_minus1).norm() < 1e-15);
  CHECK((u.t * u.p_plus1 - u.p_plus1).norm() < 1e-15);
  CHECK(u.p_minus1(1, 1) == doctest::Approx(0.5));
  CHECK((u.s_minus1 - 0.5 * u.p_plus1).norm() < 1e-15);

  // one-sided: T is only defined for eps >= 0
  const double h = 1e-6;
  const Mat3 fd = (t_matrix(h) - t_matrix(0.0)) / h;
  CHECK((fd - u.t1).norm() < 1e-5);
  const Mat3 second = (t_matrix(2 * h) - 2 * t_matrix(h) + t_matrix(0.0)) / (h * h);
  CHECK((second - 2 * u.t2).norm() < 1e-2);

  const Mat3c r = u.reduced_first.cast<cd>();
  CHECK((r * u.v_plus_i - cd(0, 1) * u.v_plus_i).norm() < 1e-14);
  CHECK((r * u.v_minus_i + cd(0, 1) * u.v_minus_i).norm() < 1e-14);
  CHECK((u.reduced_first + u.reduced_first_printed).norm() < 1e-15);

  const Mat3c p1 = u.v_plus_i * u.v_plus_i.adjoint() + u.v_minus_i * u.v_minus_i.adjoint();
  CHECK((p1 - u.p_plus1.cast<cd>()).norm() < 1e-15);
}

TEST_CASE("eigenvalue series fits") {
  const auto eps = log_spaced(1e-3, 1e-2, 8);
  const PerturbationFit m = fit_perturbation(Branch::Minus1, eps);
  CHECK(std::abs(m.coeff1) < 1e-4);
  CHECK(std::abs(m.coeff2 - cd(0.5, 0.0)) < 1e-2);

  const PerturbationFit p = fit_perturbation(Branch::Plus1Pos, eps);
  CHECK(std::abs(p.coeff1 - cd(0.0, 1.0)) < 1e-3);
  CHECK(std::abs(p.coeff2 + 1.25) < 2e-2);
  CHECK(p.target2 == cd(-1.25, 0.0));

  const PerturbationFit q = fit_perturbation(Branch::Plus1Neg, eps);
  CHECK(std::abs(q.coeff1 + cd(0.0, 1.0)) < 1e-3);
  CHECK(std::abs(q.coeff1 - std::conj(p.coeff1)) < 1e-9);
}

TEST_CASE("fit input validation") {
  const std::vector<double> three{1e-3, 5e-3, 1e-2};
  CHECK_THROWS_AS(fit_perturbation(Branch::Minus1, three), NumericError);
  const std::vector<double> narrow{2e-3, 3e-3, 4e-3, 5e-3};
  CHECK_THROWS_AS(fit_perturbation(Branch::Minus1, narrow), NumericError);
  const std::vector<double> big{1e-2, 3e-2, 1e-1, 0.2};
  CHECK_THROWS_AS(fit_perturbation(Branch::Minus1, big), NumericError);
  const std::vector<double> zero{0.0, 1e-3, 1e-2, 5e-3};
  CHECK_THROWS_AS(fit_perturbation(Branch::Minus1, zero), NumericError);
}

TEST_CASE("closed form against iteration") {
  const Epsilon e = Epsilon::from_vertices(100);
  const SpectralDecomp d = decompose(e);
  const Vec3 b = b_vector(e);
  CHECK(closed_form_alpha(0, d, b).alpha.norm() == 0.0);
  CHECK((closed_form_alpha(1, d, b).alpha - b).norm() < 1e-12);
  ReducedState s;
  for (int t = 0; t < 50; ++t) s = reduced_step(s, e);
  CHECK((closed_form_alpha(50, d, b).alpha - s.alpha).norm() < 1e-10);
  CHECK_THROWS_AS(closed_form_alpha(-1, d, b), ConfigError);
}

TEST_CASE("closed form is real") {
  for (int n : {3, 10, 100, 1000}) {
    const Epsilon e = Epsilon::from_vertices(n);
    const SpectralDecomp d = decompose(e);
    for (int t : {1, 2, 7, 100, 5000}) {
      const Vec3c a = closed_form_alpha_complex(t, d, b_vector(e));
      CHECK(a.imag().norm() < 1e-10 * std::max(1.0, a.norm()));
    }
  }
}

TEST_CASE("asymptotic form") {
  const Epsilon e = Epsilon::from_vertices(1000);
  CHECK(approx_alpha(0, e).alpha.norm() < 1e-12);
  const SpectralDecomp d = decompose(e);
  const Vec3c bm = d.projection(Branch::Minus1) * b_vector(e).cast<cd>();
  // b^(-1) is O(eps)
  CHECK(bm.norm() / e.value() < 10.0);
  for (Branch br : kBranches) CHECK(d.projection(br).norm() > 0.0);
}

TEST_CASE("asymptotic form tracks the exact state as N grows") {
  double prev = 1.0;
  for (int n : {100, 1000, 10000}) {
    const Epsilon e = Epsilon::from_vertices(n);
    const SpectralDecomp d = decompose(e);
    const Vec3 b = b_vector(e);
    ReducedState s;
    double err = 0.0, scale = 0.0;
    for (int t = 0; t <= n; ++t) {
      err = std::max(err, (approx_alpha(t, d, b).alpha - s.alpha).norm());
      scale = std::max(scale, s.alpha.norm());
      s = reduced_step(s, e);
    }
    CHECK(err / scale < prev);
    prev = err / scale;
    if (n == 1000) CHECK(prev < 0.2);
  }
}

TEST_CASE("spectral period") {
  const SpectralDecomp d = decompose(Epsilon::from_vertices(100));
  CHECK(spectral_period(d) == doctest::Approx(2 * M_PI / std::sqrt(0.02)).epsilon(0.01));
}

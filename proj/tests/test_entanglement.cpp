#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entgen/entanglement.hpp"

using namespace entgen;

namespace {

// Two-mode squeezed vacuum with squeezing r, vacuum-1/2 convention.
Mat4 two_mode_squeezed(double r) {
  Mat4 s = Mat4::Zero();
  const double c = 0.5 * std::cosh(2.0 * r);
  const double d = 0.5 * std::sinh(2.0 * r);
  s(0, 0) = s(1, 1) = s(2, 2) = s(3, 3) = c;
  s(0, 2) = s(2, 0) = d;
  s(1, 3) = s(3, 1) = -d;
  return s;
}

}  // namespace

TEST_CASE("vacuum: symplectic eigenvalues 1/2, E_N = 0") {
  const Mat4 vac = 0.5 * Mat4::Identity();
  const auto [n1, n2] = symplectic_eigenvalues(vac);
  CHECK(n1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(n2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(log_negativity(vac) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("thermal product state: eigenvalues read off the diagonal") {
  Mat4 s = Mat4::Zero();
  s.diagonal() << 1.5, 1.5, 0.7, 0.7;
  const auto [n1, n2] = symplectic_eigenvalues(s);
  CHECK(n1 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(n2 == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(log_negativity(s) < 0.0);  // separable
}

TEST_CASE("two-mode squeezed state: closed-form PT spectrum and E_N = 2r") {
  const double r = 0.5;
  const Mat4 s = two_mode_squeezed(r);
  // state is pure: both symplectic eigenvalues 1/2
  const auto [n1, n2] = symplectic_eigenvalues(s);
  CHECK(n1 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(n2 == doctest::Approx(0.5).epsilon(1e-10));
  // PT spectrum e^{-2r}/2, e^{+2r}/2; frozen values for r = 0.5
  const auto [m1, m2] = symplectic_eigenvalues(partial_transpose(s));
  CHECK(m1 == doctest::Approx(0.18393972058572117).epsilon(1e-10));
  CHECK(m2 == doctest::Approx(1.3591409142295225).epsilon(1e-10));
  CHECK(log_negativity(s) == doctest::Approx(2.0 * r).epsilon(1e-10));
}

TEST_CASE("Simon invariant cross-check of the PT symplectic spectrum") {
  // For sigma = [[a I, C],[C^T, b I]] the PT eigenvalues obey
  // 2 nu^2 = D~ +/- sqrt(D~^2 - 4 det sigma), D~ = a^2 + b^2 - 2 det C.
  Mat4 s = two_mode_squeezed(0.3);
  s *= 1.1;  // slightly mixed
  const double a = s(0, 0), b = s(2, 2);
  Mat2 c;
  c << s(0, 2), s(0, 3), s(1, 2), s(1, 3);
  const double dtilde = a * a + b * b - 2.0 * c.determinant();
  const double det = s.determinant();
  const double lo =
      std::sqrt(0.5 * (dtilde - std::sqrt(dtilde * dtilde - 4.0 * det)));
  const double hi =
      std::sqrt(0.5 * (dtilde + std::sqrt(dtilde * dtilde - 4.0 * det)));
  const auto [m1, m2] = symplectic_eigenvalues(partial_transpose(s));
  CHECK(m1 == doctest::Approx(lo).epsilon(1e-10));
  CHECK(m2 == doctest::Approx(hi).epsilon(1e-10));
}

TEST_CASE("invariance under local symplectic transformations") {
  const Mat4 s = two_mode_squeezed(0.4);
  // local squeezing + rotation on each mode
  auto local = [](double z, double th) {
    Mat2 sq = Mat2::Zero();
    sq(0, 0) = std::exp(z);
    sq(1, 1) = std::exp(-z);
    Mat2 rot;
    rot << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    return Mat2(rot * sq);
  };
  Mat4 L = Mat4::Zero();
  L.topLeftCorner<2, 2>() = local(0.2, 0.9);
  L.bottomRightCorner<2, 2>() = local(-0.35, 2.1);
  const Mat4 t = L * s * L.transpose();
  CHECK(log_negativity(t) == doctest::Approx(log_negativity(s)).epsilon(1e-9));
}

TEST_CASE("validation: asymmetric or non-PD input rejected") {
  Mat4 bad = Mat4::Identity();
  bad(0, 1) = 1e-3;  // asymmetric
  CHECK_THROWS_AS(symplectic_eigenvalues(bad), std::invalid_argument);
  Mat4 neg = -0.5 * Mat4::Identity();
  CHECK_THROWS_AS(symplectic_eigenvalues(neg), std::invalid_argument);
}

TEST_CASE("period average: trapezoid over the closed period") {
  // samples of cos^2 over one period average to 1/2
  const int n = 64;
  std::vector<double> samples(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = 2.0 * M_PI * i / n;
    samples[i] = std::cos(t) * std::cos(t);
  }
  CHECK(period_average(samples) == doctest::Approx(0.5).epsilon(1e-12));
  // invariant under a cyclic shift of the time origin
  std::vector<double> shifted(n + 1);
  for (int i = 0; i <= n; ++i) shifted[i] = samples[(i + 17) % n];
  shifted[n] = shifted[0];
  CHECK(period_average(shifted) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(period_average(std::vector<double>{1.0}),
                  std::invalid_argument);
}

TEST_CASE("resonance frequency and its repulsive domain edge") {
  CHECK(resonance_frequency(0.0, 1.0) == doctest::Approx(2.0));
  CHECK(resonance_frequency(0.2, 1.0) ==
        doctest::Approx(2.0 * std::sqrt(1.8)).epsilon(1e-12));
  CHECK_THROWS_AS(resonance_frequency(-0.25, 1.0), std::domain_error);
  CHECK_THROWS_AS(resonance_frequency(-0.3, 1.0), std::domain_error);
}

TEST_CASE("negativity trace: clamped vs signed averages") {
  const int n = 4;
  std::vector<Mat4> sc(n + 1), xi(n + 1, Mat4::Zero());
  for (int i = 0; i <= n; ++i)
    sc[i] = (i % 2 == 0) ? two_mode_squeezed(0.5)
                         : Mat4(1.2 * Mat4::Identity());
  const auto signed_tr = negativity_trace(sc, xi, 1.0, false);
  const auto clamped_tr = negativity_trace(sc, xi, 1.0, true);
  CHECK(clamped_tr.mean_c >= signed_tr.mean_c);
  CHECK(clamped_tr.max_c == doctest::Approx(signed_tr.max_c));
  // Xi = 0 means conditional == unconditional
  CHECK(signed_tr.mean_u == doctest::Approx(signed_tr.mean_c));
}

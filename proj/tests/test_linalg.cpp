#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isslab/linalg.hpp"

using namespace isslab;

TEST_CASE("expm matches scalar exponential and known 2x2") {
  Mat a(1, 1);
  a(0, 0) = -1.3;
  Mat e = expm(a);
  CHECK(e(0, 0) == doctest::Approx(std::exp(-1.3)).epsilon(1e-13));

  // Rotation generator: expm([[0,-w],[w,0]] t) = [[cos,sin...]].
  Mat r(2, 2);
  r(0, 1) = -2.0;
  r(1, 0) = 2.0;
  Mat er = expm(r);
  CHECK(er(0, 0) == doctest::Approx(std::cos(2.0)).epsilon(1e-12));
  CHECK(er(1, 0) == doctest::Approx(std::sin(2.0)).epsilon(1e-12));
}

TEST_CASE("expm handles large-norm arguments via scaling") {
  Mat a(2, 2);
  a(0, 0) = -40.0;
  a(1, 1) = -35.0;
  a(0, 1) = 3.0;
  Mat e = expm(a);
  // Upper triangular: e00 = exp(-40), e11 = exp(-35),
  // e01 = 3 (exp(-35) - exp(-40)) / 5.
  CHECK(e(0, 0) == doctest::Approx(std::exp(-40.0)).epsilon(1e-10));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-35.0)).epsilon(1e-10));
  CHECK(e(0, 1) ==
        doctest::Approx(3.0 * (std::exp(-35.0) - std::exp(-40.0)) / 5.0).epsilon(1e-10));
  CHECK(e(1, 0) == 0.0);
}

TEST_CASE("symmetric eigenvalues of the discrete Dirichlet Laplacian") {
  const int n = 40;
  const double dz = 1.0 / (n + 1);
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = -2.0 / (dz * dz);
    if (i > 0) a(i, i - 1) = 1.0 / (dz * dz);
    if (i + 1 < n) a(i, i + 1) = 1.0 / (dz * dz);
  }
  Vec ev = symmetric_eigenvalues(a);
  REQUIRE(ev.size() == std::size_t(n));
  const double pi = 3.14159265358979323846;
  for (int k = 1; k <= n; ++k) {
    const double expected =
        -4.0 / (dz * dz) * std::pow(std::sin(k * pi * dz / 2.0), 2);
    // ev ascending; the k-th smallest magnitude is ev[n-k].
    CHECK(ev[n - k] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("operator 2-norm by power iteration") {
  Mat a(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = -1.0;
  CHECK(operator_norm2(a) == doctest::Approx(3.0).epsilon(1e-9));

  // Shear: norm of [[1,1],[0,1]] is golden-ratio-ish sqrt((3+sqrt(5))/2).
  Mat s(2, 2);
  s(0, 0) = 1.0;
  s(0, 1) = 1.0;
  s(1, 1) = 1.0;
  CHECK(operator_norm2(s) ==
        doctest::Approx(std::sqrt((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-8));
}

TEST_CASE("linear solve and quadrature") {
  Mat a(3, 3);
  a(0, 0) = 4;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 3;
  a(1, 2) = 1;
  a(2, 1) = 1;
  a(2, 2) = 2;
  Vec b = {1.0, 2.0, 3.0};
  Vec x = solve_linear(a, b);
  Vec r = a * x;
  for (int i = 0; i < 3; ++i) CHECK(r[i] == doctest::Approx(b[i]).epsilon(1e-12));

  CHECK(simpson([](double t) { return t * t; }, 0.0, 1.0, 64) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double t) { return std::exp(-t); }, 0.0, 5.0, 1e-12) ==
        doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-11));
}

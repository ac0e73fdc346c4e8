#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfis/geometry.hpp"
#include "mfis/specfun.hpp"

using namespace mfis;
using namespace mfis::specfun;

namespace {

void check_close(cdouble got, cdouble want, double rel) {
  CHECK(std::abs(got - want) <= rel * std::abs(want));
}

}  // namespace

TEST_SUITE_BEGIN("specfun");

// Reference values below were computed independently with 50-digit arithmetic
// and rounded to 22 significant digits.

TEST_CASE("spherical Bessel closed forms h0, h1") {
  for (double t : {0.3, 1.0, 6.283185307179586, 47.1}) {
    const cdouble eit = std::polar(1.0, t);
    const cdouble h0 = sph_hankel1(0, t);
    const cdouble h1 = sph_hankel1(1, t);
    CHECK(std::abs(h0 - (-kImag * eit / t)) < 1e-12 * std::abs(h0));
    CHECK(std::abs(h1 - (-eit * (1.0 / t + kImag / (t * t)))) < 1e-12 * std::abs(h1));
    CHECK(sph_bessel_j(0, t) == doctest::Approx(std::sin(t) / t).epsilon(1e-14));
    CHECK(sph_bessel_y(0, t) == doctest::Approx(-std::cos(t) / t).epsilon(1e-14));
  }
}

TEST_CASE("spherical Bessel reference values") {
  CHECK(sph_bessel_j(25, 10.0) == doctest::Approx(1.284342236009569714994e-9).epsilon(1e-13));
  CHECK(sph_bessel_y(25, 10.0) == doctest::Approx(-1659960.621519016825175).epsilon(1e-13));
  CHECK(sph_bessel_j(10, 0.1) == doctest::Approx(7.271510996713671550062e-21).epsilon(1e-13));
  CHECK(sph_bessel_j(40, 35.0) == doctest::Approx(0.002366595429158107815212).epsilon(1e-12));
  CHECK(sph_bessel_y(12, 2.7) == doctest::Approx(-915455.902323472307699).epsilon(1e-13));
  CHECK(sph_bessel_j(12, 2.7) == doctest::Approx(1.65771740274024896609e-8).epsilon(1e-13));
  CHECK(sph_bessel_j(3, 1e-3) == doctest::Approx(9.523808994709006734007e-12).epsilon(1e-13));
  CHECK(sph_bessel_y(3, 0.05) == doctest::Approx(-2400600.125052067058648).epsilon(1e-13));
  check_close(riccati_z(5, 3.2), {0.1112490964807546894514, 5.92586851684586897709}, 1e-13);
}

TEST_CASE("riccati z0 equals exp(it)") {
  for (double t : {0.0628318530717958648, 1.0, 6.283185307179586, 20.0})
    check_close(riccati_z(0, t), std::polar(1.0, t), 1e-12);
}

TEST_CASE("array evaluation matches scalar and the recurrence") {
  for (double t : {0.1, 1.0, 2.7, 10.0, 35.0, 100.0}) {
    std::vector<double> j(42), y(42);
    sph_bessel_j_array(41, t, j.data());
    sph_bessel_y_array(41, t, y.data());
    for (int n = 1; n <= 40; ++n) {
      // three-term recurrence residual, scaled by the largest participant
      const double rj = j[n - 1] + j[n + 1] - (2.0 * n + 1.0) / t * j[n];
      const double sj = std::max({std::abs(j[n - 1]), std::abs(j[n + 1]),
                                  std::abs((2.0 * n + 1.0) / t * j[n])});
      CHECK(std::abs(rj) <= 1e-8 * sj);
      const double ry = y[n - 1] + y[n + 1] - (2.0 * n + 1.0) / t * y[n];
      const double sy = std::max({std::abs(y[n - 1]), std::abs(y[n + 1]),
                                  std::abs((2.0 * n + 1.0) / t * y[n])});
      CHECK(std::abs(ry) <= 1e-8 * sy);
      // cross-product identity j_n y_{n-1} - j_{n-1} y_n = 1/t^2 validates j
      // and y against each other
      const double w = j[n] * y[n - 1] - j[n - 1] * y[n];
      CHECK(w == doctest::Approx(1.0 / (t * t)).epsilon(1e-10));
    }
    CHECK(j[7] == doctest::Approx(sph_bessel_j(7, t)).epsilon(1e-12));
    CHECK(y[9] == doctest::Approx(sph_bessel_y(9, t)).epsilon(1e-12));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS(sph_bessel_j(-1, 1.0));
  CHECK_THROWS(sph_bessel_j(2, -1.0));
  CHECK_THROWS(sph_bessel_y(2, 0.0));
}

TEST_CASE("scalar spherical harmonics reference values") {
  check_close(sph_harmonic(5, 3, 1.1, 0.7),
              {0.1052956262255904508171, -0.180039362484791054026}, 1e-13);
  check_close(sph_harmonic(7, 4, 0.9, 2.3),
              {-0.3387448566069695232686, 0.07745120379643428138189}, 1e-13);
  check_close(sph_harmonic(20, -13, 2.1, 5.0),
              {-0.2265039991887149812451, -0.3329695443211191427156}, 1e-13);
  check_close(sph_harmonic(1, 0, 0.4, 0.0), {0.4500327152856099131812, 0.0}, 1e-13);
  // conjugation symmetry Y_n^{-m} = (-1)^m conj(Y_n^m)
  const cdouble yp = sph_harmonic(6, 2, 0.8, 1.3), ym = sph_harmonic(6, -2, 0.8, 1.3);
  CHECK(std::abs(ym - std::conj(yp)) < 1e-15);
}

TEST_CASE("Legendre block matches pointwise evaluation") {
  LegendreBlock block(20);
  block.compute(1.1);
  CHECK(block.P(5, 3) * std::cos(3 * 0.7) ==
        doctest::Approx(0.1052956262255904508171).epsilon(1e-13));
  // finite-difference check of the theta derivative
  const double h = 1e-6;
  LegendreBlock bp(20), bm(20);
  bp.compute(1.1 + h);
  bm.compute(1.1 - h);
  for (int n : {1, 4, 11, 20})
    for (int m = 0; m <= n; m += 3) {
      const double fd = (bp.P(n, m) - bm.P(n, m)) / (2 * h);
      CHECK(block.dP(n, m) == doctest::Approx(fd).epsilon(5e-8));
    }
}

TEST_CASE("vector spherical harmonics reference values") {
  const double th = 1.1, ph = 0.7;
  const Vec3 xhat{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
  const Vec3 eth{std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
  const Vec3 eph{-std::sin(ph), std::cos(ph), 0.0};
  const cdouble Uth{-0.134879503561119719505, 0.2306232528726567941079};
  const cdouble Uph{0.1106494677792737562996, 0.06471309851661545031903};
  const CVec3 want = Uth * eth + Uph * eph;
  const CVec3 got = vsh_U(5, 3, xhat);
  CHECK(std::abs(got.x - want.x) < 1e-13);
  CHECK(std::abs(got.y - want.y) < 1e-13);
  CHECK(std::abs(got.z - want.z) < 1e-13);

  const double th2 = 2.2, ph2 = 1.9;
  const Vec3 x2{std::sin(th2) * std::cos(ph2), std::sin(th2) * std::sin(ph2), std::cos(th2)};
  const Vec3 eth2{std::cos(th2) * std::cos(ph2), std::cos(th2) * std::sin(ph2), -std::sin(th2)};
  const Vec3 eph2{-std::sin(ph2), std::cos(ph2), 0.0};
  const cdouble Uth2{-0.06233386675061174864608, 0.2401266165004254276059};
  const cdouble Uph2{0.1774049545397189274495, 0.0460521076686123323148};
  const CVec3 want2 = Uth2 * eth2 + Uph2 * eph2;
  const CVec3 got2 = vsh_U(7, -4, x2);
  CHECK(std::abs(got2.x - want2.x) < 1e-13);
  CHECK(std::abs(got2.y - want2.y) < 1e-13);
  CHECK(std::abs(got2.z - want2.z) < 1e-13);

  // V = xhat x U, tangency, and pole rejection
  const CVec3 v = vsh_V(7, -4, x2);
  const CVec3 xu = cross(x2, got2);
  CHECK(std::abs(v.x - xu.x) < 1e-15);
  CHECK(std::abs(v.y - xu.y) < 1e-15);
  CHECK(std::abs(v.z - xu.z) < 1e-15);
  CHECK(std::abs(dot(x2, got2)) < 1e-15);
  CHECK_THROWS(vsh_U(3, 1, Vec3{0, 0, 1}));
}

TEST_CASE("vector harmonics are orthonormal under the sphere quadrature") {
  const auto grid = geom::sphere_grid(40, 80, 1.0);
  auto inner = [&](auto&& F, auto&& G) {
    cdouble s = 0.0;
    for (int j = 0; j < grid.n_theta; ++j)
      for (int i = 0; i < grid.n_phi; ++i) {
        const Vec3 x = grid.point(j, i);
        s += grid.weight(j, 0) * dot(F(x), conj(G(x)));
      }
    return s;
  };
  auto U32 = [](const Vec3& x) { return vsh_U(3, 2, x); };
  auto U54 = [](const Vec3& x) { return vsh_U(5, -4, x); };
  auto V32 = [](const Vec3& x) { return vsh_V(3, 2, x); };
  auto V54 = [](const Vec3& x) { return vsh_V(5, -4, x); };
  CHECK(std::abs(inner(U32, U32) - 1.0) < 1e-12);
  CHECK(std::abs(inner(V54, V54) - 1.0) < 1e-12);
  CHECK(std::abs(inner(U32, U54)) < 1e-12);
  CHECK(std::abs(inner(U32, V32)) < 1e-12);
  CHECK(std::abs(inner(U54, V32)) < 1e-12);
}

TEST_CASE("propagation bound constants") {
  const auto cst = HankelBoundConstants::compute(1.0, 1.0, 1.2);
  CHECK(cst.c3 == doctest::Approx(0.9682458365518542212948).epsilon(1e-14));
  CHECK(cst.c4 == doctest::Approx(5.399373335608686678295).epsilon(1e-14));
  CHECK(cst.c1 == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(cst.c2 == doctest::Approx(12.65269688357294573676).epsilon(1e-14));
  CHECK(cst.C1 == doctest::Approx(1.0 / (2.0 * kPi * 1.2) + 9.0).epsilon(1e-14));
  CHECK(cst.C2 == doctest::Approx(1.0 / 1.2 + 12.65269688357294573676).epsilon(1e-14));
}

TEST_CASE("Hankel ratio bounds hold on the experiment wavenumber grid") {
  const auto cst = HankelBoundConstants::compute(1.0, 1.0, 1.2);
  std::vector<double> ks;
  ks.push_back(2.0 * kPi * 0.01);  // k*, exercises the small-k branch
  for (int s = 1; s <= 100; ++s) ks.push_back(2.0 * kPi * std::sqrt(double(s)));
  const auto slack = check_hankel_ratio_bounds(cst, ks, 40);
  CHECK(slack.decay >= 0.0);
  CHECK(slack.z_ratio >= 0.0);
  CHECK(slack.h_over_z >= 0.0);
  CHECK(slack.z_over_h >= 0.0);
  CHECK(slack.min_slack >= 0.0);

  std::vector<double> ts;
  for (double t = 0.05; t < 130.0; t *= 1.37) ts.push_back(t);
  CHECK(riccati_ratio_lower_slack(ts, 40) >= 0.0);
}

TEST_SUITE_END();

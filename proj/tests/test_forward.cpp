#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfis/forward.hpp"
#include "mfis/source.hpp"

using namespace mfis;
using namespace mfis::forward;

namespace {

// reference dipole: q at y0 observed at x with k = 2 pi (independently
// computed field and curl values)
const double kRef = 2.0 * kPi;
const Vec3 kX{0.3, -1.1, 0.7};
const Vec3 kY0{0.1, -0.05, 0.2};
const Vec3 kQ{0.2, 1.0, -0.5};
const CVec3 kEdip{{-0.1589618232939817467946, 0.0278352288517582551089},
                  {0.01295266723740589813066, 0.1107540887294052587275},
                  {0.00337441984114235132618, -0.0557236547979878246908}};
const CVec3 kCurlEdip{{-0.01711728390280229716573, -0.05427756621126477327615},
                      {-0.1369382712224183773258, -0.4342205296901181862092},
                      {-0.2807234560059576735179, -0.8901520858647422817288}};

double rel_err(const CVec3& got, const CVec3& want) {
  return std::sqrt(norm2(got - want) / norm2(want));
}

}  // namespace

TEST_SUITE_BEGIN("forward");

TEST_CASE("dipole field and curl match the reference values") {
  CHECK(rel_err(dipole_field(kRef, kY0, kQ, kX), kEdip) < 1e-13);
  CHECK(rel_err(dipole_curl(kRef, kY0, kQ, kX), kCurlEdip) < 1e-13);
}

TEST_CASE("one-node quadrature reproduces the dipole") {
  WeightedSource src;
  src.L = 0.5;  // circumsphere radius 0.433 < |x|
  src.points = {kY0};
  src.moments = {to_cvec3(kQ)};
  for (const double k : {kRef, 2.5 * kPi, 0.02 * kPi}) {
    const CVec3 got = radiated_field(src, k, kX);
    const CVec3 want = dipole_field(k, kY0, kQ, kX);
    CHECK(rel_err(got, want) < 1e-12);
  }
}

TEST_CASE("batch layout matches single evaluations") {
  WeightedSource src;
  src.L = 0.6;
  src.points = {{0.1, 0.2, -0.1}, {-0.2, 0.0, 0.15}, {0.05, -0.25, 0.0}};
  src.moments = {{{0.3, -0.1}, {1.0, 0.2}, {-0.4, 0.5}},
                 {{-0.2, 0.0}, {0.1, -0.7}, {0.6, 0.3}},
                 {{0.0, 0.9}, {-0.5, 0.1}, {0.2, -0.2}}};
  const std::vector<double> ks = {2.0 * kPi, 4.0 * kPi};
  const std::vector<Vec3> obs = {{1.0, 0.0, 0.0}, {0.0, -0.8, 0.6}, {0.5, 0.5, -0.8}};
  const auto batch = radiated_field_batch(src, ks, obs);
  REQUIRE(batch.size() == 6);
  for (std::size_t ik = 0; ik < ks.size(); ++ik)
    for (std::size_t io = 0; io < obs.size(); ++io) {
      const CVec3 single = radiated_field(src, ks[ik], obs[io]);
      CHECK(std::sqrt(norm2(batch[ik * obs.size() + io] - single)) <=
            1e-14 * std::sqrt(norm2(single)));
    }
}

TEST_CASE("superposition of two dipoles") {
  const Vec3 y1{0.15, -0.1, 0.05}, y2{-0.2, 0.1, -0.1};
  const Vec3 q1{1.0, 0.5, -0.3}, q2{-0.4, 0.8, 0.6};
  WeightedSource both;
  both.L = 0.5;
  both.points = {y1, y2};
  both.moments = {to_cvec3(q1), to_cvec3(q2)};
  const double k = 3.0 * kPi;
  const Vec3 x{0.9, 0.4, -0.7};
  const CVec3 want = dipole_field(k, y1, q1, x) + dipole_field(k, y2, q2, x);
  CHECK(rel_err(radiated_field(both, k, x), want) < 1e-12);
}

TEST_CASE("zero current radiates nothing") {
  WeightedSource src;
  src.L = 1.0;
  src.points = {{0.1, 0.1, 0.1}, {-0.3, 0.2, 0.0}};
  src.moments = {CVec3{}, CVec3{}};
  const CVec3 e = radiated_field(src, 2.0 * kPi, {0.0, 0.0, 1.5});
  CHECK(norm2(e) == 0.0);
}

TEST_CASE("cube quadrature converges for the first example source") {
  const auto ex = source::example_source(1);
  const auto J = [&](const Vec3& y) { return ex.current(y); };
  const auto coarse = sample_current(J, geom::gauss_legendre_cube(24, 1.0));
  const auto fine = sample_current(J, geom::gauss_legendre_cube(48, 1.0));
  const double k = 2.0 * kPi;
  for (const Vec3& x : {Vec3{0.0, 0.0, 1.0}, Vec3{-0.6, 0.8, 0.0}}) {
    const CVec3 ec = radiated_field(coarse, k, x);
    const CVec3 ef = radiated_field(fine, k, x);
    CHECK(rel_err(ec, ef) < 1e-6);
    CHECK(std::sqrt(norm2(ef)) > 1e-6);  // field is nontrivial
  }
}

TEST_CASE("far field decays like 1/r") {
  const double k = 2.0 * kPi;
  const Vec3 xhat = normalized({0.3, -0.5, 0.81});
  const Vec3 qperp = kQ - dot(xhat, kQ) * xhat;
  const double want = k * norm(qperp) / (4.0 * kPi);  // r |E| -> k |q_perp| / 4 pi
  WeightedSource src;
  src.L = 0.01;
  src.points = {Vec3{0.0, 0.0, 0.0}};
  src.moments = {to_cvec3(kQ)};
  const double r = 20.0;
  const double got = r * std::sqrt(norm2(radiated_field(src, k, xhat * r)));
  CHECK(std::abs(got - want) < 0.02 * want);
}

TEST_CASE("tangential trace is orthogonal to the radius") {
  const Vec3 x{0.4, -1.0, 0.9};
  const CVec3 e = dipole_field(kRef, kY0, kQ, x);
  const CVec3 t = tangential_trace(x, e);
  CHECK(std::abs(dot(normalized(x), t)) < 1e-14 * std::sqrt(norm2(e)));
  // |T|^2 + |xhat . E|^2 = |E|^2
  const cdouble radial = dot(normalized(x), e);
  CHECK(norm2(t) + std::norm(radial) == doctest::Approx(norm2(e)).epsilon(1e-12));
}

TEST_CASE("trace bound constant") {
  CHECK(trace_bound_constant(1.0, 1.0, 0.02 * kPi) ==
        doctest::Approx(118895.5950454232792075854287).epsilon(1e-14));
  CHECK(trace_bound_constant(0.8, 1.5, 0.5 * kPi) ==
        doctest::Approx(1.922325920992436640601623177).epsilon(1e-14));
  CHECK_THROWS_AS(trace_bound_constant(1.0, 0.8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(trace_bound_constant(-1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("tangential trace bound holds for the first example") {
  const auto ex = source::example_source(1);
  const auto quad = geom::gauss_legendre_cube(24, 1.0);
  const auto src = sample_current([&](const Vec3& y) { return ex.current(y); }, quad);
  const auto proj = source::project_scalar_fields(ex.f, ex.g, ex.p, quad, 10);
  const double nrm = source::sobolev_norm(proj, 0.0);
  const double M = trace_bound_constant(1.0, 1.0, 0.02 * kPi);

  const auto grid = geom::sphere_grid_gauss(24, 48, 1.0);
  std::vector<Vec3> obs(grid.size());
  for (std::size_t i = 0; i < obs.size(); ++i) obs[i] = grid.point(i);
  const std::vector<double> ks = {0.02 * kPi, 2.0 * kPi};
  const auto fields = radiated_field_batch(src, ks, obs);
  for (std::size_t ik = 0; ik < ks.size(); ++ik) {
    double lhs2 = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i)
      lhs2 += grid.weight(i) * norm2(tangential_trace(obs[i], fields[ik * obs.size() + i]));
    const double rhs = ks[ik] * M * nrm;
    CHECK(std::sqrt(lhs2) <= rhs);
  }
}

TEST_CASE("argument and domain guards") {
  WeightedSource src;
  src.L = 1.0;
  src.points = {{0.0, 0.0, 0.0}};
  src.moments = {to_cvec3(Vec3{1.0, 0.0, 0.0})};
  CHECK_THROWS_AS(radiated_field(src, 0.0, {0.0, 0.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(radiated_field(src, -1.0, {0.0, 0.0, 2.0}), std::invalid_argument);
  // on / inside the circumsphere of the unit cube
  CHECK_THROWS_AS(radiated_field(src, kRef, {0.0, 0.0, 0.5 * std::sqrt(3.0)}),
                  std::domain_error);
  CHECK_THROWS_AS(radiated_field(src, kRef, {0.1, 0.1, 0.1}), std::domain_error);
  src.moments.push_back(to_cvec3(Vec3{0.0, 1.0, 0.0}));
  CHECK_THROWS_AS(radiated_field(src, kRef, {0.0, 0.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(dipole_field(kRef, kY0, kQ, kY0), std::domain_error);
  CHECK_THROWS_AS(dipole_curl(0.0, kY0, kQ, kX), std::invalid_argument);
}

TEST_CASE("sampled fourier source matches closed-form sampling") {
  // project the first example onto |l| <= 6, then compare sample_source with
  // brute-force pointwise evaluation of the truncated series
  const auto ex = source::example_source(1);
  const auto quad = geom::gauss_legendre_cube(12, 1.0);
  const auto proj =
      source::project_scalar_fields(ex.f, ex.g, ex.p, geom::gauss_legendre_cube(24, 1.0), 6);
  const auto ws = sample_source(proj, quad);
  REQUIRE(ws.points.size() == quad.size());
  for (const std::size_t i : {std::size_t(0), std::size_t(777), quad.size() - 1}) {
    const CVec3 want = source::evaluate(proj, quad.point(i)) * quad.weight(i);
    CHECK(std::sqrt(norm2(ws.moments[i] - want)) <= 1e-12 * (1.0 + std::sqrt(norm2(want))));
    CHECK(norm(ws.points[i] - quad.point(i)) == 0.0);
  }
}

TEST_SUITE_END();

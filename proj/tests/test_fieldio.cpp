#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mfis/fieldio.hpp"
#include "mfis/forward.hpp"
#include "mfis/geometry.hpp"
#include "mfis/specfun.hpp"

using namespace mfis;
using namespace mfis::fieldio;

namespace {

const Vec3 kY0{0.1, -0.05, 0.2};
const Vec3 kQ{0.2, 1.0, -0.5};

std::vector<CVec3> dipole_trace(std::span<const Vec3> pts, double k) {
  std::vector<CVec3> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    out[i] = forward::tangential_trace(pts[i], forward::dipole_field(k, kY0, kQ, pts[i]));
  return out;
}

double coef_rel_err(const VshCoefficients& got, const VshCoefficients& want, int n_max) {
  double num = 0, den = 0;
  for (int n = 1; n <= n_max; ++n)
    for (int m = -n; m <= n; ++m) {
      num += std::norm(got.alpha_at(n, m) - want.alpha_at(n, m)) +
             std::norm(got.beta_at(n, m) - want.beta_at(n, m));
      den += std::norm(want.alpha_at(n, m)) + std::norm(want.beta_at(n, m));
    }
  return std::sqrt(num / den);
}

MeasurementSet tiny_measurement_set() {
  forward::WeightedSource src;
  src.L = 0.5;
  src.points = {{0.1, -0.05, 0.2}, {-0.15, 0.1, 0.0}};
  src.moments = {{{0.2, 0.1}, {1.0, 0.0}, {-0.5, 0.3}},
                 {{-0.3, 0.0}, {0.4, -0.2}, {0.1, 0.6}}};
  const auto pts = geom::observation_points(200, 1.0);
  const std::vector<double> ks = {2.0 * kPi, 2.0 * kPi * std::sqrt(2.0)};
  return generate_measurements(src, ks, pts, 1.0);
}

}  // namespace

TEST_SUITE_BEGIN("fieldio");

TEST_CASE("pure modes round trip on structured grids") {
  const double k = 2.0 * kPi;
  const cdouble ca{2.0, 0.0}, cb{0.5, -1.0}, cc{0.0, 0.25};
  const auto build = [&](const geom::SphereGrid& g) {
    std::vector<CVec3> vals(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 xh = normalized(g.point(i));
      vals[i] = ca * specfun::vsh_U(3, 2, xh) + cb * specfun::vsh_V(5, -4, xh) +
                cc * specfun::vsh_U(8, 0, xh);
    }
    return vsh_decompose(g, vals, k, 10);
  };
  for (const auto& g :
       {geom::sphere_grid(48, 96, 1.2), geom::sphere_grid_gauss(24, 49, 1.2)}) {
    const auto c = build(g);
    CHECK(std::abs(c.alpha_at(3, 2) - ca) < 1e-12);
    CHECK(std::abs(c.beta_at(5, -4) - cb) < 1e-12);
    CHECK(std::abs(c.alpha_at(8, 0) - cc) < 1e-12);
    // everything else vanishes
    double rest = 0;
    for (int n = 1; n <= 10; ++n)
      for (int m = -n; m <= n; ++m) {
        cdouble a = c.alpha_at(n, m), b = c.beta_at(n, m);
        if (n == 3 && m == 2) a -= ca;
        if (n == 5 && m == -4) b -= cb;
        if (n == 8 && m == 0) a -= cc;
        rest += std::norm(a) + std::norm(b);
      }
    CHECK(std::sqrt(rest) < 1e-12);
  }
}

TEST_CASE("grid and scattered decompositions agree") {
  const double k = 3.0 * kPi;
  const auto g = geom::sphere_grid(20, 41, 1.0);
  const auto vals = dipole_trace(
      [&] {
        std::vector<Vec3> p(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) p[i] = g.point(i);
        return p;
      }(),
      k);
  const auto fast = vsh_decompose(g, vals, k, 8);

  std::vector<Vec3> pts(g.size());
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    pts[i] = g.point(i);
    w[i] = g.weight(i);
  }
  const auto slow = vsh_decompose(pts, w, vals, k, 1.0, 8);
  CHECK(coef_rel_err(slow, fast, 8) < 1e-13);
}

TEST_CASE("synthesis matches pointwise harmonics") {
  VshCoefficients c;
  c.k = 2.0 * kPi;
  c.radius = 1.2;
  c.n_max = 6;
  c.alpha.assign(specfun::VshLayout::size(6), cdouble{});
  c.beta.assign(specfun::VshLayout::size(6), cdouble{});
  const specfun::VshLayout lay{6};
  const cdouble ca{1.0, -0.5}, cb{-0.3, 0.8};
  c.alpha[lay.index(4, 2)] = ca;
  c.beta[lay.index(6, -5)] = cb;

  const std::vector<Vec3> pts = {normalized({0.2, 0.5, 0.84}) * 1.2,
                                 normalized({-0.7, 0.1, -0.7}) * 1.2,
                                 normalized({0.9, -0.4, 0.2}) * 1.2};
  const auto got = vsh_synthesize(c, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3 xh = normalized(pts[i]);
    const CVec3 want = ca * specfun::vsh_U(4, 2, xh) + cb * specfun::vsh_V(6, -5, xh);
    CHECK(std::sqrt(norm2(got[i] - want)) < 1e-13);
  }

  // grid synthesis equals scattered synthesis at the grid points
  const auto g = geom::sphere_grid(14, 29, 1.2);
  std::vector<Vec3> gp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) gp[i] = g.point(i);
  const auto on_grid = vsh_synthesize(c, g);
  const auto scattered = vsh_synthesize(c, gp);
  double worst = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::sqrt(norm2(on_grid[i] - scattered[i])));
  CHECK(worst < 1e-13);
}

TEST_CASE("calderon and propagation reproduce the dipole") {
  const double k = 2.0 * kPi, R = 1.0, rho = 1.2;
  const auto grid = geom::sphere_grid_gauss(40, 81, R);
  std::vector<Vec3> gp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gp[i] = grid.point(i);
  const auto coef = vsh_decompose(grid, dipole_trace(gp, k), k, 25);
  CHECK(coef.dropped_modes == 0);

  const std::vector<Vec3> test_pts = {normalized({0.3, -0.7, 0.64}),
                                      normalized({-0.9, 0.1, 0.4}),
                                      normalized({0.05, 0.9, -0.43})};

  // curl trace on the measurement sphere itself
  const auto curlR = calderon_curl_trace(coef);
  const auto synth_c = vsh_synthesize(curlR, [&] {
    std::vector<Vec3> p;
    for (const Vec3& t : test_pts) p.push_back(t * R);
    return p;
  }());
  for (std::size_t i = 0; i < test_pts.size(); ++i) {
    const Vec3 x = test_pts[i] * R;
    const CVec3 want = forward::tangential_trace(x, forward::dipole_curl(k, kY0, kQ, x));
    CHECK(std::sqrt(norm2(synth_c[i] - want) / norm2(want)) < 1e-10);
  }

  // both traces propagated outward
  const auto prop = propagate(coef, rho);
  CHECK(prop.field.dropped_modes == 0);
  CHECK(prop.curl.radius == rho);
  std::vector<Vec3> rho_pts;
  for (const Vec3& t : test_pts) rho_pts.push_back(t * rho);
  const auto synth_f = vsh_synthesize(prop.field, rho_pts);
  const auto synth_pc = vsh_synthesize(prop.curl, rho_pts);
  for (std::size_t i = 0; i < rho_pts.size(); ++i) {
    const Vec3& x = rho_pts[i];
    const CVec3 want_f = forward::tangential_trace(x, forward::dipole_field(k, kY0, kQ, x));
    const CVec3 want_c = forward::tangential_trace(x, forward::dipole_curl(k, kY0, kQ, x));
    CHECK(std::sqrt(norm2(synth_f[i] - want_f) / norm2(want_f)) < 1e-10);
    CHECK(std::sqrt(norm2(synth_pc[i] - want_c) / norm2(want_c)) < 1e-10);
  }

  // the offset-colatitude grid decomposes the same trace to the same result
  const auto offset_grid = geom::sphere_grid(60, 120, R);
  std::vector<Vec3> op(offset_grid.size());
  for (std::size_t i = 0; i < offset_grid.size(); ++i) op[i] = offset_grid.point(i);
  const auto coef2 = vsh_decompose(offset_grid, dipole_trace(op, k), k, 25);
  CHECK(coef_rel_err(coef2, coef, 25) < 1e-10);
}

TEST_CASE("propagation commutes with the calderon map") {
  VshCoefficients c;
  c.k = 2.0 * kPi * std::sqrt(3.0);
  c.radius = 1.0;
  c.n_max = 6;
  const std::size_t sz = specfun::VshLayout::size(6);
  c.alpha.resize(sz);
  c.beta.resize(sz);
  for (std::size_t i = 0; i < sz; ++i) {
    c.alpha[i] = cdouble(std::sin(3.7 * double(i) + 0.2), std::cos(1.3 * double(i)));
    c.beta[i] = cdouble(std::cos(2.1 * double(i)), std::sin(0.9 * double(i) - 1.0));
  }
  const auto prop = propagate(c, 1.2);
  const auto via_calderon = calderon_curl_trace(prop.field);
  double worst = 0;
  for (std::size_t i = 0; i < sz; ++i) {
    worst = std::max(worst, std::abs(prop.curl.alpha[i] - via_calderon.alpha[i]));
    worst = std::max(worst, std::abs(prop.curl.beta[i] - via_calderon.beta[i]));
  }
  CHECK(worst < 1e-12);

  CHECK_THROWS_AS(propagate(c, 0.9), std::invalid_argument);  // inward
}

TEST_CASE("fibonacci decomposition converges") {
  // equal-weight quasi-Monte-Carlo projection; measured relative coefficient
  // error for this dipole trace: 1.7e-4 at 1e4 points, 6.1e-5 at 2e4 points,
  // 7.6e-6 at 8e4 points. Regression bound = measured * ~8.
  const double k = 2.0 * kPi, R = 1.0;
  const auto grid = geom::sphere_grid_gauss(40, 81, R);
  std::vector<Vec3> gp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gp[i] = grid.point(i);
  const auto ref = vsh_decompose(grid, dipole_trace(gp, k), k, 20);

  const auto pts = geom::observation_points(20000, R);
  const std::vector<double> w(pts.size(), 4.0 * kPi * R * R / double(pts.size()));
  const auto got = vsh_decompose(pts, w, dipole_trace(pts, k), k, R, 20);
  CHECK(coef_rel_err(got, ref, 20) < 5e-4);
}

TEST_CASE("measurement generation") {
  const auto m = tiny_measurement_set();
  CHECK(m.L == 0.5);
  CHECK(m.R == 1.0);
  CHECK(m.delta == 0.0);
  CHECK(m.ks.size() == 2);
  CHECK(m.points.size() == 200);
  REQUIRE(m.traces.size() == 2);
  REQUIRE(m.traces[0].size() == 200);

  // traces equal the forward field's tangential part
  forward::WeightedSource src;
  src.L = 0.5;
  src.points = {{0.1, -0.05, 0.2}, {-0.15, 0.1, 0.0}};
  src.moments = {{{0.2, 0.1}, {1.0, 0.0}, {-0.5, 0.3}},
                 {{-0.3, 0.0}, {0.4, -0.2}, {0.1, 0.6}}};
  const CVec3 want = forward::tangential_trace(
      m.points[17], forward::radiated_field(src, m.ks[1], m.points[17]));
  CHECK(std::sqrt(norm2(m.traces[1][17] - want)) == 0.0);

  // off-sphere points are rejected
  forward::WeightedSource s2 = src;
  const std::vector<double> ks = {2.0 * kPi};
  const std::vector<Vec3> bad = {{0.5, 0.5, 0.5}};
  CHECK_THROWS_AS(generate_measurements(s2, ks, bad, 1.0), std::invalid_argument);
}

TEST_CASE("noise model") {
  const auto clean = tiny_measurement_set();
  const double delta = 0.05;
  const auto n1 = add_noise(clean, delta, 42);
  const auto n2 = add_noise(clean, delta, 42);
  const auto n3 = add_noise(clean, delta, 43);

  bool identical = true, differs = false;
  double max_rel_th = 0, mean_rel_th = 0;
  std::size_t count = 0;
  for (std::size_t ik = 0; ik < clean.ks.size(); ++ik)
    for (std::size_t i = 0; i < clean.points.size(); ++i) {
      identical = identical && norm2(n1.traces[ik][i] - n2.traces[ik][i]) == 0.0;
      differs = differs || norm2(n1.traces[ik][i] - n3.traces[ik][i]) > 0.0;
      const auto ang = specfun::sphere_angles(normalized(clean.points[i]));
      const cdouble c = dot(ang.e_theta, clean.traces[ik][i]);
      const cdouble d = dot(ang.e_theta, n1.traces[ik][i]) - c;
      if (std::abs(c) > 0) {
        const double rel = std::abs(d) / std::abs(c);
        max_rel_th = std::max(max_rel_th, rel);
        mean_rel_th += rel;
        ++count;
      }
    }
  CHECK(identical);
  CHECK(differs);
  CHECK(max_rel_th <= delta * (1.0 + 1e-9));
  mean_rel_th /= double(count);  // E|r| = 1/2
  CHECK(mean_rel_th > 0.3 * delta);
  CHECK(mean_rel_th < 0.7 * delta);

  // the same draws are used for every delta: perturbation scales exactly
  const auto half = add_noise(clean, delta / 2, 42);
  double worst = 0;
  for (std::size_t ik = 0; ik < clean.ks.size(); ++ik)
    for (std::size_t i = 0; i < clean.points.size(); ++i) {
      const CVec3 full = n1.traces[ik][i] - clean.traces[ik][i];
      const CVec3 twice = (half.traces[ik][i] - clean.traces[ik][i]) * 2.0;
      worst = std::max(worst, std::sqrt(norm2(full - twice)));
    }
  CHECK(worst < 1e-14);

  // delta = 0 is the identity
  const auto zero = add_noise(clean, 0.0, 7);
  double dz = 0;
  for (std::size_t i = 0; i < clean.points.size(); ++i)
    dz += norm2(zero.traces[0][i] - clean.traces[0][i]);
  CHECK(dz == 0.0);

  CHECK_THROWS_AS(add_noise(clean, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(add_noise(clean, -0.1, 1), std::invalid_argument);
}

TEST_CASE("json round trip") {
  const auto m = add_noise(tiny_measurement_set(), 0.01, 123456789ULL);
  const auto path =
      (std::filesystem::temp_directory_path() / "mfis_fieldio_roundtrip.json").string();
  save_json(m, path);
  const auto r = load_json(path);
  CHECK(r.L == m.L);
  CHECK(r.R == m.R);
  CHECK(r.delta == m.delta);
  CHECK(r.seed == m.seed);
  REQUIRE(r.ks.size() == m.ks.size());
  REQUIRE(r.points.size() == m.points.size());
  REQUIRE(r.traces.size() == m.traces.size());
  double worst = -1;
  for (std::size_t ik = 0; ik < m.ks.size(); ++ik) {
    CHECK(r.ks[ik] == m.ks[ik]);
    for (std::size_t i = 0; i < m.points.size(); ++i)
      worst = std::max(worst, norm2(r.traces[ik][i] - m.traces[ik][i]));
  }
  CHECK(worst == 0.0);  // shortest-round-trip doubles are exact

  CHECK_THROWS_AS(load_json(path + ".missing"), std::runtime_error);
  std::ofstream(path) << "{\"format\":\"other\",\"version\":1}";
  CHECK_THROWS_AS(load_json(path), std::runtime_error);
  std::ofstream(path) << "{\"format\":\"mfis-measurements\",\"version\":99}";
  CHECK_THROWS_AS(load_json(path), std::runtime_error);
  std::ofstream(path) << "not json";
  CHECK_THROWS_AS(load_json(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("csv export") {
  VshCoefficients c;
  c.k = 2.0 * kPi;
  c.radius = 1.0;
  c.n_max = 2;
  c.alpha.assign(specfun::VshLayout::size(2), cdouble{0.5, -0.25});
  c.beta.assign(specfun::VshLayout::size(2), cdouble{1.0, 2.0});
  const auto path =
      (std::filesystem::temp_directory_path() / "mfis_fieldio_coeffs.csv").string();
  export_csv(std::vector<VshCoefficients>{c}, path);

  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "k,n,m,alpha_re,alpha_im,beta_re,beta_im");
  std::size_t rows = 0;
  std::string first;
  while (std::getline(in, line))
    if (!line.empty()) {
      if (rows == 0) first = line;
      ++rows;
    }
  CHECK(rows == 8);  // n=1: 3 modes, n=2: 5 modes
  double kv, ar, ai, br, bi;
  int n, mm;
  REQUIRE(std::sscanf(first.c_str(), "%lf,%d,%d,%lf,%lf,%lf,%lf", &kv, &n, &mm, &ar, &ai,
                      &br, &bi) == 7);
  CHECK(kv == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(n == 1);
  CHECK(mm == -1);
  CHECK(ar == 0.5);
  CHECK(bi == 2.0);
  std::remove(path.c_str());
}

TEST_SUITE_END();

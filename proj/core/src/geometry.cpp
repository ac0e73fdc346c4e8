#include "mfis/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace mfis::geom {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  GaussLegendre out;
  out.nodes.resize(std::size_t(n));
  out.weights.resize(std::size_t(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi-style initial guess, then Newton on P_n
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out.nodes[std::size_t(i)] = -x;  // cos is decreasing; store ascending
    out.weights[std::size_t(i)] = w;
    out.nodes[std::size_t(n - 1 - i)] = x;
    out.weights[std::size_t(n - 1 - i)] = w;
  }
  return out;
}

CubeQuadrature gauss_legendre_cube(int order, double L) {
  if (order < 2) throw std::invalid_argument("gauss_legendre_cube: need order >= 2");
  if (!(L > 0)) throw std::invalid_argument("gauss_legendre_cube: need L > 0");
  const GaussLegendre gl = gauss_legendre(order);
  CubeQuadrature q;
  q.order = order;
  q.L = L;
  q.nodes.resize(std::size_t(order));
  q.weights.resize(std::size_t(order));
  for (int i = 0; i < order; ++i) {
    q.nodes[std::size_t(i)] = 0.5 * L * gl.nodes[std::size_t(i)];
    q.weights[std::size_t(i)] = 0.5 * L * gl.weights[std::size_t(i)];
  }
  return q;
}

Vec3 SphereGrid::point(int j, int i) const {
  const double st = std::sin(theta[std::size_t(j)]), ct = std::cos(theta[std::size_t(j)]);
  return {radius * st * std::cos(phi[std::size_t(i)]),
          radius * st * std::sin(phi[std::size_t(i)]), radius * ct};
}

SphereGrid sphere_grid(int n_theta, int n_phi, double radius) {
  if (n_theta < 2 || n_phi < 2)
    throw std::invalid_argument("sphere_grid: need n_theta, n_phi >= 2");
  if (!(radius > 0)) throw std::invalid_argument("sphere_grid: need radius > 0");
  SphereGrid g;
  g.radius = radius;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.theta.resize(std::size_t(n_theta));
  g.w_theta.resize(std::size_t(n_theta));
  g.phi.resize(std::size_t(n_phi));
  g.w_phi = 2.0 * kPi / n_phi;
  for (int j = 0; j < n_theta; ++j) {
    const double th = (j + 0.5) * kPi / n_theta;
    g.theta[std::size_t(j)] = th;
    // Fejer weight for node cos(th): exact for cos-polynomials of degree < n_theta
    double s = 0.0;
    for (int m = 1; m <= n_theta / 2; ++m) s += std::cos(2.0 * m * th) / (4.0 * m * m - 1.0);
    g.w_theta[std::size_t(j)] = 2.0 / n_theta * (1.0 - 2.0 * s);
  }
  for (int i = 0; i < n_phi; ++i) g.phi[std::size_t(i)] = 2.0 * kPi * i / n_phi;
  return g;
}

SphereGrid sphere_grid_gauss(int n_theta, int n_phi, double radius) {
  if (n_theta < 2 || n_phi < 2)
    throw std::invalid_argument("sphere_grid_gauss: need n_theta, n_phi >= 2");
  if (!(radius > 0)) throw std::invalid_argument("sphere_grid_gauss: need radius > 0");
  const GaussLegendre gl = gauss_legendre(n_theta);
  SphereGrid g;
  g.radius = radius;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.theta.resize(std::size_t(n_theta));
  g.w_theta.resize(std::size_t(n_theta));
  g.phi.resize(std::size_t(n_phi));
  g.w_phi = 2.0 * kPi / n_phi;
  for (int j = 0; j < n_theta; ++j) {
    // gl.nodes ascend in cos(theta); reverse so theta ascends like sphere_grid
    g.theta[std::size_t(j)] = std::acos(gl.nodes[std::size_t(n_theta - 1 - j)]);
    g.w_theta[std::size_t(j)] = gl.weights[std::size_t(n_theta - 1 - j)];
  }
  for (int i = 0; i < n_phi; ++i) g.phi[std::size_t(i)] = 2.0 * kPi * i / n_phi;
  return g;
}

std::vector<Vec3> observation_points(std::size_t count, double radius) {
  if (count < 100) throw std::invalid_argument("observation_points: need count >= 100");
  if (!(radius > 0)) throw std::invalid_argument("observation_points: need radius > 0");
  std::vector<Vec3> pts(count);
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * double(i) + 1.0) / double(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ph = golden_angle * double(i);
    pts[i] = Vec3{r * std::cos(ph), r * std::sin(ph), z} * radius;
  }
  return pts;
}

}  // namespace mfis::geom

// Quadrature grids: tensor Gauss-Legendre on the source cube, product grids on
// spheres with pole-free colatitudes, and deterministic quasi-uniform
// observation point sets. All constructions are pure; grids are immutable and
// sharable across threads.
#pragma once

#include <cstddef>
#include <vector>

#include "mfis/vec3.hpp"

namespace mfis::geom {

// Gauss-Legendre nodes/weights on [-1, 1], ascending nodes.
struct GaussLegendre {
  std::vector<double> nodes, weights;
};
GaussLegendre gauss_legendre(int n);

// Tensor-product rule on the open cube (-L/2, L/2)^3, `order` points per axis.
// Flattened index runs z fastest: i = (ix * order + iy) * order + iz.
struct CubeQuadrature {
  int order = 0;
  double L = 0;
  std::vector<double> nodes;    // per-axis coordinates, size `order`
  std::vector<double> weights;  // per-axis weights, sum L

  std::size_t size() const {
    return std::size_t(order) * std::size_t(order) * std::size_t(order);
  }
  Vec3 point(std::size_t i) const {
    const std::size_t o = std::size_t(order);
    return {nodes[i / (o * o)], nodes[(i / o) % o], nodes[i % o]};
  }
  double weight(std::size_t i) const {
    const std::size_t o = std::size_t(order);
    return weights[i / (o * o)] * weights[(i / o) % o] * weights[i % o];
  }
};
CubeQuadrature gauss_legendre_cube(int order, double L);

// Product grid on the sphere of the given radius. Colatitudes sit at the
// half-offset angles theta_j = (j + 1/2) pi / n_theta (poles excluded);
// azimuths at phi_i = 2 pi i / n_phi. The colatitude weights are the Fejer
// rule for these nodes, which integrates dcos(theta) exactly for integrands
// polynomial in cos(theta) up to degree n_theta - 1; combined with the uniform
// phi rule the surface quadrature is exact for spherical polynomials of
// degree < min(n_theta, n_phi/2). Flattened index: i = j * n_phi + iphi.
struct SphereGrid {
  double radius = 0;
  int n_theta = 0, n_phi = 0;
  std::vector<double> theta;    // size n_theta
  std::vector<double> w_theta;  // integrates dcos(theta) over [-1,1]; sum = 2
  std::vector<double> phi;      // size n_phi
  double w_phi = 0;             // 2 pi / n_phi

  std::size_t size() const { return std::size_t(n_theta) * std::size_t(n_phi); }
  std::size_t index(int j, int i) const { return std::size_t(j) * n_phi + i; }
  Vec3 point(int j, int i) const;
  Vec3 point(std::size_t flat) const {
    return point(int(flat / std::size_t(n_phi)), int(flat % std::size_t(n_phi)));
  }
  double weight(int j, int /*i*/) const { return radius * radius * w_theta[j] * w_phi; }
  double weight(std::size_t flat) const {
    return weight(int(flat / std::size_t(n_phi)), 0);
  }
};
SphereGrid sphere_grid(int n_theta, int n_phi, double radius);

// Same layout but with Gauss-Legendre colatitudes (theta_j = acos of the GL
// nodes, ascending in theta): exact for cos(theta)-polynomials of degree
// <= 2 n_theta - 1, so fewer rows reach a given spherical-harmonic degree.
// Used for measurement-sphere decompositions; the plain rule above matches
// the propagation sphere's trapezoid convention.
SphereGrid sphere_grid_gauss(int n_theta, int n_phi, double radius);

// Deterministic quasi-uniform points on the sphere (offset Fibonacci lattice);
// used as observation/measurement locations with equal surface weights
// 4 pi radius^2 / count.
std::vector<Vec3> observation_points(std::size_t count, double radius);

}  // namespace mfis::geom

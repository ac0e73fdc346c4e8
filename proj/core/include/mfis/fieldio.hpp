// Tangential-field handling on measurement spheres: vector spherical harmonic
// (VSH) analysis/synthesis, the exterior Calderon map between the electric and
// magnetic traces, propagation of both traces outward between spheres, the
// multiplicative measurement-noise model, and (de)serialization of simulated
// measurement sets.
//
// Conventions: a tangential field is expanded as T = sum alpha U_n^m + beta
// V_n^m with U = grad_S Y / sqrt(n(n+1)), V = xhat x U. Outside the source the
// field is E = sum a h_n(kr) V + b [sqrt(n(n+1)) h_n(kr)/(kr) Y xhat +
// z_n(kr)/(kr) U] with z_n(t) = d/dt[t h_n(t)], which yields the diagonal maps
// implemented here, e.g. propagation of xhat x E from radius R to rho:
//   alpha -> h_n(k rho)/h_n(k R) alpha,  beta -> (R/rho) z_n(k rho)/z_n(k R) beta.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfis/forward.hpp"
#include "mfis/geometry.hpp"
#include "mfis/vec3.hpp"

namespace mfis::fieldio {

// One sphere trace in coefficient space (specfun::VshLayout ordering, n >= 1).
struct VshCoefficients {
  double k = 0.0;
  double radius = 0.0;
  int n_max = 0;
  std::vector<cdouble> alpha, beta;
  int dropped_modes = 0;  // zeroed by the propagation finite-ratio guard

  cdouble alpha_at(int n, int m) const;
  cdouble beta_at(int n, int m) const;
};

// Quadrature projection of pointwise tangential samples onto the VSH basis.
// weights are surface weights on the sphere (they sum to 4 pi radius^2); the
// points must avoid the poles.
VshCoefficients vsh_decompose(std::span<const Vec3> points,
                              std::span<const double> weights,
                              std::span<const CVec3> values, double k,
                              double radius, int n_max);
// Structured-grid fast path (shared Legendre work per row).
VshCoefficients vsh_decompose(const geom::SphereGrid& grid,
                              std::span<const CVec3> values, double k, int n_max);

// Evaluate the expansion at arbitrary points / on a full grid (row-major).
std::vector<CVec3> vsh_synthesize(const VshCoefficients& c, std::span<const Vec3> points);
std::vector<CVec3> vsh_synthesize(const VshCoefficients& c, const geom::SphereGrid& grid);

// From the expansion of xhat x E on its own sphere, the expansion of
// xhat x curl E on the same sphere.
VshCoefficients calderon_curl_trace(const VshCoefficients& field);

// Both traces propagated outward to radius rho > radius of the input.
struct PropagatedTraces {
  VshCoefficients field;  // xhat x E on Gamma_rho
  VshCoefficients curl;   // xhat x curl E on Gamma_rho
};
PropagatedTraces propagate(const VshCoefficients& field_trace, double rho);

// Simulated multi-frequency boundary data: tangential traces of E at the
// common point set on Gamma_R, one block per wavenumber (Cartesian parts).
struct MeasurementSet {
  double L = 0.0;
  double R = 0.0;
  double delta = 0.0;      // applied noise level (0 = clean)
  std::uint64_t seed = 0;  // master noise seed (meaningful when delta > 0)
  std::vector<double> ks;
  std::vector<Vec3> points;
  std::vector<double> weights;             // surface weights; empty = equal
  std::vector<std::vector<CVec3>> traces;  // [ik][ipoint]

  // per-point surface weights resolved to an explicit vector
  std::vector<double> surface_weights() const;
};

MeasurementSet generate_measurements(const forward::WeightedSource& src,
                                     std::span<const double> ks,
                                     std::span<const Vec3> points, double R,
                                     std::span<const double> weights = {});

// Multiplicative uniform noise: at every point both spherical components get
// c += delta r |c| exp(i pi r') with independent r, r' ~ U(-1, 1). Streams are
// seeded per wavenumber from the master seed, so the draw set is independent
// of delta and of which other wavenumbers are present.
MeasurementSet add_noise(const MeasurementSet& clean, double delta, std::uint64_t seed);

// Versioned JSON round trip (exact double round trip) and a flat CSV dump of
// coefficient sets (k,n,m,alpha_re,alpha_im,beta_re,beta_im).
void save_json(const MeasurementSet& m, const std::string& path);
MeasurementSet load_json(const std::string& path);
void export_csv(std::span<const VshCoefficients> sets, const std::string& path);

}  // namespace mfis::fieldio

// Radiated electric field of a compactly supported current by direct volume
// integration of the dyadic kernel
//   E(x) = i k int Phi_k(x-y) [ c1(k r) J + c2(k r) (dhat . J) dhat ] dy,
//   Phi_k(r) = e^{i k r} / (4 pi r),  c1 = 1 + i/(kr) - 1/(kr)^2,
//   c2 = -1 - 3 i/(kr) + 3/(kr)^2,
// plus the closed-form point dipole (field and curl) used as an independent
// reference, tangential traces, and the a-priori trace bound constant.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mfis/geometry.hpp"
#include "mfis/source.hpp"
#include "mfis/vec3.hpp"

namespace mfis::forward {

// Cube-quadrature samples of a current density with the weights folded in:
// moments[i] = w_i J(y_i), so E is a plain sum of kernel evaluations.
struct WeightedSource {
  std::vector<Vec3> points;
  std::vector<CVec3> moments;
  double L = 0.0;  // side length of the supporting cube (domain guard)
};

WeightedSource sample_source(const source::FourierSource& s,
                             const geom::CubeQuadrature& quad);

// Sample an arbitrary (real) current, e.g. the closed-form example sources.
WeightedSource sample_current(const std::function<Vec3(const Vec3&)>& J,
                              const geom::CubeQuadrature& quad);

// E(x; k). Requires k > 0 and |x| > (sqrt 3 / 2) L (outside the circumsphere
// of the source cube, where the kernel is smooth); throws otherwise.
CVec3 radiated_field(const WeightedSource& src, double k, const Vec3& x);

// Batch evaluation over all (k, observation point) pairs; k-major layout
// out[ik * obs.size() + io]. Deterministic for any thread count.
std::vector<CVec3> radiated_field_batch(const WeightedSource& src,
                                        std::span<const double> ks,
                                        std::span<const Vec3> obs);

// xhat x E for xhat = x/|x| (the measured tangential trace).
inline CVec3 tangential_trace(const Vec3& x, const CVec3& E) {
  return cross(normalized(x), E);
}

// Point dipole q at y0: E(x) = i k Phi_k(r) [ c1 q + c2 (dhat . q) dhat ],
// curl E(x) = i k Phi_k(r) (i k - 1/r) dhat x q,  dhat = (x-y0)/r.
CVec3 dipole_field(double k, const Vec3& y0, const Vec3& q, const Vec3& x);
CVec3 dipole_curl(double k, const Vec3& y0, const Vec3& q, const Vec3& x);

// Constant M with || xhat x E ||_{L^2_t(Gamma_R)} <= k M || J ||_{p,0}:
//   M = R / (2 sqrt(pi) tau0) (2 + 1/kstar + 4/(kstar^2 tau0^2)) L^{3/2},
//   tau0 = R - (sqrt 3 / 2) L > 0.
double trace_bound_constant(double L, double R, double kstar);

}  // namespace mfis::forward

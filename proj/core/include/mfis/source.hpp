// Fourier-space representation of the current source J = p f + p x grad(g):
// sparse coefficient maps keyed by integer lattice vectors, projection of
// scalar fields onto the basis phi_l(x) = exp(i (2 pi / L) l . x), truncation,
// Sobolev norms, and pointwise/grid evaluation.
#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "mfis/geometry.hpp"
#include "mfis/vec3.hpp"

namespace mfis::source {

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

// A polarization p is admissible when p x l != 0 for every nonzero lattice
// vector; numerically we check |p x l| > 1e-12 for 1 <= |l| <= n_check and
// report c_min = min |p x unit(l)| (enters the stability constants).
struct AdmissibilityResult {
  bool admissible = false;
  double c_min = 0.0;
};
AdmissibilityResult is_admissible(const Vec3& p, int n_check);

// Orthogonal frame attached to a lattice vector: v = p x l, w = l x v.
// {l, v, w} are mutually orthogonal; |w| = |l||v| and p . w = |v|^2.
struct LatticeFrame {
  Vec3i l;
  Vec3 v, w;
};
LatticeFrame lattice_frame(const Vec3& p, const Vec3i& l);

// All lattice vectors with |l| <= N in lexicographic order (includes 0).
std::vector<Vec3i> lattice_ball(int N);

struct FourierSource {
  Vec3 p{0.0, 0.0, 1.0};  // unit polarization
  double L = 1.0;
  std::map<Vec3i, cdouble> a;  // includes l = 0
  std::map<Vec3i, cdouble> b;  // never has an entry at l = 0

  cdouble coeff_a(const Vec3i& l) const {
    const auto it = a.find(l);
    return it == a.end() ? cdouble{} : it->second;
  }
  cdouble coeff_b(const Vec3i& l) const {
    const auto it = b.find(l);
    return it == b.end() ? cdouble{} : it->second;
  }
  int max_shell() const;  // max |l|^2 over stored coefficients (0 if none)
};

// J(x) = a_0 p + sum_{l != 0} (a_l p + (2 pi i / L) b_l (p x l)) phi_l(x).
CVec3 evaluate(const FourierSource& s, const Vec3& x);

// J on the closed uniform lattice x_i = -L/2 + i L/(n-1) per axis (z-fastest
// flattening), computed by separable phase contraction.
std::vector<CVec3> evaluate_on_uniform_grid(const FourierSource& s, int n_per_axis);

// J on the tensor grid built from arbitrary per-axis coordinates (same axis
// for x, y, z; z-fastest flattening), same contraction scheme. Used to sample
// the source at cube-quadrature nodes.
std::vector<CVec3> evaluate_on_tensor_grid(const FourierSource& s,
                                           std::span<const double> axis);

// Brute-force Fourier projection a_l = L^-3 int f conj(phi_l), b_l likewise
// from g, for all |l| <= N, via the tensor cube rule. This is the oracle the
// reconstruction is compared against. g may be an empty function for b = 0.
FourierSource project_scalar_fields(const ScalarField& f, const ScalarField& g,
                                    const Vec3& p, const geom::CubeQuadrature& quad,
                                    int N);

// Drop all coefficients with |l| > N. Idempotent.
FourierSource truncate(const FourierSource& s, int N);

// ( L^3 sum (1+|l|^2)^sigma |a_l|^2
//   + 4 pi^2 L sum (1+|l|^2)^sigma |p x l|^2 |b_l|^2 )^{1/2}
double sobolev_norm(const FourierSource& s, double sigma);

// The three benchmark sources (closed forms, including the analytic grad g).
struct ExampleSource {
  int id = 0;
  Vec3 p;
  ScalarField f, g;
  VectorField grad_g;

  Vec3 current(const Vec3& x) const { return f(x) * p + cross(p, grad_g(x)); }
};
ExampleSource example_source(int id);

}  // namespace mfis::source

// Explicit Fourier-coefficient recovery from multi-frequency boundary data.
// For every lattice vector l != 0 the coefficients of J = p f + p x grad g are
// read off from two surface functionals of the propagated traces T = xhat x E
// and C = xhat x curl E on the work sphere Gamma_rho, evaluated at the matched
// wavenumber k = 2 pi |l| / L:
//   a_l = (i k |v|^2 L^3)^{-1}    oint C . (w conj(phi_l))
//                                     + T . (2 pi i |l|^2 / L) (v conj(phi_l)) ds
//   b_l = -(2 pi k L^2 |v|^2)^{-1} oint C . (v conj(phi_l))
//                                     - T . (2 pi i / L) (w conj(phi_l)) ds
// with v = p x l, w = l x v. The mean a_0 comes from the same a-type
// functional at the non-lattice vector l* = (lambda, 0, 0) and wavenumber
// k* = 2 pi lambda / L, corrected by the sinc-weighted x1-line coefficients.
#pragma once

#include <span>
#include <vector>

#include "mfis/fieldio.hpp"
#include "mfis/source.hpp"
#include "mfis/vec3.hpp"

namespace mfis::inversion {

// Noise-adapted truncation order N(delta) = floor(tau delta^{-1/4}) + 1.
int truncation_order(double delta, double tau = 3.0);

// All lattice vectors grouped by shell s = |l|^2 <= N^2 (shells that are not
// sums of three squares are absent), ascending in s; k = 2 pi sqrt(s) / L.
struct WavenumberShell {
  int s = 0;
  double k = 0.0;
  std::vector<Vec3i> lattice;
};
std::vector<WavenumberShell> wavenumber_shells(int N, double L);

// Flat list of the distinct wavenumbers of the shells, plus k* appended last.
std::vector<double> wavenumber_list(int N, double L, double lambda);

struct ReconstructionConfig {
  Vec3 p;                    // unit admissible polarization
  int N = 0;                 // truncation order; 0 = derive from the noise level
  double tau = 3.0;          // truncation constant when N is derived
  int n_max = 20;            // VSH truncation of the measured traces
  double rho = 1.2;          // work sphere radius (> R)
  double lambda = 0.01;      // k* = 2 pi lambda / L; 0 < lambda < min(1/2, L/(4 pi))
  int grid_n_theta = 200;    // work sphere quadrature grid
  int grid_n_phi = 400;
  bool a0_two_sided = true;  // correct a_0 with j = -N..N (else fold conjugates)
};

struct ReconstructionResult {
  source::FourierSource source;
  int N = 0;               // truncation order actually used
  int dropped_modes = 0;   // VSH modes zeroed by propagation guards, all shells
};

// Full pipeline: per shell decompose the measured traces, propagate them to
// Gamma_rho, synthesize T and C there, and evaluate the recovery functionals;
// finally assemble a_0. The measurement set must contain every shell
// wavenumber and k*.
ReconstructionResult reconstruct(const fieldio::MeasurementSet& data,
                                 const ReconstructionConfig& cfg);

}  // namespace mfis::inversion

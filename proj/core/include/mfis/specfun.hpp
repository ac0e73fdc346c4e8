// Spherical Bessel/Hankel functions, orthonormal spherical harmonics and the
// tangential vector harmonics built from them, plus the Hankel-ratio bound
// checks used to validate data propagation between spheres.
//
// Conventions:
//   h_n = j_n + i y_n            (outgoing Hankel function of the first kind)
//   z_n(t) = h_n(t) + t h_n'(t) = (n+1) h_n(t) - t h_{n+1}(t)
//   Y_n^m orthonormal on S^2, Condon-Shortley phase, Y_n^{-m} = (-1)^m conj(Y_n^m)
//   U_n^m = grad_{S^2} Y_n^m / sqrt(n(n+1)),  V_n^m = xhat x U_n^m
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mfis/vec3.hpp"

namespace mfis::specfun {

// ---- spherical Bessel ----------------------------------------------------
// j_n: ascending series for small t, upward recurrence for n <= t, Miller's
// downward recurrence otherwise. y_n: upward recurrence (always stable).
double sph_bessel_j(int n, double t);
double sph_bessel_y(int n, double t);
cdouble sph_hankel1(int n, double t);
cdouble riccati_z(int n, double t);  // z_n(t) = (n+1) h_n(t) - t h_{n+1}(t)

// Fill out[0..n_max] in one pass (out must hold n_max+1 entries).
void sph_bessel_j_array(int n_max, double t, double* out);
void sph_bessel_y_array(int n_max, double t, double* out);
void sph_hankel1_array(int n_max, double t, cdouble* out);

// ---- scalar and vector spherical harmonics --------------------------------
cdouble sph_harmonic(int n, int m, double theta, double phi);

// All fully-normalized associated Legendre values and theta-derivatives for
// 0 <= m <= n <= n_max at one colatitude; the building block for fast vector
// harmonic evaluation point-by-point. Normalization: Y_n^m = P(n,m) e^{im phi}.
class LegendreBlock {
 public:
  explicit LegendreBlock(int n_max);
  void compute(double theta);  // requires sin(theta) > pole guard
  int n_max() const { return n_max_; }
  double cos_theta() const { return cos_t_; }
  double sin_theta() const { return sin_t_; }
  double P(int n, int m) const { return p_[idx(n, m)]; }
  double dP(int n, int m) const { return dp_[idx(n, m)]; }       // d/dtheta
  double mPsin(int n, int m) const { return m * p_[idx(n, m)] * inv_sin_; }

 private:
  std::size_t idx(int n, int m) const { return std::size_t(n) * (n + 1) / 2 + m; }
  int n_max_;
  double cos_t_ = 0, sin_t_ = 0, inv_sin_ = 0;
  std::vector<double> p_, dp_;
};

// Spherical angles and the local tangent frame of a unit vector; throws
// std::domain_error at the poles where the frame degenerates.
struct SphereAngles {
  double theta = 0, phi = 0, sin_theta = 0;
  Vec3 e_theta, e_phi;
};
SphereAngles sphere_angles(const Vec3& xhat);

// Pointwise tangential harmonics (slow convenience path; decomposition and
// synthesis use LegendreBlock directly). xhat must be unit length and off the
// poles. n >= 1.
CVec3 vsh_U(int n, int m, const Vec3& xhat);
CVec3 vsh_V(int n, int m, const Vec3& xhat);

// Flat coefficient layout for (n,m), n = 1..n_max, m = -n..n.
struct VshLayout {
  int n_max = 0;
  static std::size_t size(int n_max) { return std::size_t(n_max) * (n_max + 2); }
  std::size_t size() const { return size(n_max); }
  std::size_t index(int n, int m) const { return std::size_t(n) * n - 1 + (m + n); }
};

// ---- Hankel ratio bounds ---------------------------------------------------
// Constants for the propagation-operator estimates between the measurement
// sphere (radius R) and the work sphere (radius rho > R), for sources inside
// the cube of side L. The bound on |z_n(k rho)/h_n(k R)| is C1*k*rho for
// k >= 2 pi / L and C2*rho for 0 < k <= 1/2.
struct HankelBoundConstants {
  double L = 0, R = 0, rho = 0;
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  double C1 = 0, C2 = 0;
  static HankelBoundConstants compute(double L, double R, double rho);
};

// Worst-case slack (bound minus |ratio|) of the four propagation-ratio bounds
// over a wavenumber list and n <= n_max. All slacks must come out >= 0;
// negative slack means the corresponding estimate (or our Hankel evaluation)
// is broken.
struct RatioBoundSlack {
  double decay = 0;        // 1 - |h_n(k rho)/h_n(k R)|,           n >= 0
  double z_ratio = 0;      // (4+10kR) rho/R - |z_n(k rho)/z_n(k R)|, n >= 1
  double h_over_z = 0;     // 7 - |h_n(k rho)/z_n(k R)|,            n >= 1
  double z_over_h = 0;     // branch bound - |z_n(k rho)/h_n(k R)|, n >= 1
  double min_slack = 0;
  int worst_n = -1;
  double worst_k = 0;
};
RatioBoundSlack check_hankel_ratio_bounds(const HankelBoundConstants& cst,
                                          std::span<const double> ks, int n_max);

// Lower bound |z_n(t)/h_n(t)| >= n(n+1)/(2t^2+n+1); returns the minimum slack
// over the grid (diagnostic used by tests and selftest).
double riccati_ratio_lower_slack(std::span<const double> ts, int n_max);

}  // namespace mfis::specfun

#include "mfis/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfis::specfun {

namespace {

constexpr double kRescaleHi = 1e280;
constexpr double kRescaleLo = 1e-280;
constexpr double kPoleGuard = 1e-14;

void check_order_arg(int n, double t, const char* who) {
  if (n < 0) throw std::invalid_argument(std::string(who) + ": order must be >= 0");
  if (!(t >= 0.0)) throw std::domain_error(std::string(who) + ": argument must be >= 0");
}

// Ascending series j_n(t) = t^n/(2n+1)!! * sum_s (-t^2/2)^s / (s! (2n+3)...(2n+2s+1)),
// used for t < 1 where the leading factor is computed stably by repeated division.
double sph_j_series(int n, double t) {
  double lead = 1.0;
  for (int i = 1; i <= n; ++i) lead *= t / double(2 * i + 1);
  if (lead == 0.0) return 0.0;  // true value underflows
  const double t2h = -0.5 * t * t;
  double term = 1.0, sum = 1.0;
  for (int s = 1; s < 40; ++s) {
    term *= t2h / (double(s) * double(2 * n + 2 * s + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return lead * sum;
}

}  // namespace

void sph_bessel_j_array(int n_max, double t, double* out) {
  check_order_arg(n_max, t, "sph_bessel_j_array");
  if (t == 0.0) {
    out[0] = 1.0;
    std::fill(out + 1, out + n_max + 1, 0.0);
    return;
  }
  const double j0 = std::sin(t) / t;
  out[0] = j0;
  if (n_max == 0) return;
  const double j1 = std::sin(t) / (t * t) - std::cos(t) / t;
  out[1] = j1;
  if (n_max == 1) return;

  if (t >= double(n_max)) {
    // upward recurrence is stable while the order stays below the argument
    for (int k = 1; k < n_max; ++k)
      out[k + 1] = double(2 * k + 1) / t * out[k] - out[k - 1];
    return;
  }

  // Miller's downward recurrence: start well above n_max with an arbitrary
  // tiny seed, recur down (rescaling on overflow), then normalize against the
  // closed-form j_0 or j_1, whichever is larger in magnitude.
  const int start = n_max + std::max(16, int(std::sqrt(40.0 * n_max)) + 2);
  double jp = 0.0;           // j_{k+1}
  double jc = 1e-30;         // j_k at k = start
  for (int k = start; k >= 1; --k) {
    const double jm = double(2 * k + 1) / t * jc - jp;  // j_{k-1}
    jp = jc;
    jc = jm;
    if (k - 1 <= n_max) out[k - 1] = jm;
    if (std::abs(jc) > kRescaleHi) {
      jp *= kRescaleLo;
      jc *= kRescaleLo;
      if (k - 1 <= n_max)
        for (int i = k - 1; i <= n_max; ++i) out[i] *= kRescaleLo;
    }
  }
  // normalize against whichever closed form is farther from a zero crossing
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / out[0] : j1 / out[1];
  for (int i = 0; i <= n_max; ++i) out[i] *= scale;
}

void sph_bessel_y_array(int n_max, double t, double* out) {
  check_order_arg(n_max, t, "sph_bessel_y_array");
  if (t == 0.0) throw std::domain_error("sph_bessel_y_array: argument must be > 0");
  out[0] = -std::cos(t) / t;
  if (n_max == 0) return;
  out[1] = -std::cos(t) / (t * t) - std::sin(t) / t;
  for (int k = 1; k < n_max; ++k)
    out[k + 1] = double(2 * k + 1) / t * out[k] - out[k - 1];  // may overflow to -inf for
                                                               // extreme n/t; callers guard
}

void sph_hankel1_array(int n_max, double t, cdouble* out) {
  std::vector<double> j(std::size_t(n_max) + 1), y(std::size_t(n_max) + 1);
  sph_bessel_j_array(n_max, t, j.data());
  sph_bessel_y_array(n_max, t, y.data());
  for (int i = 0; i <= n_max; ++i) out[i] = {j[std::size_t(i)], y[std::size_t(i)]};
}

double sph_bessel_j(int n, double t) {
  check_order_arg(n, t, "sph_bessel_j");
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n == 0) return std::sin(t) / t;
  if (t < 1.0 && n >= 1) return sph_j_series(n, t);
  std::vector<double> buf(std::size_t(n) + 1);
  sph_bessel_j_array(n, t, buf.data());
  return buf[std::size_t(n)];
}

double sph_bessel_y(int n, double t) {
  std::vector<double> buf(std::size_t(n) + 1);
  sph_bessel_y_array(n, t, buf.data());
  return buf[std::size_t(n)];
}

cdouble sph_hankel1(int n, double t) { return {sph_bessel_j(n, t), sph_bessel_y(n, t)}; }

cdouble riccati_z(int n, double t) {
  std::vector<cdouble> h(std::size_t(n) + 2);
  sph_hankel1_array(n + 1, t, h.data());
  return double(n + 1) * h[std::size_t(n)] - t * h[std::size_t(n) + 1];
}

// ---- Legendre / spherical harmonics ----------------------------------------

LegendreBlock::LegendreBlock(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("LegendreBlock: n_max must be >= 0");
  const std::size_t count = std::size_t(n_max + 1) * (n_max + 2) / 2;
  p_.resize(count);
  dp_.resize(count);
}

void LegendreBlock::compute(double theta) {
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  cos_t_ = x;
  sin_t_ = s;
  inv_sin_ = (std::abs(s) > kPoleGuard) ? 1.0 / s : 0.0;

  p_[0] = 0.28209479177387814347;  // 1/sqrt(4 pi)
  // diagonal and first subdiagonal
  for (int m = 1; m <= n_max_; ++m)
    p_[idx(m, m)] = -std::sqrt(double(2 * m + 1) / double(2 * m)) * s * p_[idx(m - 1, m - 1)];
  for (int m = 0; m < n_max_; ++m)
    p_[idx(m + 1, m)] = std::sqrt(double(2 * m + 3)) * x * p_[idx(m, m)];
  // upward in n at fixed m
  for (int m = 0; m <= n_max_; ++m) {
    for (int n = m + 2; n <= n_max_; ++n) {
      const double nn = double(n) * n, mm = double(m) * m;
      const double a = std::sqrt((4.0 * nn - 1.0) / (nn - mm));
      const double b = std::sqrt((double(2 * n + 1) * double(n - 1 + m) * double(n - 1 - m)) /
                                 (double(2 * n - 3) * (nn - mm)));
      p_[idx(n, m)] = a * x * p_[idx(n - 1, m)] - b * p_[idx(n - 2, m)];
    }
  }
  // d/dtheta via sin(theta) dP_n^m/dtheta = n cos(theta) P_n^m - e_nm P_{n-1}^m
  for (int n = 0; n <= n_max_; ++n) {
    for (int m = 0; m <= n; ++m) {
      double num = double(n) * x * p_[idx(n, m)];
      if (n > m) {
        const double e = std::sqrt((double(n) * n - double(m) * m) * double(2 * n + 1) /
                                   double(2 * n - 1));
        num -= e * p_[idx(n - 1, m)];
      }
      dp_[idx(n, m)] = num * inv_sin_;
    }
  }
}

cdouble sph_harmonic(int n, int m, double theta, double phi) {
  const int am = std::abs(m);
  if (n < 0 || am > n) throw std::invalid_argument("sph_harmonic: need |m| <= n");
  LegendreBlock block(n);
  block.compute(theta);
  double pv = block.P(n, am);
  if (m < 0 && (am & 1)) pv = -pv;  // Y_n^{-m} = (-1)^m conj(Y_n^m)
  return pv * std::polar(1.0, m * phi);
}

SphereAngles sphere_angles(const Vec3& xhat) {
  const double st = std::hypot(xhat.x, xhat.y);
  if (st <= kPoleGuard)
    throw std::domain_error("sphere_angles: tangent frame degenerates at a pole");
  const double theta = std::atan2(st, xhat.z);
  const double phi = std::atan2(xhat.y, xhat.x);
  const double cphi = xhat.x / st, sphi = xhat.y / st;
  return {theta, phi, st,
          Vec3{xhat.z * cphi, xhat.z * sphi, -st},
          Vec3{-sphi, cphi, 0.0}};
}

CVec3 vsh_U(int n, int m, const Vec3& xhat) {
  const int am = std::abs(m);
  if (n < 1 || am > n) throw std::invalid_argument("vsh_U: need n >= 1 and |m| <= n");
  const auto ang = sphere_angles(xhat);
  LegendreBlock block(n);
  block.compute(ang.theta);
  double A = block.dP(n, am);              // d/dtheta part
  double B = block.mPsin(n, am);           // |m| P / sin(theta)
  if (m < 0) {
    const double sgn = (am & 1) ? -1.0 : 1.0;
    A *= sgn;
    B *= -sgn;  // signed m flips the phi-derivative part
  }
  const double f = 1.0 / std::sqrt(double(n) * (n + 1));
  const cdouble ph = std::polar(1.0, m * ang.phi);
  const cdouble cth = f * A * ph;
  const cdouble cph = kImag * (f * B) * ph;
  return cth * ang.e_theta + cph * ang.e_phi;
}

CVec3 vsh_V(int n, int m, const Vec3& xhat) {
  // V = xhat x U: e_theta -> e_phi, e_phi -> -e_theta
  const int am = std::abs(m);
  if (n < 1 || am > n) throw std::invalid_argument("vsh_V: need n >= 1 and |m| <= n");
  const auto ang = sphere_angles(xhat);
  LegendreBlock block(n);
  block.compute(ang.theta);
  double A = block.dP(n, am);
  double B = block.mPsin(n, am);
  if (m < 0) {
    const double sgn = (am & 1) ? -1.0 : 1.0;
    A *= sgn;
    B *= -sgn;
  }
  const double f = 1.0 / std::sqrt(double(n) * (n + 1));
  const cdouble ph = std::polar(1.0, m * ang.phi);
  const cdouble cph = f * A * ph;
  const cdouble cth = -kImag * (f * B) * ph;
  return cth * ang.e_theta + cph * ang.e_phi;
}

// ---- Hankel ratio bounds ----------------------------------------------------

HankelBoundConstants HankelBoundConstants::compute(double L, double R, double rho) {
  if (!(L > 0) || !(R > 0) || !(rho > R))
    throw std::invalid_argument("HankelBoundConstants: need L > 0 and rho > R > 0");
  HankelBoundConstants c;
  c.L = L;
  c.R = R;
  c.rho = rho;
  c.c3 = std::sqrt(15.0) / 4.0;
  const double e1125 = std::exp(11.0 / 25.0);
  c.c4 = (25.0 + 11.0 * e1125) / (25.0 - 11.0 * e1125) * std::pow(16.0 / 15.0, 0.25);
  c.c1 = std::max(9.0, 1.0 + c.c4 * L * std::exp(-1.0 + c.c3 * (1.0 - R / rho)) /
                           (2.0 * kPi * c.c3 * (rho - R)));
  c.c2 = std::max(4.5, 0.5 + c.c4 / (c.c3 * (rho - R) * std::sqrt(2.0 * c.c3 * std::exp(1.0))));
  c.C1 = L / (2.0 * kPi * rho) + c.c1;
  c.C2 = 1.0 / rho + c.c2;
  return c;
}

RatioBoundSlack check_hankel_ratio_bounds(const HankelBoundConstants& cst,
                                          std::span<const double> ks, int n_max) {
  RatioBoundSlack out;
  out.decay = out.z_ratio = out.h_over_z = out.z_over_h =
      std::numeric_limits<double>::infinity();
  auto update = [&](double& cat, double slack, int n, double k) {
    cat = std::min(cat, slack);
    if (slack < out.min_slack || out.worst_n < 0) {
      out.min_slack = slack;
      out.worst_n = n;
      out.worst_k = k;
    }
  };
  out.min_slack = std::numeric_limits<double>::infinity();

  std::vector<cdouble> hR(std::size_t(n_max) + 2), hr(std::size_t(n_max) + 2);
  for (double k : ks) {
    const double tR = k * cst.R, tr = k * cst.rho;
    sph_hankel1_array(n_max + 1, tR, hR.data());
    sph_hankel1_array(n_max + 1, tr, hr.data());
    for (int n = 0; n <= n_max; ++n) {
      const cdouble zR = double(n + 1) * hR[std::size_t(n)] - tR * hR[std::size_t(n) + 1];
      const cdouble zr = double(n + 1) * hr[std::size_t(n)] - tr * hr[std::size_t(n) + 1];
      update(out.decay, 1.0 - std::abs(hr[std::size_t(n)] / hR[std::size_t(n)]), n, k);
      if (n == 0) continue;
      update(out.z_ratio, (4.0 + 10.0 * tR) * cst.rho / cst.R - std::abs(zr / zR), n, k);
      update(out.h_over_z, 7.0 - std::abs(hr[std::size_t(n)] / zR), n, k);
      if (k >= 2.0 * kPi / cst.L * (1.0 - 1e-12))
        update(out.z_over_h, cst.C1 * k * cst.rho - std::abs(zr / hR[std::size_t(n)]), n, k);
      else if (k <= 0.5 * (1.0 + 1e-12))
        update(out.z_over_h, cst.C2 * cst.rho - std::abs(zr / hR[std::size_t(n)]), n, k);
    }
  }
  return out;
}

double riccati_ratio_lower_slack(std::span<const double> ts, int n_max) {
  double min_slack = std::numeric_limits<double>::infinity();
  std::vector<cdouble> h(std::size_t(n_max) + 2);
  for (double t : ts) {
    sph_hankel1_array(n_max + 1, t, h.data());
    for (int n = 1; n <= n_max; ++n) {
      const cdouble z = double(n + 1) * h[std::size_t(n)] - t * h[std::size_t(n) + 1];
      const double lower = double(n) * (n + 1) / (2.0 * t * t + n + 1);
      min_slack = std::min(min_slack, std::abs(z / h[std::size_t(n)]) - lower);
    }
  }
  return min_slack;
}

}  // namespace mfis::specfun

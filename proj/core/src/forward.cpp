// Volume-potential forward solver: chunked structure-of-arrays sweep over the
// source quadrature with a per-wavenumber trig pass, so the geometry work
// (distances, direction moments) is shared by all wavenumbers of a batch.
#include "mfis/forward.hpp"

#include <cmath>
#include <stdexcept>

#include "mfis/parallel.hpp"

namespace mfis::forward {

namespace {

constexpr std::size_t kChunk = 512;
constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

void check_source(const WeightedSource& src) {
  if (src.points.size() != src.moments.size())
    throw std::invalid_argument("radiated_field: points/moments size mismatch");
}

void check_outside(const WeightedSource& src, const Vec3& x) {
  if (!(norm(x) > 0.5 * std::sqrt(3.0) * src.L))
    throw std::domain_error("radiated_field: point inside the source circumsphere");
}

}  // namespace

WeightedSource sample_source(const source::FourierSource& s,
                             const geom::CubeQuadrature& quad) {
  WeightedSource out;
  out.L = quad.L;
  const std::size_t n = quad.size();
  out.points.resize(n);
  out.moments = source::evaluate_on_tensor_grid(s, quad.nodes);
  for (std::size_t i = 0; i < n; ++i) {
    out.points[i] = quad.point(i);
    out.moments[i] = out.moments[i] * quad.weight(i);
  }
  return out;
}

WeightedSource sample_current(const std::function<Vec3(const Vec3&)>& J,
                              const geom::CubeQuadrature& quad) {
  WeightedSource out;
  out.L = quad.L;
  const std::size_t n = quad.size();
  out.points.resize(n);
  out.moments.resize(n);
  parallel_for(std::int64_t(n), 4096, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      const auto idx = std::size_t(i);
      out.points[idx] = quad.point(idx);
      out.moments[idx] = to_cvec3(J(out.points[idx]) * quad.weight(idx));
    }
  });
  return out;
}

std::vector<CVec3> radiated_field_batch(const WeightedSource& src,
                                        std::span<const double> ks,
                                        std::span<const Vec3> obs) {
  check_source(src);
  for (const double k : ks)
    if (!(k > 0)) throw std::invalid_argument("radiated_field: need k > 0");
  for (const Vec3& x : obs) check_outside(src, x);

  const std::size_t n = src.points.size();
  const std::size_t nk = ks.size();
  const std::size_t nobs = obs.size();
  std::vector<CVec3> out(nk * nobs);
  if (n == 0 || nk == 0 || nobs == 0) return out;

  // source SoA shared by all observation points
  std::vector<double> yx(n), yy(n), yz(n), mxr(n), mxi(n), myr(n), myi(n), mzr(n), mzi(n);
  for (std::size_t i = 0; i < n; ++i) {
    yx[i] = src.points[i].x;
    yy[i] = src.points[i].y;
    yz[i] = src.points[i].z;
    mxr[i] = src.moments[i].x.real();
    mxi[i] = src.moments[i].x.imag();
    myr[i] = src.moments[i].y.real();
    myi[i] = src.moments[i].y.imag();
    mzr[i] = src.moments[i].z.real();
    mzi[i] = src.moments[i].z.imag();
  }

  parallel_for(std::int64_t(nobs), 1, [&](std::int64_t ob, std::int64_t oe) {
    std::vector<CVec3> acc(nk);
    double dxb[kChunk], dyb[kChunk], dzb[kChunk], rb[kChunk], irb[kChunk];
    double gre[kChunk], gim[kChunk], tb[kChunk], sb[kChunk], cb[kChunk];
    for (std::int64_t io = ob; io < oe; ++io) {
      const Vec3 x = obs[std::size_t(io)];
      for (auto& a : acc) a = CVec3{};
      for (std::size_t c0 = 0; c0 < n; c0 += kChunk) {
        const std::size_t cn = std::min(kChunk, n - c0);
        for (std::size_t i = 0; i < cn; ++i) {
          const std::size_t g = c0 + i;
          const double dx = x.x - yx[g], dy = x.y - yy[g], dz = x.z - yz[g];
          const double r2 = dx * dx + dy * dy + dz * dz;
          const double ir2 = 1.0 / r2;
          const double r = std::sqrt(r2);
          dxb[i] = dx;
          dyb[i] = dy;
          dzb[i] = dz;
          rb[i] = r;
          irb[i] = r * ir2;
          gre[i] = (dx * mxr[g] + dy * myr[g] + dz * mzr[g]) * ir2;
          gim[i] = (dx * mxi[g] + dy * myi[g] + dz * mzi[g]) * ir2;
        }
        for (std::size_t ik = 0; ik < nk; ++ik) {
          const double k = ks[ik], invk = 1.0 / k;
          // separate sin / cos passes so each maps onto the vector math library
          for (std::size_t i = 0; i < cn; ++i) tb[i] = k * rb[i];
          for (std::size_t i = 0; i < cn; ++i) sb[i] = std::sin(tb[i]);
          for (std::size_t i = 0; i < cn; ++i) cb[i] = std::cos(tb[i]);
          double exr = 0, exi = 0, eyr = 0, eyi = 0, ezr = 0, ezi = 0;
          for (std::size_t i = 0; i < cn; ++i) {
            const std::size_t g = c0 + i;
            const double i4r = irb[i] * kInv4Pi;
            const double phr = cb[i] * i4r, phi = sb[i] * i4r;  // Phi_k
            const double u = invk * irb[i], u2 = u * u;         // 1/(kr)
            const double c1r = 1.0 - u2;                        // c1 = c1r + i u
            const double c2r = 3.0 * u2 - 1.0, c2i = -3.0 * u;
            const double s2r = c2r * gre[i] - c2i * gim[i];  // c2 (d.J)/r^2
            const double s2i = c2r * gim[i] + c2i * gre[i];
            const double vxr = c1r * mxr[g] - u * mxi[g] + s2r * dxb[i];
            const double vxi = c1r * mxi[g] + u * mxr[g] + s2i * dxb[i];
            const double vyr = c1r * myr[g] - u * myi[g] + s2r * dyb[i];
            const double vyi = c1r * myi[g] + u * myr[g] + s2i * dyb[i];
            const double vzr = c1r * mzr[g] - u * mzi[g] + s2r * dzb[i];
            const double vzi = c1r * mzi[g] + u * mzr[g] + s2i * dzb[i];
            exr += phr * vxr - phi * vxi;
            exi += phr * vxi + phi * vxr;
            eyr += phr * vyr - phi * vyi;
            eyi += phr * vyi + phi * vyr;
            ezr += phr * vzr - phi * vzi;
            ezi += phr * vzi + phi * vzr;
          }
          acc[ik] += CVec3{{exr, exi}, {eyr, eyi}, {ezr, ezi}};
        }
      }
      for (std::size_t ik = 0; ik < nk; ++ik)
        out[ik * nobs + std::size_t(io)] = acc[ik] * cdouble(0.0, ks[ik]);
    }
  });
  return out;
}

CVec3 radiated_field(const WeightedSource& src, double k, const Vec3& x) {
  return radiated_field_batch(src, std::span<const double>(&k, 1),
                              std::span<const Vec3>(&x, 1))[0];
}

CVec3 dipole_field(double k, const Vec3& y0, const Vec3& q, const Vec3& x) {
  if (!(k > 0)) throw std::invalid_argument("dipole_field: need k > 0");
  const Vec3 d = x - y0;
  const double r = norm(d);
  if (!(r > 0)) throw std::domain_error("dipole_field: x coincides with y0");
  const double u = 1.0 / (k * r), u2 = u * u;
  const Vec3 dhat = d / r;
  const cdouble phi = std::polar(kInv4Pi / r, k * r);
  const cdouble c1{1.0 - u2, u};
  const cdouble c2{3.0 * u2 - 1.0, -3.0 * u};
  return (cdouble(0.0, k) * phi) * (c1 * to_cvec3(q) + (c2 * dot(dhat, q)) * dhat);
}

CVec3 dipole_curl(double k, const Vec3& y0, const Vec3& q, const Vec3& x) {
  if (!(k > 0)) throw std::invalid_argument("dipole_curl: need k > 0");
  const Vec3 d = x - y0;
  const double r = norm(d);
  if (!(r > 0)) throw std::domain_error("dipole_curl: x coincides with y0");
  const Vec3 dhat = d / r;
  const cdouble phi = std::polar(kInv4Pi / r, k * r);
  return (cdouble(0.0, k) * phi * cdouble(-1.0 / r, k)) * to_cvec3(cross(dhat, q));
}

double trace_bound_constant(double L, double R, double kstar) {
  if (!(L > 0) || !(R > 0) || !(kstar > 0))
    throw std::invalid_argument("trace_bound_constant: need positive L, R, kstar");
  const double tau0 = R - 0.5 * std::sqrt(3.0) * L;
  if (!(tau0 > 0))
    throw std::invalid_argument("trace_bound_constant: need R > (sqrt 3 / 2) L");
  return R / (2.0 * std::sqrt(kPi) * tau0) *
         (2.0 + 1.0 / kstar + 4.0 / (kstar * kstar * tau0 * tau0)) * std::pow(L, 1.5);
}

}  // namespace mfis::forward

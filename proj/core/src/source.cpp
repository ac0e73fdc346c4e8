#include "mfis/source.hpp"

#include <cmath>
#include <stdexcept>

#include "mfis/parallel.hpp"

namespace mfis::source {

namespace {

constexpr double kAdmissTol = 1e-12;

void require_unit(const Vec3& p, const char* who) {
  if (std::abs(norm(p) - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(who) + ": polarization must be unit length");
}

}  // namespace

AdmissibilityResult is_admissible(const Vec3& p, int n_check) {
  require_unit(p, "is_admissible");
  if (n_check < 1) throw std::invalid_argument("is_admissible: need n_check >= 1");
  AdmissibilityResult out;
  out.admissible = true;
  out.c_min = 1.0;
  for (int i = -n_check; i <= n_check; ++i)
    for (int j = -n_check; j <= n_check; ++j)
      for (int k = -n_check; k <= n_check; ++k) {
        const Vec3i l{i, j, k};
        const int n2 = norm2(l);
        if (n2 == 0 || n2 > n_check * n_check) continue;
        const double c = norm(cross(p, to_vec3(l)));
        if (c <= kAdmissTol) out.admissible = false;
        out.c_min = std::min(out.c_min, c / std::sqrt(double(n2)));
      }
  return out;
}

LatticeFrame lattice_frame(const Vec3& p, const Vec3i& l) {
  LatticeFrame fr;
  fr.l = l;
  const Vec3 lv = to_vec3(l);
  fr.v = cross(p, lv);
  fr.w = cross(lv, fr.v);
  return fr;
}

std::vector<Vec3i> lattice_ball(int N) {
  if (N < 0) throw std::invalid_argument("lattice_ball: need N >= 0");
  std::vector<Vec3i> out;
  out.reserve(std::size_t((2 * N + 1) * (2 * N + 1) * (2 * N + 1)));
  for (int i = -N; i <= N; ++i)
    for (int j = -N; j <= N; ++j)
      for (int k = -N; k <= N; ++k)
        if (i * i + j * j + k * k <= N * N) out.push_back({i, j, k});
  return out;
}

int FourierSource::max_shell() const {
  int s = 0;
  for (const auto& [l, c] : a) s = std::max(s, norm2(l));
  for (const auto& [l, c] : b) s = std::max(s, norm2(l));
  return s;
}

CVec3 evaluate(const FourierSource& s, const Vec3& x) {
  const double tau = 2.0 * kPi / s.L;
  CVec3 J{};
  for (const auto& [l, al] : s.a) {
    const cdouble ph = std::polar(1.0, tau * dot(to_vec3(l), x));
    J += (al * ph) * s.p;
  }
  const cdouble itau = kImag * tau;
  for (const auto& [l, bl] : s.b) {
    const cdouble ph = std::polar(1.0, tau * dot(to_vec3(l), x));
    J += (itau * bl * ph) * cross(s.p, to_vec3(l));
  }
  return J;
}

std::vector<CVec3> evaluate_on_tensor_grid(const FourierSource& s,
                                           std::span<const double> axis) {
  if (axis.size() < 2) throw std::invalid_argument("evaluate_on_tensor_grid: need n >= 2");
  const int n = int(axis.size());
  const int N = int(std::ceil(std::sqrt(double(s.max_shell())) - 1e-12));
  const int M = 2 * N + 1;
  const double tau = 2.0 * kPi / s.L;

  // dense per-component mode cube C[c][(m1*M + m2)*M + m3], m_d in [-N, N]
  std::vector<cdouble> C(std::size_t(3) * M * M * M);
  auto cslot = [&](int c, const Vec3i& l) -> cdouble& {
    return C[((std::size_t(c) * M + std::size_t(l.x + N)) * M + std::size_t(l.y + N)) * M +
             std::size_t(l.z + N)];
  };
  const Vec3 p = s.p;
  for (const auto& [l, al] : s.a) {
    cslot(0, l) += al * p.x;
    cslot(1, l) += al * p.y;
    cslot(2, l) += al * p.z;
  }
  for (const auto& [l, bl] : s.b) {
    const Vec3 v = cross(p, to_vec3(l));
    const cdouble c = kImag * tau * bl;
    cslot(0, l) += c * v.x;
    cslot(1, l) += c * v.y;
    cslot(2, l) += c * v.z;
  }

  // phase table P[m+N][i] = exp(i tau m x_i) on the given axis
  std::vector<cdouble> P(std::size_t(M) * n);
  for (int m = -N; m <= N; ++m)
    for (int i = 0; i < n; ++i)
      P[std::size_t(m + N) * n + i] = std::polar(1.0, tau * m * axis[std::size_t(i)]);

  // contract one axis at a time: modes (m1,m2,m3) -> (m1,m2,iz) -> (m1,iy,iz)
  std::vector<cdouble> S1(std::size_t(3) * M * M * n);
  for (int c = 0; c < 3; ++c)
    for (int mm = 0; mm < M * M; ++mm) {
      cdouble* row = &S1[(std::size_t(c) * M * M + mm) * n];
      const cdouble* src = &C[(std::size_t(c) * M * M + mm) * M];
      for (int m3 = 0; m3 < M; ++m3) {
        const cdouble cv = src[m3];
        if (cv == cdouble{}) continue;
        const cdouble* ph = &P[std::size_t(m3) * n];
        for (int i = 0; i < n; ++i) row[i] += cv * ph[i];
      }
    }
  std::vector<cdouble>().swap(C);

  std::vector<cdouble> S2(std::size_t(3) * M * n * n);
  for (int c = 0; c < 3; ++c)
    for (int m1 = 0; m1 < M; ++m1) {
      cdouble* plane = &S2[(std::size_t(c) * M + m1) * n * n];
      for (int m2 = 0; m2 < M; ++m2) {
        const cdouble* row = &S1[((std::size_t(c) * M + m1) * M + m2) * n];
        const cdouble* ph = &P[std::size_t(m2) * n];
        for (int iy = 0; iy < n; ++iy) {
          const cdouble f = ph[iy];
          cdouble* dst = plane + std::size_t(iy) * n;
          for (int iz = 0; iz < n; ++iz) dst[iz] += f * row[iz];
        }
      }
    }
  std::vector<cdouble>().swap(S1);

  std::vector<CVec3> out(std::size_t(n) * n * n);
  parallel_for(n, 1, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t ix = b; ix < e; ++ix) {
      CVec3* dst = &out[std::size_t(ix) * n * n];
      for (int c = 0; c < 3; ++c)
        for (int m1 = 0; m1 < M; ++m1) {
          const cdouble f = P[std::size_t(m1) * n + std::size_t(ix)];
          const cdouble* plane = &S2[(std::size_t(c) * M + m1) * n * n];
          for (int iyz = 0; iyz < n * n; ++iyz) {
            const cdouble v = f * plane[iyz];
            if (c == 0)
              dst[iyz].x += v;
            else if (c == 1)
              dst[iyz].y += v;
            else
              dst[iyz].z += v;
          }
        }
    }
  });
  return out;
}

std::vector<CVec3> evaluate_on_uniform_grid(const FourierSource& s, int n_per_axis) {
  if (n_per_axis < 2) throw std::invalid_argument("evaluate_on_uniform_grid: need n >= 2");
  auto axis = std::vector<double>(std::size_t(n_per_axis));
  for (int i = 0; i < n_per_axis; ++i)
    axis[std::size_t(i)] = -0.5 * s.L + double(i) * s.L / double(n_per_axis - 1);
  return evaluate_on_tensor_grid(s, axis);
}

FourierSource project_scalar_fields(const ScalarField& f, const ScalarField& g,
                                    const Vec3& p, const geom::CubeQuadrature& quad,
                                    int N) {
  require_unit(p, "project_scalar_fields");
  if (N < 0) throw std::invalid_argument("project_scalar_fields: need N >= 0");
  if (N > 0 && !is_admissible(p, N).admissible)
    throw std::invalid_argument("project_scalar_fields: polarization not admissible");

  const int n = quad.order;
  const int M = 2 * N + 1;
  const double tau = 2.0 * kPi / quad.L;

  // conjugate-phase table with the per-axis weight folded in (all axes share
  // the same 1D rule): T[m+N][j] = w_j exp(-i tau m x_j)
  std::vector<cdouble> T(std::size_t(M) * n);
  for (int m = -N; m <= N; ++m)
    for (int j = 0; j < n; ++j)
      T[std::size_t(m + N) * n + j] =
          quad.weights[std::size_t(j)] *
          std::polar(1.0, -tau * m * quad.nodes[std::size_t(j)]);

  const double inv_vol = 1.0 / (quad.L * quad.L * quad.L);

  auto project_one = [&](const ScalarField& field) {
    std::vector<double> F(quad.size());
    parallel_for(std::int64_t(quad.size()), 4096, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i) F[std::size_t(i)] = field(quad.point(std::size_t(i)));
    });

    // (ix,iy,iz) -> (ix,iy,m3) -> (ix,m2,m3) -> (m1,m2,m3)
    std::vector<cdouble> G1(std::size_t(n) * n * M);
    for (int ixy = 0; ixy < n * n; ++ixy) {
      const double* src = &F[std::size_t(ixy) * n];
      cdouble* dst = &G1[std::size_t(ixy) * M];
      for (int m3 = 0; m3 < M; ++m3) {
        const cdouble* ph = &T[std::size_t(m3) * n];
        cdouble acc = 0.0;
        for (int iz = 0; iz < n; ++iz) acc += src[iz] * ph[iz];
        dst[m3] = acc;
      }
    }
    std::vector<cdouble> G2(std::size_t(n) * M * M);
    for (int ix = 0; ix < n; ++ix)
      for (int m2 = 0; m2 < M; ++m2) {
        const cdouble* ph = &T[std::size_t(m2) * n];
        cdouble* dst = &G2[(std::size_t(ix) * M + m2) * M];
        for (int iy = 0; iy < n; ++iy) {
          const cdouble f = ph[iy];
          const cdouble* src = &G1[(std::size_t(ix) * n + iy) * M];
          for (int m3 = 0; m3 < M; ++m3) dst[m3] += f * src[m3];
        }
      }
    std::vector<cdouble> A(std::size_t(M) * M * M);
    for (int m1 = 0; m1 < M; ++m1) {
      const cdouble* ph = &T[std::size_t(m1) * n];
      cdouble* dst = &A[std::size_t(m1) * M * M];
      for (int ix = 0; ix < n; ++ix) {
        const cdouble f = ph[ix];
        const cdouble* src = &G2[std::size_t(ix) * M * M];
        for (int mm = 0; mm < M * M; ++mm) dst[mm] += f * src[mm];
      }
    }
    return A;
  };

  FourierSource out;
  out.p = p;
  out.L = quad.L;
  const auto ball = lattice_ball(N);
  if (f) {
    const auto A = project_one(f);
    for (const Vec3i& l : ball)
      out.a[l] = inv_vol *
                 A[((std::size_t(l.x + N) * M) + std::size_t(l.y + N)) * M + std::size_t(l.z + N)];
  }
  if (g) {
    const auto B = project_one(g);
    for (const Vec3i& l : ball) {
      if (norm2(l) == 0) continue;  // b_0 is never stored
      out.b[l] = inv_vol *
                 B[((std::size_t(l.x + N) * M) + std::size_t(l.y + N)) * M + std::size_t(l.z + N)];
    }
  }
  return out;
}

FourierSource truncate(const FourierSource& s, int N) {
  if (N < 0) throw std::invalid_argument("truncate: need N >= 0");
  FourierSource out;
  out.p = s.p;
  out.L = s.L;
  for (const auto& [l, c] : s.a)
    if (norm2(l) <= N * N) out.a[l] = c;
  for (const auto& [l, c] : s.b)
    if (norm2(l) <= N * N) out.b[l] = c;
  return out;
}

double sobolev_norm(const FourierSource& s, double sigma) {
  if (sigma < 0) throw std::invalid_argument("sobolev_norm: need sigma >= 0");
  const double L = s.L;
  double sum = 0.0;
  for (const auto& [l, al] : s.a)
    sum += L * L * L * std::pow(1.0 + norm2(l), sigma) * std::norm(al);
  for (const auto& [l, bl] : s.b) {
    const double v2 = norm2(cross(s.p, to_vec3(l)));
    sum += 4.0 * kPi * kPi * L * std::pow(1.0 + norm2(l), sigma) * v2 * std::norm(bl);
  }
  return std::sqrt(sum);
}

ExampleSource example_source(int id) {
  ExampleSource ex;
  ex.id = id;
  const double s6 = std::sqrt(6.0);
  switch (id) {
    case 1:
      ex.p = Vec3{1.0, std::sqrt(2.0), std::sqrt(3.0)} / s6;
      ex.f = [s6](const Vec3& x) {
        const double dx = x.x - 0.15, dy = x.y - 0.15;
        return s6 * std::exp(-80.0 * (dx * dx + dy * dy + x.z * x.z));
      };
      ex.g = [s6](const Vec3& x) { return s6 / 10.0 * std::exp(-40.0 * norm2(x)); };
      ex.grad_g = [s6](const Vec3& x) {
        return (-80.0 * s6 / 10.0 * std::exp(-40.0 * norm2(x))) * x;
      };
      break;
    case 2:
      ex.p = Vec3{1.0, std::sqrt(2.0), std::sqrt(3.0)} / s6;
      ex.f = [s6](const Vec3& x) {
        if (0.0 <= x.x && x.x <= 0.4 && 0.0 <= x.y && x.y <= 0.4 && -0.2 <= x.z && x.z <= 0.2)
          return s6;
        const double dx = x.x + 0.25, dy = x.y + 0.25;
        if (dx * dx + dy * dy + x.z * x.z <= 0.15 * 0.15) return 0.5 * s6;
        return 0.0;
      };
      ex.g = [](const Vec3&) { return 0.0; };
      ex.grad_g = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
      break;
    case 3:
      ex.p = Vec3{std::sqrt(5.0), -1.0, std::sqrt(3.0)} / 3.0;
      ex.f = [](const Vec3& x) {
        const double dx = x.x - 0.15, dy = x.y - 0.15;
        return 3.0 * std::exp(-80.0 * (dx * dx + dy * dy + x.z * x.z));
      };
      ex.g = [](const Vec3& x) { return 0.3 * std::exp(-40.0 * norm2(x)); };
      ex.grad_g = [](const Vec3& x) { return (-80.0 * 0.3 * std::exp(-40.0 * norm2(x))) * x; };
      break;
    default:
      throw std::invalid_argument("example_source: id must be 1, 2, or 3");
  }
  return ex;
}

}  // namespace mfis::source

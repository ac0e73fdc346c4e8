// Coefficient recovery: VSH-process the measured traces shell by shell, then
// evaluate the two explicit surface functionals on the work sphere for every
// lattice vector, and finally correct the mean with the k* block.
#include "mfis/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>

#include "mfis/geometry.hpp"
#include "mfis/parallel.hpp"

namespace mfis::inversion {
namespace {

// Index of k in ks (relative tolerance); distinct shell wavenumbers are
// separated by ~1e-3 relative or more, so 1e-9 cannot mis-bind.
std::size_t find_wavenumber(std::span<const double> ks, double k) {
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (std::abs(ks[i] - k) <= 1e-9 * k) return i;
  throw std::runtime_error("reconstruct: measurement set lacks wavenumber k=" +
                           std::to_string(k));
}

// Per-axis integer powers of the unit phases e^{-i (2 pi / L) x_d} at every
// grid point, power-major so the fixed-l integral loop is unit-stride.
// Negative powers are conjugates of the stored positive ones.
struct PhaseTables {
  int N = 0;
  std::size_t npts = 0;
  std::vector<cdouble> pw[3];  // pw[d][p * npts + i], p = 0..N

  PhaseTables(const geom::SphereGrid& grid, int order, double L) : N(order), npts(grid.size()) {
    const double tau = 2.0 * kPi / L;
    for (auto& t : pw) t.assign(std::size_t(N + 1) * npts, cdouble{1.0, 0.0});
    parallel_for(std::int64_t(npts), 4096, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t i = lo; i < hi; ++i) {
        const Vec3 x = grid.point(std::size_t(i));
        const cdouble base[3] = {std::polar(1.0, -tau * x.x), std::polar(1.0, -tau * x.y),
                                 std::polar(1.0, -tau * x.z)};
        for (int d = 0; d < 3; ++d)
          for (int p = 1; p <= N; ++p)
            pw[d][std::size_t(p) * npts + std::size_t(i)] =
                pw[d][std::size_t(p - 1) * npts + std::size_t(i)] * base[d];
      }
    });
  }

  // conj(phi_l) at grid point i.
  cdouble at(const Vec3i& l, std::size_t i) const {
    const cdouble u = pw[0][std::size_t(std::abs(l.x)) * npts + i];
    const cdouble v = pw[1][std::size_t(std::abs(l.y)) * npts + i];
    const cdouble w = pw[2][std::size_t(std::abs(l.z)) * npts + i];
    return (l.x < 0 ? std::conj(u) : u) * (l.y < 0 ? std::conj(v) : v) *
           (l.z < 0 ? std::conj(w) : w);
  }
};

// Traces synthesized on the work-sphere grid for one wavenumber.
struct ShellTraces {
  std::vector<CVec3> T, C;  // xhat x E, xhat x curl E at grid points
  int dropped = 0;
};

ShellTraces traces_on_work_sphere(const fieldio::MeasurementSet& data, std::size_t ik,
                                  const geom::SphereGrid& grid,
                                  const std::vector<double>& obs_weights, int n_max) {
  const auto coef = fieldio::vsh_decompose(data.points, obs_weights, data.traces[ik],
                                           data.ks[ik], data.R, n_max);
  const auto prop = fieldio::propagate(coef, grid.radius);
  ShellTraces out;
  out.T = fieldio::vsh_synthesize(prop.field, grid);
  out.C = fieldio::vsh_synthesize(prop.curl, grid);
  out.dropped = prop.field.dropped_modes;
  return out;
}

double sinc_factor(int j, double lambda) {
  const double t = (double(j) - lambda) * kPi;
  return std::sin(t) / t;
}

}  // namespace

int truncation_order(double delta, double tau) {
  if (!(delta > 0.0)) throw std::invalid_argument("truncation_order: need delta > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("truncation_order: need tau > 0");
  return int(std::floor(tau * std::pow(delta, -0.25))) + 1;
}

std::vector<WavenumberShell> wavenumber_shells(int N, double L) {
  if (N < 1) throw std::invalid_argument("wavenumber_shells: need N >= 1");
  if (!(L > 0.0)) throw std::invalid_argument("wavenumber_shells: need L > 0");
  std::map<int, std::vector<Vec3i>> by_shell;
  for (const Vec3i& l : source::lattice_ball(N))
    if (l != Vec3i{0, 0, 0}) by_shell[norm2(l)].push_back(l);
  std::vector<WavenumberShell> shells;
  shells.reserve(by_shell.size());
  for (auto& [s, lattice] : by_shell)
    shells.push_back({s, 2.0 * kPi * std::sqrt(double(s)) / L, std::move(lattice)});
  return shells;
}

std::vector<double> wavenumber_list(int N, double L, double lambda) {
  if (!(lambda > 0.0 && lambda < 0.5))
    throw std::invalid_argument("wavenumber_list: need 0 < lambda < 1/2");
  std::vector<double> ks;
  for (const auto& shell : wavenumber_shells(N, L)) ks.push_back(shell.k);
  ks.push_back(2.0 * kPi * lambda / L);
  return ks;
}

ReconstructionResult reconstruct(const fieldio::MeasurementSet& data,
                                 const ReconstructionConfig& cfg) {
  const double L = data.L;
  if (!(L > 0.0) || !(data.R > 0.0))
    throw std::invalid_argument("reconstruct: measurement set lacks L or R");
  if (data.ks.size() != data.traces.size())
    throw std::invalid_argument("reconstruct: trace blocks do not match wavenumbers");
  if (std::abs(norm(cfg.p) - 1.0) > 1e-9)
    throw std::invalid_argument("reconstruct: polarization must be a unit vector");
  if (!(cfg.lambda > 0.0 && cfg.lambda < 0.5 && cfg.lambda < L / (4.0 * kPi)))
    throw std::invalid_argument("reconstruct: need 0 < lambda < min(1/2, L/(4 pi))");
  if (!(cfg.rho > data.R))
    throw std::invalid_argument("reconstruct: work sphere must lie outside Gamma_R");
  if (cfg.n_max < 1) throw std::invalid_argument("reconstruct: need n_max >= 1");
  if (cfg.N < 0) throw std::invalid_argument("reconstruct: need N >= 0");

  int N = cfg.N;
  if (N == 0) {
    if (!(data.delta > 0.0))
      throw std::invalid_argument(
          "reconstruct: noise-free data, set a truncation order N explicitly");
    N = truncation_order(data.delta, cfg.tau);
  }
  if (!source::is_admissible(cfg.p, N).admissible)
    throw std::invalid_argument("reconstruct: polarization is not admissible up to N");

  const auto grid = geom::sphere_grid(cfg.grid_n_theta, cfg.grid_n_phi, cfg.rho);
  const std::size_t npts = grid.size();
  std::vector<double> wgt(npts);
  for (std::size_t i = 0; i < npts; ++i) wgt[i] = grid.weight(i);
  const PhaseTables phases(grid, N, L);
  const auto obs_weights = data.surface_weights();

  ReconstructionResult res;
  res.N = N;
  res.source.p = cfg.p;
  res.source.L = L;

  // Shell loop: one VSH pass per wavenumber, then every lattice vector of the
  // shell reuses the synthesized traces.
  for (const auto& shell : wavenumber_shells(N, L)) {
    const std::size_t ik = find_wavenumber(data.ks, shell.k);
    const ShellTraces tr =
        traces_on_work_sphere(data, ik, grid, obs_weights, cfg.n_max);
    res.dropped_modes += tr.dropped;

    const double k = shell.k;
    const cdouble ca = cdouble(0.0, 2.0 * kPi * double(shell.s) / L);
    const cdouble cb = cdouble(0.0, 2.0 * kPi / L);
    const std::size_t nl = shell.lattice.size();
    std::vector<cdouble> av(nl), bv(nl);
    parallel_for(std::int64_t(nl), 1, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t il = lo; il < hi; ++il) {
        const Vec3i l = shell.lattice[std::size_t(il)];
        const auto frame = source::lattice_frame(cfg.p, l);
        cdouble Ia{}, Ib{};
        for (std::size_t i = 0; i < npts; ++i) {
          const cdouble ph = wgt[i] * phases.at(l, i);
          Ia += ph * (dot(tr.C[i], frame.w) + ca * dot(tr.T[i], frame.v));
          Ib += ph * (dot(tr.C[i], frame.v) - cb * dot(tr.T[i], frame.w));
        }
        const double vv = norm2(frame.v);
        av[std::size_t(il)] = Ia / (cdouble(0.0, k) * vv * L * L * L);
        bv[std::size_t(il)] = -Ib / (2.0 * kPi * k * L * L * vv);
      }
    });
    for (std::size_t il = 0; il < nl; ++il) {
      res.source.a[shell.lattice[il]] = av[il];
      res.source.b[shell.lattice[il]] = bv[il];
    }
  }

  // Mean block: the a-type functional at l* = (lambda, 0, 0), k* = 2 pi
  // lambda / L, equals sum_j sinc((j - lambda) pi) a_{(j,0,0)}; solve for the
  // j = 0 term using the already recovered line coefficients.
  const double kstar = 2.0 * kPi * cfg.lambda / L;
  const std::size_t ik = find_wavenumber(data.ks, kstar);
  const ShellTraces tr = traces_on_work_sphere(data, ik, grid, obs_weights, cfg.n_max);
  res.dropped_modes += tr.dropped;

  const Vec3 lstar{cfg.lambda, 0.0, 0.0};
  const Vec3 vstar = cross(cfg.p, lstar);
  const Vec3 wstar = cross(lstar, vstar);
  const cdouble ca = cdouble(0.0, 2.0 * kPi * cfg.lambda * cfg.lambda / L);
  cdouble Ia{};
  for (std::size_t i = 0; i < npts; ++i) {
    const cdouble ph = wgt[i] * std::polar(1.0, -kstar * grid.point(i).x);
    Ia += ph * (dot(tr.C[i], wstar) + ca * dot(tr.T[i], vstar));
  }
  cdouble line = Ia / (cdouble(0.0, kstar) * norm2(vstar) * L * L * L);
  if (cfg.a0_two_sided) {
    for (int j = -N; j <= N; ++j) {
      if (j == 0) continue;
      line -= sinc_factor(j, cfg.lambda) * res.source.coeff_a({j, 0, 0});
    }
  } else {
    // f real => a_{-l} = conj(a_l); fold the negative-j terms.
    for (int j = 1; j <= N; ++j) {
      line -= sinc_factor(j, cfg.lambda) * res.source.coeff_a({j, 0, 0});
      line -= sinc_factor(-j, cfg.lambda) * std::conj(res.source.coeff_a({j, 0, 0}));
    }
  }
  const double t = cfg.lambda * kPi;
  res.source.a[Vec3i{0, 0, 0}] = (t / std::sin(t)) * line;
  return res;
}

}  // namespace mfis::inversion

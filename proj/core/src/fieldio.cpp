// fieldio implementation: VSH analysis/synthesis with per-row Legendre reuse
// on structured grids, diagonal Calderon/propagation maps in coefficient
// space, the multiplicative noise model, and JSON/CSV serialization.
#include "mfis/fieldio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "mfis/parallel.hpp"
#include "mfis/specfun.hpp"

namespace mfis::fieldio {

namespace {

using specfun::LegendreBlock;
using specfun::VshLayout;

// basis scalars for signed m, matching vsh_U / vsh_V:
//   U = f e^{im phi} (A e_theta + i B e_phi), V = f e^{im phi} (-i B e_theta + A e_phi)
inline void ab_pair(const LegendreBlock& blk, int n, int m, double& A, double& B) {
  const int am = m < 0 ? -m : m;
  A = blk.dP(n, am);
  B = blk.mPsin(n, am);
  if (m < 0) {
    const double sgn = (am & 1) ? -1.0 : 1.0;
    A *= sgn;
    B *= -sgn;
  }
}

std::vector<double> mode_factors(int n_max) {
  std::vector<double> f(std::size_t(n_max) + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) f[std::size_t(n)] = 1.0 / std::sqrt(double(n) * (n + 1));
  return f;
}

void check_expansion_args(double k, double radius, int n_max, const char* who) {
  if (!(k > 0)) throw std::invalid_argument(std::string(who) + ": need k > 0");
  if (!(radius > 0)) throw std::invalid_argument(std::string(who) + ": need radius > 0");
  if (n_max < 1) throw std::invalid_argument(std::string(who) + ": need n_max >= 1");
}

// z_n(t) = (n+1) h_n(t) - t h_{n+1}(t) for all n <= n_max from one Hankel pass
struct HankelPair {
  std::vector<cdouble> h, z;
  HankelPair(int n_max, double t) : h(std::size_t(n_max) + 2), z(std::size_t(n_max) + 1) {
    specfun::sph_hankel1_array(n_max + 1, t, h.data());
    for (int n = 0; n <= n_max; ++n)
      z[std::size_t(n)] = double(n + 1) * h[std::size_t(n)] - t * h[std::size_t(n + 1)];
  }
};

inline bool usable(const cdouble& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag()) && std::abs(v) > 1e-300;
}

}  // namespace

cdouble VshCoefficients::alpha_at(int n, int m) const {
  const VshLayout lay{n_max};
  if (n < 1 || n > n_max || std::abs(m) > n)
    throw std::out_of_range("VshCoefficients: mode index out of range");
  return alpha[lay.index(n, m)];
}

cdouble VshCoefficients::beta_at(int n, int m) const {
  const VshLayout lay{n_max};
  if (n < 1 || n > n_max || std::abs(m) > n)
    throw std::out_of_range("VshCoefficients: mode index out of range");
  return beta[lay.index(n, m)];
}

VshCoefficients vsh_decompose(std::span<const Vec3> points,
                              std::span<const double> weights,
                              std::span<const CVec3> values, double k,
                              double radius, int n_max) {
  check_expansion_args(k, radius, n_max, "vsh_decompose");
  if (points.size() != weights.size() || points.size() != values.size())
    throw std::invalid_argument("vsh_decompose: span sizes differ");

  const VshLayout lay{n_max};
  const std::size_t n_modes = lay.size();
  const auto f = mode_factors(n_max);
  const double inv_r2 = 1.0 / (radius * radius);

  const auto blocks = split_blocks(std::int64_t(points.size()), 2048);
  std::vector<std::vector<cdouble>> pa(blocks.size()), pb(blocks.size());
  parallel_run(blocks.size(), [&](std::size_t bi) {
    auto& za = pa[bi];
    auto& zb = pb[bi];
    za.assign(n_modes, cdouble{});
    zb.assign(n_modes, cdouble{});
    LegendreBlock blk(n_max);
    std::vector<cdouble> ph(std::size_t(n_max) + 1);
    for (std::int64_t ii = blocks[bi].begin; ii < blocks[bi].end; ++ii) {
      const std::size_t i = std::size_t(ii);
      const auto ang = specfun::sphere_angles(normalized(points[i]));
      blk.compute(ang.theta);
      const cdouble t_th = dot(ang.e_theta, values[i]);
      const cdouble t_ph = dot(ang.e_phi, values[i]);
      const double w = weights[i] * inv_r2;
      // ph[m] = e^{-i m phi}
      const cdouble base(std::cos(ang.phi), -std::sin(ang.phi));
      ph[0] = 1.0;
      for (int m = 1; m <= n_max; ++m) ph[std::size_t(m)] = ph[std::size_t(m - 1)] * base;
      for (int n = 1; n <= n_max; ++n) {
        const double fn = f[std::size_t(n)];
        for (int m = -n; m <= n; ++m) {
          double A, B;
          ab_pair(blk, n, m, A, B);
          const cdouble e = m >= 0 ? ph[std::size_t(m)] : std::conj(ph[std::size_t(-m)]);
          const cdouble cu = A * t_th - kImag * (B * t_ph);  // conj(U) . T / (f e^{-im phi})
          const cdouble cv = kImag * (B * t_th) + A * t_ph;  // conj(V) . T likewise
          const std::size_t idx = lay.index(n, m);
          za[idx] += (w * fn) * e * cu;
          zb[idx] += (w * fn) * e * cv;
        }
      }
    }
  });

  VshCoefficients out;
  out.k = k;
  out.radius = radius;
  out.n_max = n_max;
  out.alpha.assign(n_modes, cdouble{});
  out.beta.assign(n_modes, cdouble{});
  for (std::size_t bi = 0; bi < blocks.size(); ++bi)
    for (std::size_t idx = 0; idx < n_modes; ++idx) {
      out.alpha[idx] += pa[bi][idx];
      out.beta[idx] += pb[bi][idx];
    }
  return out;
}

VshCoefficients vsh_decompose(const geom::SphereGrid& grid,
                              std::span<const CVec3> values, double k, int n_max) {
  check_expansion_args(k, grid.radius, n_max, "vsh_decompose");
  if (values.size() != grid.size())
    throw std::invalid_argument("vsh_decompose: values do not match the grid");

  const VshLayout lay{n_max};
  const auto f = mode_factors(n_max);
  VshCoefficients out;
  out.k = k;
  out.radius = grid.radius;
  out.n_max = n_max;
  out.alpha.assign(lay.size(), cdouble{});
  out.beta.assign(lay.size(), cdouble{});

  const int np = grid.n_phi, M = 2 * n_max + 1;
  std::vector<double> cphi(np), sphi(np);
  for (int i = 0; i < np; ++i) {
    cphi[std::size_t(i)] = std::cos(grid.phi[std::size_t(i)]);
    sphi[std::size_t(i)] = std::sin(grid.phi[std::size_t(i)]);
  }

  LegendreBlock blk(n_max);
  std::vector<cdouble> s_th(M), s_ph(M);
  for (int j = 0; j < grid.n_theta; ++j) {
    blk.compute(grid.theta[std::size_t(j)]);
    const double ct = blk.cos_theta(), st = blk.sin_theta();
    std::fill(s_th.begin(), s_th.end(), cdouble{});
    std::fill(s_ph.begin(), s_ph.end(), cdouble{});
    for (int i = 0; i < np; ++i) {
      const CVec3& T = values[std::size_t(grid.index(j, i))];
      const double cp = cphi[std::size_t(i)], sp = sphi[std::size_t(i)];
      const Vec3 e_th{ct * cp, ct * sp, -st};
      const Vec3 e_ph{-sp, cp, 0.0};
      const cdouble t_th = dot(e_th, T), t_ph = dot(e_ph, T);
      const cdouble base(cp, -sp);  // e^{-i phi_i}
      cdouble phm = 1.0;
      s_th[std::size_t(n_max)] += t_th;  // m = 0 slot
      s_ph[std::size_t(n_max)] += t_ph;
      for (int m = 1; m <= n_max; ++m) {
        phm *= base;
        s_th[std::size_t(n_max + m)] += t_th * phm;
        s_ph[std::size_t(n_max + m)] += t_ph * phm;
        s_th[std::size_t(n_max - m)] += t_th * std::conj(phm);
        s_ph[std::size_t(n_max - m)] += t_ph * std::conj(phm);
      }
    }
    const double wj = grid.w_theta[std::size_t(j)] * grid.w_phi;
    for (int n = 1; n <= n_max; ++n) {
      const double fn = f[std::size_t(n)];
      for (int m = -n; m <= n; ++m) {
        double A, B;
        ab_pair(blk, n, m, A, B);
        const cdouble sth = s_th[std::size_t(n_max + m)], sph = s_ph[std::size_t(n_max + m)];
        const std::size_t idx = lay.index(n, m);
        out.alpha[idx] += (wj * fn) * (A * sth - kImag * (B * sph));
        out.beta[idx] += (wj * fn) * (kImag * (B * sth) + A * sph);
      }
    }
  }
  return out;
}

std::vector<CVec3> vsh_synthesize(const VshCoefficients& c, std::span<const Vec3> points) {
  check_expansion_args(c.k, c.radius, c.n_max, "vsh_synthesize");
  const VshLayout lay{c.n_max};
  if (c.alpha.size() != lay.size() || c.beta.size() != lay.size())
    throw std::invalid_argument("vsh_synthesize: coefficient arrays inconsistent");
  const auto f = mode_factors(c.n_max);

  std::vector<CVec3> out(points.size());
  parallel_for(std::int64_t(points.size()), 256, [&](std::int64_t b, std::int64_t e) {
    LegendreBlock blk(c.n_max);
    std::vector<cdouble> ph(std::size_t(c.n_max) + 1);
    for (std::int64_t ii = b; ii < e; ++ii) {
      const std::size_t i = std::size_t(ii);
      const auto ang = specfun::sphere_angles(normalized(points[i]));
      blk.compute(ang.theta);
      const cdouble base(std::cos(ang.phi), std::sin(ang.phi));  // e^{+i phi}
      ph[0] = 1.0;
      for (int m = 1; m <= c.n_max; ++m) ph[std::size_t(m)] = ph[std::size_t(m - 1)] * base;
      cdouble t_th{}, t_ph{};
      for (int n = 1; n <= c.n_max; ++n) {
        const double fn = f[std::size_t(n)];
        for (int m = -n; m <= n; ++m) {
          double A, B;
          ab_pair(blk, n, m, A, B);
          const cdouble e = m >= 0 ? ph[std::size_t(m)] : std::conj(ph[std::size_t(-m)]);
          const std::size_t idx = lay.index(n, m);
          const cdouble al = c.alpha[idx], be = c.beta[idx];
          t_th += fn * e * (A * al - kImag * (B * be));
          t_ph += fn * e * (kImag * (B * al) + A * be);
        }
      }
      out[i] = t_th * ang.e_theta + t_ph * ang.e_phi;
    }
  });
  return out;
}

std::vector<CVec3> vsh_synthesize(const VshCoefficients& c, const geom::SphereGrid& grid) {
  check_expansion_args(c.k, c.radius, c.n_max, "vsh_synthesize");
  const VshLayout lay{c.n_max};
  if (c.alpha.size() != lay.size() || c.beta.size() != lay.size())
    throw std::invalid_argument("vsh_synthesize: coefficient arrays inconsistent");
  const auto f = mode_factors(c.n_max);

  const int np = grid.n_phi, M = 2 * c.n_max + 1;
  std::vector<CVec3> out(grid.size());
  std::vector<double> cphi(np), sphi(np);
  for (int i = 0; i < np; ++i) {
    cphi[std::size_t(i)] = std::cos(grid.phi[std::size_t(i)]);
    sphi[std::size_t(i)] = std::sin(grid.phi[std::size_t(i)]);
  }

  parallel_for(grid.n_theta, 1, [&](std::int64_t jb, std::int64_t je) {
    LegendreBlock blk(c.n_max);
    std::vector<cdouble> g_th(M), g_ph(M);
    for (std::int64_t j = jb; j < je; ++j) {
      blk.compute(grid.theta[std::size_t(j)]);
      const double ct = blk.cos_theta(), st = blk.sin_theta();
      std::fill(g_th.begin(), g_th.end(), cdouble{});
      std::fill(g_ph.begin(), g_ph.end(), cdouble{});
      for (int n = 1; n <= c.n_max; ++n) {
        const double fn = f[std::size_t(n)];
        for (int m = -n; m <= n; ++m) {
          double A, B;
          ab_pair(blk, n, m, A, B);
          const std::size_t idx = lay.index(n, m);
          const cdouble al = c.alpha[idx], be = c.beta[idx];
          g_th[std::size_t(c.n_max + m)] += fn * (A * al - kImag * (B * be));
          g_ph[std::size_t(c.n_max + m)] += fn * (kImag * (B * al) + A * be);
        }
      }
      for (int i = 0; i < np; ++i) {
        const double cp = cphi[std::size_t(i)], sp = sphi[std::size_t(i)];
        const cdouble base(cp, sp);
        cdouble t_th = g_th[std::size_t(c.n_max)], t_ph = g_ph[std::size_t(c.n_max)];
        cdouble phm = 1.0;
        for (int m = 1; m <= c.n_max; ++m) {
          phm *= base;
          t_th += g_th[std::size_t(c.n_max + m)] * phm + g_th[std::size_t(c.n_max - m)] * std::conj(phm);
          t_ph += g_ph[std::size_t(c.n_max + m)] * phm + g_ph[std::size_t(c.n_max - m)] * std::conj(phm);
        }
        const Vec3 e_th{ct * cp, ct * sp, -st};
        const Vec3 e_ph{-sp, cp, 0.0};
        out[std::size_t(grid.index(int(j), i))] = t_th * e_th + t_ph * e_ph;
      }
    }
  });
  return out;
}

VshCoefficients calderon_curl_trace(const VshCoefficients& field) {
  check_expansion_args(field.k, field.radius, field.n_max, "calderon_curl_trace");
  const double k = field.k, R = field.radius;
  const HankelPair hp(field.n_max, k * R);
  const VshLayout lay{field.n_max};

  VshCoefficients out = field;
  out.dropped_modes = 0;
  for (int n = 1; n <= field.n_max; ++n) {
    const cdouble h = hp.h[std::size_t(n)], z = hp.z[std::size_t(n)];
    cdouble ra = k * k * R * h / z;   // alpha' = ra beta
    cdouble rb = (1.0 / R) * z / h;   // beta'  = rb alpha
    if (!usable(h) || !usable(z) || !usable(ra) || !usable(rb)) {
      ra = rb = 0.0;
      out.dropped_modes += 2 * n + 1;
    }
    for (int m = -n; m <= n; ++m) {
      const std::size_t idx = lay.index(n, m);
      out.alpha[idx] = ra * field.beta[idx];
      out.beta[idx] = rb * field.alpha[idx];
    }
  }
  return out;
}

PropagatedTraces propagate(const VshCoefficients& field_trace, double rho) {
  check_expansion_args(field_trace.k, field_trace.radius, field_trace.n_max, "propagate");
  if (!(rho >= field_trace.radius))
    throw std::invalid_argument("propagate: only outward propagation (rho >= radius)");
  const double k = field_trace.k, R = field_trace.radius;
  const HankelPair at_R(field_trace.n_max, k * R);
  const HankelPair at_rho(field_trace.n_max, k * rho);
  const VshLayout lay{field_trace.n_max};

  PropagatedTraces out{field_trace, field_trace};
  out.field.radius = rho;
  out.curl.radius = rho;
  out.field.dropped_modes = 0;
  out.curl.dropped_modes = 0;
  for (int n = 1; n <= field_trace.n_max; ++n) {
    const cdouble hR = at_R.h[std::size_t(n)], zR = at_R.z[std::size_t(n)];
    const cdouble hr = at_rho.h[std::size_t(n)], zr = at_rho.z[std::size_t(n)];
    cdouble fa = hr / hR;                  // field: alpha ratio
    cdouble fb = (R / rho) * zr / zR;      // field: beta ratio
    cdouble ca = k * k * R * hr / zR;      // curl: alpha' = ca beta
    cdouble cb = (1.0 / rho) * zr / hR;    // curl: beta'  = cb alpha
    if (!usable(hR) || !usable(zR) || !usable(fa) || !usable(fb) || !usable(ca) ||
        !usable(cb)) {
      fa = fb = ca = cb = 0.0;
      out.field.dropped_modes += 2 * n + 1;
      out.curl.dropped_modes += 2 * n + 1;
    }
    for (int m = -n; m <= n; ++m) {
      const std::size_t idx = lay.index(n, m);
      out.field.alpha[idx] = fa * field_trace.alpha[idx];
      out.field.beta[idx] = fb * field_trace.beta[idx];
      out.curl.alpha[idx] = ca * field_trace.beta[idx];
      out.curl.beta[idx] = cb * field_trace.alpha[idx];
    }
  }
  return out;
}

std::vector<double> MeasurementSet::surface_weights() const {
  if (!weights.empty()) {
    if (weights.size() != points.size())
      throw std::invalid_argument("MeasurementSet: weights do not match points");
    return weights;
  }
  return std::vector<double>(points.size(), 4.0 * kPi * R * R / double(points.size()));
}

MeasurementSet generate_measurements(const forward::WeightedSource& src,
                                     std::span<const double> ks,
                                     std::span<const Vec3> points, double R,
                                     std::span<const double> weights) {
  if (!(R > 0)) throw std::invalid_argument("generate_measurements: need R > 0");
  if (points.empty() || ks.empty())
    throw std::invalid_argument("generate_measurements: empty wavenumbers or points");
  if (!weights.empty() && weights.size() != points.size())
    throw std::invalid_argument("generate_measurements: weights do not match points");
  for (const Vec3& x : points)
    if (std::abs(norm(x) - R) > 1e-9 * R)
      throw std::invalid_argument("generate_measurements: point off the sphere");

  MeasurementSet m;
  m.L = src.L;
  m.R = R;
  m.ks.assign(ks.begin(), ks.end());
  m.points.assign(points.begin(), points.end());
  m.weights.assign(weights.begin(), weights.end());
  const auto fields = forward::radiated_field_batch(src, ks, points);
  m.traces.resize(ks.size());
  for (std::size_t ik = 0; ik < ks.size(); ++ik) {
    m.traces[ik].resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      m.traces[ik][i] = forward::tangential_trace(points[i], fields[ik * points.size() + i]);
  }
  return m;
}

MeasurementSet add_noise(const MeasurementSet& clean, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || delta >= 1.0)
    throw std::invalid_argument("add_noise: need 0 <= delta < 1");
  MeasurementSet out = clean;
  out.delta = delta;
  out.seed = seed;
  const auto draw = [](std::mt19937_64& g) {
    return 2.0 * (double(g() >> 11) * 0x1.0p-53) - 1.0;  // U(-1, 1)
  };
  for (std::size_t ik = 0; ik < clean.ks.size(); ++ik) {
    std::mt19937_64 gen(seed ^ (0x9E3779B97F4A7C15ULL * (std::uint64_t(ik) + 1)));
    for (std::size_t i = 0; i < clean.points.size(); ++i) {
      const auto ang = specfun::sphere_angles(normalized(clean.points[i]));
      const CVec3& T = clean.traces[ik][i];
      const cdouble c_th = dot(ang.e_theta, T), c_ph = dot(ang.e_phi, T);
      const double r1 = draw(gen), r2 = draw(gen);
      const double r3 = draw(gen), r4 = draw(gen);
      const cdouble d_th = delta * r1 * std::abs(c_th) * std::polar(1.0, kPi * r2);
      const cdouble d_ph = delta * r3 * std::abs(c_ph) * std::polar(1.0, kPi * r4);
      out.traces[ik][i] = T + d_th * ang.e_theta + d_ph * ang.e_phi;
    }
  }
  return out;
}

namespace {

constexpr const char* kFormatTag = "mfis-measurements";
constexpr int kFormatVersion = 1;

}  // namespace

void save_json(const MeasurementSet& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = kFormatTag;
  j["version"] = kFormatVersion;
  j["L"] = m.L;
  j["R"] = m.R;
  j["delta"] = m.delta;
  j["seed"] = m.seed;
  j["wavenumbers"] = m.ks;
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const Vec3& p : m.points) pts.push_back({p.x, p.y, p.z});
  if (!m.weights.empty()) j["weights"] = m.weights;
  auto& traces = j["traces"] = nlohmann::ordered_json::array();
  for (const auto& block : m.traces) {
    nlohmann::ordered_json tb = nlohmann::ordered_json::array();
    for (const CVec3& t : block)
      tb.push_back({t.x.real(), t.x.imag(), t.y.real(), t.y.imag(), t.z.real(), t.z.imag()});
    traces.push_back(std::move(tb));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_json: cannot open " + path);
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("save_json: write failed for " + path);
}

MeasurementSet load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_json: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_json: " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormatTag)
    throw std::runtime_error("load_json: " + path + " is not a measurement file");
  if (j.value("version", -1) != kFormatVersion)
    throw std::runtime_error("load_json: unsupported measurement file version");

  MeasurementSet m;
  try {
    m.L = j.at("L").get<double>();
    m.R = j.at("R").get<double>();
    m.delta = j.at("delta").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.ks = j.at("wavenumbers").get<std::vector<double>>();
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 3)
        throw std::runtime_error("bad point entry");
      m.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    if (j.contains("weights")) m.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& block : j.at("traces")) {
      std::vector<CVec3> tb;
      tb.reserve(block.size());
      for (const auto& t : block) {
        if (!t.is_array() || t.size() != 6)
          throw std::runtime_error("bad trace entry");
        tb.push_back({{t[0].get<double>(), t[1].get<double>()},
                      {t[2].get<double>(), t[3].get<double>()},
                      {t[4].get<double>(), t[5].get<double>()}});
      }
      m.traces.push_back(std::move(tb));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_json: malformed measurement file " + path + ": " + e.what());
  }
  if (!m.weights.empty() && m.weights.size() != m.points.size())
    throw std::runtime_error("load_json: weights do not match points");
  if (m.traces.size() != m.ks.size())
    throw std::runtime_error("load_json: trace blocks do not match wavenumbers");
  for (const auto& tb : m.traces)
    if (tb.size() != m.points.size())
      throw std::runtime_error("load_json: trace block does not match points");
  return m;
}

void export_csv(std::span<const VshCoefficients> sets, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_csv: cannot open " + path);
  out << "k,n,m,alpha_re,alpha_im,beta_re,beta_im\n";
  char line[256];
  for (const auto& c : sets) {
    const VshLayout lay{c.n_max};
    for (int n = 1; n <= c.n_max; ++n)
      for (int m = -n; m <= n; ++m) {
        const std::size_t idx = lay.index(n, m);
        std::snprintf(line, sizeof line, "%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g\n", c.k, n,
                      m, c.alpha[idx].real(), c.alpha[idx].imag(), c.beta[idx].real(),
                      c.beta[idx].imag());
        out << line;
      }
  }
  if (!out) throw std::runtime_error("export_csv: write failed for " + path);
}

}  // namespace mfis::fieldio

// Study drivers. Simulation is the dominant cost, so the sweeps simulate once
// at the largest truncation order and reuse the clean data for every cell;
// noise realizations are re-derived per (delta, seed) from the stored blocks.
#include "mfis/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "mfis/forward.hpp"
#include "mfis/geometry.hpp"
#include "mfis/parallel.hpp"
#include "mfis/specfun.hpp"

namespace mfis::experiments {
namespace {

double wall_now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

source::VectorField example_current(const source::ExampleSource& ex) {
  return [ex](const Vec3& x) { return ex.current(x); };
}

std::vector<double> closed_axis(double L, int n) {
  auto axis = std::vector<double>(std::size_t(n));
  for (int i = 0; i < n; ++i)
    axis[std::size_t(i)] = -0.5 * L + L * double(i) / double(n - 1);
  return axis;
}

// Exact and reconstructed current on one plane of the cube, 101 x 101 nodes.
// mode 'z': points (u, v, 0); mode 'd': the x1 = x2 plane, points (u, u, v).
void write_slice(const std::string& path, const source::ExampleSource& ex,
                 const source::FourierSource& rec, char mode) {
  const int n = 101;
  const auto axis = closed_axis(rec.L, n);
  std::vector<Vec3> pts(std::size_t(n) * n);
  for (int iu = 0; iu < n; ++iu)
    for (int iv = 0; iv < n; ++iv) {
      const double u = axis[std::size_t(iu)], v = axis[std::size_t(iv)];
      pts[std::size_t(iu) * n + iv] = mode == 'z' ? Vec3{u, v, 0.0} : Vec3{u, u, v};
    }
  std::vector<CVec3> rv(pts.size());
  std::vector<Vec3> jv(pts.size());
  parallel_for(std::int64_t(pts.size()), 64, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      rv[std::size_t(i)] = source::evaluate(rec, pts[std::size_t(i)]);
      jv[std::size_t(i)] = ex.current(pts[std::size_t(i)]);
    }
  });
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_slice: cannot open " + path);
  std::fprintf(f,
               "u,v,exact_1,exact_2,exact_3,recon_1_re,recon_1_im,recon_2_re,recon_2_im,"
               "recon_3_re,recon_3_im\n");
  for (int iu = 0; iu < n; ++iu)
    for (int iv = 0; iv < n; ++iv) {
      const std::size_t i = std::size_t(iu) * n + iv;
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                   axis[std::size_t(iu)], axis[std::size_t(iv)], jv[i].x, jv[i].y, jv[i].z,
                   rv[i].x.real(), rv[i].x.imag(), rv[i].y.real(), rv[i].y.imag(),
                   rv[i].z.real(), rv[i].z.imag());
    }
  std::fclose(f);
}

nlohmann::ordered_json source_to_json(const source::FourierSource& s) {
  nlohmann::ordered_json j;
  j["p"] = {s.p.x, s.p.y, s.p.z};
  j["L"] = s.L;
  auto dump = [](const std::map<Vec3i, cdouble>& m) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [l, v] : m) arr.push_back({l.x, l.y, l.z, v.real(), v.imag()});
    return arr;
  };
  j["a"] = dump(s.a);
  j["b"] = dump(s.b);
  return j;
}

source::FourierSource source_from_json(const nlohmann::json& j) {
  source::FourierSource s;
  const auto p = j.at("p");
  s.p = Vec3{p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
  s.L = j.at("L").get<double>();
  auto read = [](const nlohmann::json& arr, std::map<Vec3i, cdouble>& m) {
    for (const auto& e : arr) {
      const Vec3i l{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()};
      m[l] = cdouble(e.at(3).get<double>(), e.at(4).get<double>());
    }
  };
  read(j.at("a"), s.a);
  read(j.at("b"), s.b);
  return s;
}

// Mean absolute coefficient difference over the union of stored entries.
double mean_coef_diff(const source::FourierSource& x, const source::FourierSource& y) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [l, v] : x.a) {
    sum += std::abs(v - y.coeff_a(l));
    ++count;
  }
  for (const auto& [l, v] : x.b) {
    sum += std::abs(v - y.coeff_b(l));
    ++count;
  }
  return sum / double(count);
}

}  // namespace

Preset desk_preset() { return {}; }

Preset full_preset() { return {"full", 48, 80000, 200, 400, 20, 101}; }

Preset preset_by_name(const std::string& name) {
  if (name == "desk") return desk_preset();
  if (name == "full") return full_preset();
  throw std::invalid_argument("preset_by_name: unknown preset '" + name + "'");
}

fieldio::MeasurementSet simulate_example(int id, int N_max, const Preset& preset,
                                         const Params& params) {
  const auto ex = source::example_source(id);
  const auto quad = geom::gauss_legendre_cube(preset.quad_order, params.L);
  const auto ws = forward::sample_current(example_current(ex), quad);
  const auto ks = inversion::wavenumber_list(N_max, params.L, params.lambda);
  const auto pts = geom::observation_points(std::size_t(preset.obs_points), params.R);
  return fieldio::generate_measurements(ws, ks, pts, params.R);
}

inversion::ReconstructionConfig make_config(const Vec3& p, int N, const Preset& preset,
                                            const Params& params) {
  inversion::ReconstructionConfig cfg;
  cfg.p = p;
  cfg.N = N;
  cfg.tau = params.tau;
  cfg.n_max = preset.n_max;
  cfg.rho = params.rho;
  cfg.lambda = params.lambda;
  cfg.grid_n_theta = preset.grid_n_theta;
  cfg.grid_n_phi = preset.grid_n_phi;
  return cfg;
}

double relative_l2_error(const source::VectorField& exact,
                         const source::FourierSource& recon, int n_per_axis) {
  if (!exact) throw std::invalid_argument("relative_l2_error: exact field is empty");
  if (n_per_axis < 2) throw std::invalid_argument("relative_l2_error: need n >= 2");
  const auto vals = source::evaluate_on_uniform_grid(recon, n_per_axis);
  const auto axis = closed_axis(recon.L, n_per_axis);
  const std::int64_t n = n_per_axis;
  const auto blocks = split_blocks(n, 8);
  std::vector<double> num(blocks.size()), den(blocks.size());
  parallel_run(blocks.size(), [&](std::size_t b) {
    double nb = 0.0, db = 0.0;
    for (std::int64_t ix = blocks[b].begin; ix < blocks[b].end; ++ix)
      for (std::int64_t iy = 0; iy < n; ++iy)
        for (std::int64_t iz = 0; iz < n; ++iz) {
          const Vec3 x{axis[std::size_t(ix)], axis[std::size_t(iy)], axis[std::size_t(iz)]};
          const Vec3 j = exact(x);
          nb += norm2(vals[std::size_t((ix * n + iy) * n + iz)] - to_cvec3(j));
          db += norm2(j);
        }
    num[b] = nb;
    den[b] = db;
  });
  double nsum = 0.0, dsum = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    nsum += num[b];
    dsum += den[b];
  }
  if (dsum == 0.0)
    throw std::domain_error("relative_l2_error: exact field vanishes on the grid");
  return std::sqrt(nsum / dsum);
}

RunResult run_example(int id, double delta, int N, std::uint64_t seed, const Preset& preset,
                      const Params& params, const std::string& slice_dir) {
  const double t0 = wall_now();
  const auto ex = source::example_source(id);
  const int N_use = N > 0 ? N : inversion::truncation_order(delta, params.tau);
  auto data = simulate_example(id, N_use, preset, params);
  if (delta > 0.0) data = fieldio::add_noise(data, delta, seed);
  const auto rec = inversion::reconstruct(data, make_config(ex.p, N_use, preset, params));

  RunResult out;
  out.example_id = id;
  out.delta = delta;
  out.N = rec.N;
  out.seed = seed;
  out.recovered = rec.source;
  out.error = relative_l2_error(example_current(ex), rec.source, preset.error_grid);
  out.seconds = wall_now() - t0;
  if (!slice_dir.empty()) save_slices(id, rec.source, slice_dir);
  return out;
}

void save_slices(int example_id, const source::FourierSource& rec, const std::string& dir) {
  const auto ex = source::example_source(example_id);
  std::filesystem::create_directories(dir);
  const std::string stem = dir + "/example" + std::to_string(example_id);
  write_slice(stem + "_slice_x3eq0.csv", ex, rec, 'z');
  write_slice(stem + "_slice_x1eqx2.csv", ex, rec, 'd');
}

void save_run_json(const RunResult& r, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "mfis-run";
  j["version"] = 1;
  j["example"] = r.example_id;
  j["delta"] = r.delta;
  j["N"] = r.N;
  j["seed"] = r.seed;
  j["error"] = r.error;
  j["source"] = source_to_json(r.recovered);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_run_json: cannot open " + path);
  out << j.dump() << '\n';
}

RunResult load_run_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_run_json: cannot open " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format").get<std::string>() != "mfis-run")
      throw std::runtime_error("load_run_json: not a run file: " + path);
    if (j.at("version").get<int>() != 1)
      throw std::runtime_error("load_run_json: unsupported version in " + path);
    RunResult r;
    r.example_id = j.at("example").get<int>();
    r.delta = j.at("delta").get<double>();
    r.N = j.at("N").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.error = j.at("error").get<double>();
    r.recovered = source_from_json(j.at("source"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_run_json: malformed " + path + ": " + e.what());
  }
}

SweepReport sweep_table1(int example_id, std::uint64_t seed, const Preset& preset,
                         const Params& params) {
  const auto ex = source::example_source(example_id);
  const std::vector<double> deltas{0.01, 0.02, 0.05, 0.10};
  std::vector<int> orders;
  int N_max = 0;
  for (double d : deltas) {
    orders.push_back(inversion::truncation_order(d, params.tau));
    N_max = std::max(N_max, orders.back());
  }
  const auto clean = simulate_example(example_id, N_max, preset, params);
  const auto current = example_current(ex);

  SweepReport rep{example_id, preset.name, seed, {}};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double t0 = wall_now();
    const auto noisy = fieldio::add_noise(clean, deltas[i], seed);
    const auto rec =
        inversion::reconstruct(noisy, make_config(ex.p, orders[i], preset, params));
    const double err = relative_l2_error(current, rec.source, preset.error_grid);
    rep.rows.push_back({deltas[i], orders[i], err, wall_now() - t0});
  }
  return rep;
}

SweepReport sweep_table2(int example_id, std::uint64_t seed, const Preset& preset,
                         const Params& params) {
  const auto ex = source::example_source(example_id);
  const std::vector<double> deltas{0.01, 0.02, 0.05, 0.10};
  const int N_lo = 5, N_hi = 10;
  const auto clean = simulate_example(example_id, N_hi, preset, params);
  const auto current = example_current(ex);

  SweepReport rep{example_id, preset.name, seed, {}};
  for (double d : deltas) {
    const auto noisy = fieldio::add_noise(clean, d, seed);
    for (int N = N_lo; N <= N_hi; ++N) {
      const double t0 = wall_now();
      const auto rec = inversion::reconstruct(noisy, make_config(ex.p, N, preset, params));
      const double err = relative_l2_error(current, rec.source, preset.error_grid);
      rep.rows.push_back({d, N, err, wall_now() - t0});
    }
  }
  return rep;
}

void save_csv(const SweepReport& report, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("save_csv: cannot open " + path);
  std::fprintf(f, "# example=%d preset=%s seed=%llu\n", report.example_id,
               report.preset.c_str(), static_cast<unsigned long long>(report.seed));
  std::fprintf(f, "delta,N,error,seconds\n");
  for (const auto& row : report.rows)
    std::fprintf(f, "%.17g,%d,%.17g,%.3f\n", row.delta, row.N, row.error, row.seconds);
  std::fclose(f);
}

NoiseScalingReport noise_scaling_study(int example_id, int N, std::span<const double> deltas,
                                       std::span<const std::uint64_t> seeds,
                                       const Preset& preset, const Params& params) {
  if (N < 1) throw std::invalid_argument("noise_scaling_study: need N >= 1");
  if (deltas.empty() || seeds.empty())
    throw std::invalid_argument("noise_scaling_study: need noise levels and seeds");
  const auto ex = source::example_source(example_id);
  const auto clean = simulate_example(example_id, N, preset, params);
  const auto cfg = make_config(ex.p, N, preset, params);
  const auto base = inversion::reconstruct(clean, cfg).source;
  const auto truth = source::project_scalar_fields(
      ex.f, ex.g, ex.p, geom::gauss_legendre_cube(preset.quad_order, params.L), N);

  NoiseScalingReport rep;
  rep.N = N;
  rep.deltas.assign(deltas.begin(), deltas.end());
  for (double d : deltas) {
    double vs_base = 0.0, vs_truth = 0.0;
    for (std::uint64_t s : seeds) {
      const auto rec = inversion::reconstruct(fieldio::add_noise(clean, d, s), cfg).source;
      vs_base += mean_coef_diff(rec, base);
      vs_truth += mean_coef_diff(rec, truth);
    }
    rep.mean_error.push_back(vs_base / double(seeds.size()));
    rep.mean_error_truth.push_back(vs_truth / double(seeds.size()));
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(rep.mean_error[i] > 0.0))
      throw std::runtime_error("noise_scaling_study: degenerate (zero) noise response");
    const double x = std::log(rep.deltas[i]), y = std::log(rep.mean_error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

std::vector<double> truncation_decay(int example_id, int N_lo, int N_hi, int proj_order,
                                     int proj_cap) {
  if (!(1 <= N_lo && N_lo <= N_hi && N_hi < proj_cap))
    throw std::invalid_argument("truncation_decay: need 1 <= N_lo <= N_hi < proj_cap");
  const auto ex = source::example_source(example_id);
  const auto full = source::project_scalar_fields(
      ex.f, ex.g, ex.p, geom::gauss_legendre_cube(proj_order, 1.0), proj_cap);
  std::vector<double> out;
  for (int N = N_lo; N <= N_hi; ++N) {
    source::FourierSource tail;
    tail.p = full.p;
    tail.L = full.L;
    for (const auto& [l, v] : full.a)
      if (norm2(l) > N * N) tail.a[l] = v;
    for (const auto& [l, v] : full.b)
      if (norm2(l) > N * N) tail.b[l] = v;
    out.push_back(source::sobolev_norm(tail, 0.0));
  }
  return out;
}

SelftestReport selftest(bool flip_kernel_sign) {
  SelftestReport rep;
  auto run = [&rep](const std::string& name, auto&& body) {
    SelftestReport::Item item;
    item.name = name;
    const double t0 = wall_now();
    try {
      const auto [pass, detail] = body();
      item.pass = pass;
      item.detail = detail;
    } catch (const std::exception& e) {
      item.pass = false;
      item.detail = e.what();
    }
    item.seconds = wall_now() - t0;
    rep.items.push_back(std::move(item));
  };
  auto fmt = [](const char* label, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s %.3e", label, v);
    return std::string(buf);
  };

  run("dipole kernel", [&]() -> std::pair<bool, std::string> {
    const Vec3 y0{0.1, -0.05, 0.2}, q{0.2, 1.0, -0.5}, x{0.3, -1.1, 0.7};
    const double k = 2.0 * kPi;
    forward::WeightedSource ws;
    ws.points = {y0};
    ws.moments = {to_cvec3(q)};
    ws.L = 0.5;
    const CVec3 got = forward::radiated_field(ws, k, x);
    CVec3 ref = forward::dipole_field(k, y0, q, x);
    if (flip_kernel_sign) ref = conj(ref);  // stands in for an e^{-ikr} phase bug
    const double rel = std::sqrt(norm2(got - ref) / norm2(ref));
    return {rel < 1e-12, fmt("rel err", rel)};
  });

  run("vsh round trip", [&]() -> std::pair<bool, std::string> {
    const auto grid = geom::sphere_grid(24, 48, 1.2);
    const specfun::VshLayout lay{8};
    fieldio::VshCoefficients c;
    c.k = 2.0 * kPi;
    c.radius = 1.2;
    c.n_max = 8;
    c.alpha.assign(lay.size(), cdouble{});
    c.beta.assign(lay.size(), cdouble{});
    c.alpha[lay.index(3, 2)] = {2.0, 0.0};
    c.beta[lay.index(5, -4)] = {0.5, -1.0};
    c.alpha[lay.index(8, 0)] = {0.0, 0.25};
    const auto back = fieldio::vsh_decompose(grid, fieldio::vsh_synthesize(c, grid), c.k, 8);
    double worst = 0.0;
    for (std::size_t i = 0; i < lay.size(); ++i) {
      worst = std::max(worst, std::abs(back.alpha[i] - c.alpha[i]));
      worst = std::max(worst, std::abs(back.beta[i] - c.beta[i]));
    }
    return {worst < 1e-10, fmt("max coef err", worst)};
  });

  run("trace propagation", [&]() -> std::pair<bool, std::string> {
    const Vec3 y0{0.1, -0.05, 0.2}, q{0.2, 1.0, -0.5};
    const double k = 2.0 * kPi, rho = 1.2;
    const auto gR = geom::sphere_grid_gauss(30, 61, 1.0);
    std::vector<CVec3> traces(gR.size());
    for (std::size_t i = 0; i < gR.size(); ++i) {
      const Vec3 x = gR.point(i);
      traces[i] = forward::tangential_trace(x, forward::dipole_field(k, y0, q, x));
    }
    const auto prop = fieldio::propagate(fieldio::vsh_decompose(gR, traces, k, 20), rho);
    const auto grho = geom::sphere_grid_gauss(30, 61, rho);
    const auto T = fieldio::vsh_synthesize(prop.field, grho);
    const auto C = fieldio::vsh_synthesize(prop.curl, grho);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < grho.size(); ++i) {
      const Vec3 x = grho.point(i);
      const CVec3 Tref = forward::tangential_trace(x, forward::dipole_field(k, y0, q, x));
      const CVec3 Cref = forward::tangential_trace(x, forward::dipole_curl(k, y0, q, x));
      num += grho.weight(i) * (norm2(T[i] - Tref) + norm2(C[i] - Cref));
      den += grho.weight(i) * (norm2(Tref) + norm2(Cref));
    }
    const double rel = std::sqrt(num / den);
    return {rel < 1e-8, fmt("rel L2 err", rel)};
  });

  run("coefficient recovery", [&]() -> std::pair<bool, std::string> {
    source::FourierSource truth;
    truth.p = normalized(Vec3{1.0, std::sqrt(2.0), std::sqrt(3.0)});
    truth.L = 1.0;
    truth.a[{0, 0, 0}] = 0.02;
    truth.a[{1, 0, 0}] = {0.011, -0.004};
    truth.a[{-1, 0, 0}] = {0.011, 0.004};
    truth.a[{1, 1, 0}] = {-0.006, 0.009};
    truth.a[{-1, -1, 0}] = {-0.006, -0.009};
    truth.b[{1, 1, -1}] = {-0.002, 0.004};
    truth.b[{-1, -1, 1}] = {-0.002, -0.004};
    const auto quad = geom::gauss_legendre_cube(16, truth.L);
    const auto ws = forward::sample_source(truth, quad);
    const auto ks = inversion::wavenumber_list(2, truth.L, 0.01);
    const auto obs = geom::sphere_grid_gauss(24, 49, 1.0);
    std::vector<Vec3> pts(obs.size());
    std::vector<double> w(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      pts[i] = obs.point(i);
      w[i] = obs.weight(i);
    }
    const auto data = fieldio::generate_measurements(ws, ks, pts, 1.0, w);
    inversion::ReconstructionConfig cfg;
    cfg.p = truth.p;
    cfg.N = 2;
    cfg.n_max = 18;
    cfg.rho = 1.2;
    cfg.lambda = 0.01;
    cfg.grid_n_theta = 60;
    cfg.grid_n_phi = 120;
    const auto rec = inversion::reconstruct(data, cfg);
    double worst = 0.0;
    for (const Vec3i& l : source::lattice_ball(2)) {
      worst = std::max(worst, std::abs(rec.source.coeff_a(l) - truth.coeff_a(l)));
      if (l != Vec3i{0, 0, 0})
        worst = std::max(worst, std::abs(rec.source.coeff_b(l) - truth.coeff_b(l)));
    }
    return {worst < 1e-5, fmt("max coef err", worst)};
  });

  run("truncation rule", []() -> std::pair<bool, std::string> {
    const bool ok = inversion::truncation_order(0.005) == 12 &&
                    inversion::truncation_order(0.01) == 10 &&
                    inversion::truncation_order(0.02) == 8 &&
                    inversion::truncation_order(0.05) == 7 &&
                    inversion::truncation_order(0.10) == 6;
    return {ok, "N(0.5,1,2,5,10%) = 12,10,8,7,6"};
  });

  rep.all_pass = std::all_of(rep.items.begin(), rep.items.end(),
                             [](const auto& it) { return it.pass; });
  return rep;
}

}  // namespace mfis::experiments

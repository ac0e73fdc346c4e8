// Command-line driver: binds JSON run configurations to the simulate /
// reconstruct / sweep / selftest pipelines. Exit codes: 0 success, 1 invalid
// configuration, 2 runtime failure.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mfis/experiments.hpp>
#include <mfis/parallel.hpp>

namespace {

using namespace mfis;

// Flat option bag shared by all subcommands; 0 means "use the preset value"
// for the discretization fields. Flags override config-file entries, which
// override the defaults below (the documented Example-1 setup).
struct RunConfig {
  int example = 1;
  double delta = 0.0;
  std::string order = "auto";  // truncation order N, or "auto" for the rule
  double tau = 3.0;
  double lambda = 0.01;
  double rho = 1.2;
  double R = 1.0;
  double L = 1.0;
  std::string preset = "desk";
  int quad_order = 0;
  int obs_points = 0;
  int grid_n_theta = 0;
  int grid_n_phi = 0;
  int n_max = 0;
  int error_grid = 0;
  std::uint64_t seed = 1;
  int table = 1;
  std::string deltas;  // comma-separated noise levels for custom sweeps
  std::string in;
  std::string out;
  std::string slices;  // slice CSV directory; default: alongside --out
  bool no_slices = false;
  int threads = 0;
};

std::string find_config_path(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
  }
  return path;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file is not valid JSON: " + std::string(e.what()));
  }
  try {
    if (j.value("format", "") != "mfis-config")
      throw std::invalid_argument("config file lacks format = \"mfis-config\"");
    if (j.value("version", 0) != 1)
      throw std::invalid_argument("unsupported config version (want 1)");
    for (const auto& [key, val] : j.items()) {
      if (key == "format" || key == "version") continue;
      else if (key == "example") cfg.example = val.get<int>();
      else if (key == "delta") cfg.delta = val.get<double>();
      else if (key == "N") cfg.order = val.is_string() ? val.get<std::string>()
                                                       : std::to_string(val.get<int>());
      else if (key == "tau") cfg.tau = val.get<double>();
      else if (key == "lambda") cfg.lambda = val.get<double>();
      else if (key == "rho") cfg.rho = val.get<double>();
      else if (key == "R") cfg.R = val.get<double>();
      else if (key == "L") cfg.L = val.get<double>();
      else if (key == "preset") cfg.preset = val.get<std::string>();
      else if (key == "quad_order") cfg.quad_order = val.get<int>();
      else if (key == "obs_points") cfg.obs_points = val.get<int>();
      else if (key == "grid_n_theta") cfg.grid_n_theta = val.get<int>();
      else if (key == "grid_n_phi") cfg.grid_n_phi = val.get<int>();
      else if (key == "n_max") cfg.n_max = val.get<int>();
      else if (key == "error_grid") cfg.error_grid = val.get<int>();
      else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
      else if (key == "table") cfg.table = val.get<int>();
      else if (key == "deltas") cfg.deltas = val.get<std::string>();
      else if (key == "in") cfg.in = val.get<std::string>();
      else if (key == "out") cfg.out = val.get<std::string>();
      else if (key == "slices") cfg.slices = val.get<std::string>();
      else if (key == "threads") cfg.threads = val.get<int>();
      else throw std::invalid_argument("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config value has the wrong type: " + std::string(e.what()));
  }
}

// Re-validate every module invariant up front so a bad config fails with the
// violated rule named, before any expensive work starts.
void validate(const RunConfig& cfg) {
  if (cfg.example < 1 || cfg.example > 3)
    throw std::invalid_argument("example must be 1, 2, or 3");
  if (!(cfg.delta >= 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("delta must lie in [0, 1)");
  if (!(cfg.L > 0.0)) throw std::invalid_argument("L must be positive");
  if (!(cfg.R > 0.0)) throw std::invalid_argument("R must be positive");
  if (!(cfg.rho > cfg.R)) throw std::invalid_argument("rho must exceed R");
  if (!(cfg.lambda > 0.0 && cfg.lambda < 0.5 && cfg.lambda < cfg.L / (4.0 * 3.14159265358979324)))
    throw std::invalid_argument("lambda must lie in (0, min(1/2, L/(4 pi)))");
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (cfg.quad_order < 0 || cfg.obs_points < 0 || cfg.grid_n_theta < 0 ||
      cfg.grid_n_phi < 0 || cfg.n_max < 0 || cfg.error_grid < 0)
    throw std::invalid_argument("discretization overrides must be positive");
  if (cfg.order != "auto") {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(cfg.order, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("N must be a positive integer or \"auto\"");
    }
    if (used != cfg.order.size() || n < 1)
      throw std::invalid_argument("N must be a positive integer or \"auto\"");
  }
  if (cfg.threads < 0) throw std::invalid_argument("threads must be positive");
}

// 0 stands for "derive from delta" downstream.
int resolve_order(const RunConfig& cfg) {
  if (cfg.order == "auto") return 0;
  return std::stoi(cfg.order);
}

experiments::Preset resolve_preset(const RunConfig& cfg) {
  experiments::Preset p = experiments::preset_by_name(cfg.preset);
  if (cfg.quad_order > 0) p.quad_order = cfg.quad_order;
  if (cfg.obs_points > 0) p.obs_points = cfg.obs_points;
  if (cfg.grid_n_theta > 0) p.grid_n_theta = cfg.grid_n_theta;
  if (cfg.grid_n_phi > 0) p.grid_n_phi = cfg.grid_n_phi;
  if (cfg.n_max > 0) p.n_max = cfg.n_max;
  if (cfg.error_grid > 0) p.error_grid = cfg.error_grid;
  return p;
}

experiments::Params resolve_params(const RunConfig& cfg) {
  experiments::Params prm;
  prm.L = cfg.L;
  prm.R = cfg.R;
  prm.rho = cfg.rho;
  prm.lambda = cfg.lambda;
  prm.tau = cfg.tau;
  return prm;
}

void require_path(const std::string& value, const char* flag) {
  if (value.empty())
    throw std::invalid_argument(std::string(flag) + " is required for this command");
}

int cmd_simulate(const RunConfig& cfg) {
  require_path(cfg.out, "--out");
  int N = resolve_order(cfg);
  if (N == 0) {
    if (!(cfg.delta > 0.0))
      throw std::invalid_argument("truncation rule is undefined at delta = 0; set --N");
    N = inversion::truncation_order(cfg.delta, cfg.tau);
  }
  const auto preset = resolve_preset(cfg);
  auto m = experiments::simulate_example(cfg.example, N, preset, resolve_params(cfg));
  if (cfg.delta > 0.0) m = fieldio::add_noise(m, cfg.delta, cfg.seed);
  fieldio::save_json(m, cfg.out);
  std::printf("wrote %s (%zu wavenumbers, %zu points, delta=%g, seed=%llu)\n", cfg.out.c_str(),
              m.ks.size(), m.points.size(), m.delta,
              static_cast<unsigned long long>(m.seed));
  return 0;
}

int cmd_reconstruct(const RunConfig& cfg) {
  require_path(cfg.in, "--in");
  require_path(cfg.out, "--out");
  const auto m = fieldio::load_json(cfg.in);
  const auto ex = source::example_source(cfg.example);
  const auto preset = resolve_preset(cfg);
  auto rc = experiments::make_config(ex.p, resolve_order(cfg), preset, resolve_params(cfg));

  const auto t0 = std::chrono::steady_clock::now();
  const auto rec = inversion::reconstruct(m, rc);
  const source::VectorField exact = [&ex](const Vec3& x) { return ex.current(x); };
  experiments::RunResult r;
  r.example_id = cfg.example;
  r.delta = m.delta;
  r.N = rec.N;
  r.seed = m.seed;
  r.error = experiments::relative_l2_error(exact, rec.source, preset.error_grid);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.recovered = rec.source;
  experiments::save_run_json(r, cfg.out);

  if (!cfg.no_slices) {
    std::string dir = cfg.slices;
    if (dir.empty()) {
      dir = std::filesystem::path(cfg.out).parent_path().string();
      if (dir.empty()) dir = ".";
    }
    experiments::save_slices(cfg.example, rec.source, dir);
  }
  std::printf("example %d: N=%d relative L2 error=%.6g -> %s\n", cfg.example, rec.N, r.error,
              cfg.out.c_str());
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  require_path(cfg.out, "--out");
  const auto preset = resolve_preset(cfg);
  const auto params = resolve_params(cfg);
  experiments::SweepReport rep;
  if (!cfg.deltas.empty()) {
    rep.example_id = cfg.example;
    rep.preset = preset.name;
    rep.seed = cfg.seed;
    std::stringstream ss(cfg.deltas);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const double d = std::stod(item);
      if (!(d >= 0.0 && d < 1.0))
        throw std::invalid_argument("sweep deltas must lie in [0, 1)");
      const auto run = experiments::run_example(cfg.example, d, resolve_order(cfg), cfg.seed,
                                                preset, params);
      rep.rows.push_back({run.delta, run.N, run.error, run.seconds});
    }
    if (rep.rows.empty()) throw std::invalid_argument("--deltas lists no noise levels");
  } else if (cfg.table == 1) {
    rep = experiments::sweep_table1(cfg.example, cfg.seed, preset, params);
  } else if (cfg.table == 2) {
    rep = experiments::sweep_table2(cfg.example, cfg.seed, preset, params);
  } else {
    throw std::invalid_argument("table must be 1 or 2 (or pass --deltas for a custom sweep)");
  }
  experiments::save_csv(rep, cfg.out);
  for (const auto& row : rep.rows)
    std::printf("delta=%-6g N=%-3d error=%.6g  (%.1fs)\n", row.delta, row.N, row.error,
                row.seconds);
  std::printf("wrote %s\n", cfg.out.c_str());
  return 0;
}

int cmd_selftest() {
  const auto rep = experiments::selftest();
  for (const auto& item : rep.items)
    std::printf("[%s] %-22s %6.2fs  %s\n", item.pass ? " ok " : "FAIL", item.name.c_str(),
                item.seconds, item.detail.c_str());
  std::printf("%s\n", rep.all_pass ? "selftest passed" : "selftest FAILED");
  return rep.all_pass ? 0 : 2;
}

void add_shared_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--config", "JSON run configuration (flags override its values)");
  sub->add_option("--threads", cfg.threads, "cap worker threads (default: hardware)");
  sub->add_option("--preset", cfg.preset, "quality preset: desk | full");
  sub->add_option("--seed", cfg.seed, "noise RNG seed");
  sub->add_option("--L", cfg.L, "source cube side length");
  sub->add_option("--R", cfg.R, "measurement sphere radius");
  sub->add_option("--rho", cfg.rho, "work sphere radius (rho > R)");
  sub->add_option("--lambda", cfg.lambda, "mean-coefficient shift, k* = 2 pi lambda / L");
  sub->add_option("--tau", cfg.tau, "truncation rule constant");
  sub->add_option("--quad-order", cfg.quad_order, "forward cube rule points per axis");
  sub->add_option("--obs-points", cfg.obs_points, "observation point count on Gamma_R");
  sub->add_option("--grid-theta", cfg.grid_n_theta, "work grid colatitude count");
  sub->add_option("--grid-phi", cfg.grid_n_phi, "work grid azimuth count");
  sub->add_option("--n-max", cfg.n_max, "spherical harmonic truncation degree");
  sub->add_option("--error-grid", cfg.error_grid, "error lattice points per axis");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    const std::string config_path = find_config_path(argc, argv);
    if (!config_path.empty()) apply_config_file(config_path, cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  CLI::App app{"multi-frequency electromagnetic inverse source toolkit"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "synthesize boundary measurements");
  add_shared_options(sim, cfg);
  sim->add_option("--example", cfg.example, "benchmark source id (1-3)");
  sim->add_option("--delta", cfg.delta, "relative noise level in [0, 1)");
  sim->add_option("--N", cfg.order, "shell count to simulate, or \"auto\"");
  sim->add_option("--out", cfg.out, "measurement JSON path");

  auto* rec = app.add_subcommand("reconstruct", "recover the source from measurements");
  add_shared_options(rec, cfg);
  rec->add_option("--example", cfg.example, "benchmark source id (for p and the error metric)");
  rec->add_option("--N", cfg.order, "truncation order, or \"auto\" (rule from stored delta)");
  rec->add_option("--in", cfg.in, "measurement JSON path");
  rec->add_option("--out", cfg.out, "run result JSON path");
  rec->add_option("--slices", cfg.slices, "slice CSV directory (default: alongside --out)");
  rec->add_flag("--no-slices", cfg.no_slices, "skip the plane slice CSVs");

  auto* swp = app.add_subcommand("sweep", "run a noise/truncation sweep table");
  add_shared_options(swp, cfg);
  swp->add_option("--example", cfg.example, "benchmark source id (1-3)");
  swp->add_option("--table", cfg.table, "reference table layout: 1 | 2");
  swp->add_option("--deltas", cfg.deltas, "custom sweep: comma-separated noise levels");
  swp->add_option("--N", cfg.order, "truncation order for custom sweeps, or \"auto\"");
  swp->add_option("--out", cfg.out, "sweep CSV path");

  auto* self = app.add_subcommand("selftest", "run the module invariant battery");
  add_shared_options(self, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    validate(cfg);
    if (cfg.threads > 0) mfis::set_max_threads(cfg.threads);
    if (sim->parsed()) return cmd_simulate(cfg);
    if (rec->parsed()) return cmd_reconstruct(cfg);
    if (swp->parsed()) return cmd_sweep(cfg);
    if (self->parsed()) return cmd_selftest();
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

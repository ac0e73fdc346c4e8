// The benchmark studies end to end: simulate boundary data for the three
// closed-form examples, reconstruct, measure relative L2 field errors on the
// uniform cube lattice, and run the noise/truncation sweeps behind the
// reported tables. Also houses the self-test battery used by the CLI.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfis/fieldio.hpp"
#include "mfis/inversion.hpp"
#include "mfis/source.hpp"

namespace mfis::experiments {

// Quality presets: "desk" for minutes-scale runs, "full" for the reference
// fidelity (48^3 forward rule, 8e4 observation points, 200x400 work grid).
struct Preset {
  std::string name = "desk";
  int quad_order = 24;     // forward cube rule, points per axis
  int obs_points = 10000;  // Fibonacci observation points on Gamma_R
  int grid_n_theta = 100;  // work sphere quadrature grid
  int grid_n_phi = 200;
  int n_max = 20;          // VSH truncation of measured traces
  int error_grid = 101;    // error lattice, points per axis
};
Preset desk_preset();
Preset full_preset();
Preset preset_by_name(const std::string& name);

// Geometry and rule constants shared by the studies.
struct Params {
  double L = 1.0;
  double R = 1.0;
  double rho = 1.2;
  double lambda = 0.01;
  double tau = 3.0;
};

// Clean multi-frequency measurements of example `id` covering every shell
// |l| <= N_max plus k*.
fieldio::MeasurementSet simulate_example(int id, int N_max, const Preset& preset,
                                         const Params& params = {});

// Reconstruction settings matching a preset (N must be chosen by the caller).
inversion::ReconstructionConfig make_config(const Vec3& p, int N, const Preset& preset,
                                            const Params& params = {});

// ( sum_m |J(x_m) - J_rec(x_m)|^2 / sum_m |J(x_m)|^2 )^{1/2} over the closed
// uniform n^3 lattice on the cube. Throws if the exact field sums to zero.
double relative_l2_error(const source::VectorField& exact,
                         const source::FourierSource& recon, int n_per_axis);

struct RunResult {
  int example_id = 0;
  double delta = 0.0;
  int N = 0;
  std::uint64_t seed = 0;
  double error = -1.0;  // relative L2 field error (< 0 = not evaluated)
  double seconds = 0.0;
  source::FourierSource recovered;
};

// One full pipeline run. N = 0 derives the truncation order from delta. If
// slice_dir is non-empty, writes the x3 = 0 and x1 = x2 plane slices of the
// exact and reconstructed currents as CSV (one file per plane).
RunResult run_example(int id, double delta, int N, std::uint64_t seed, const Preset& preset,
                      const Params& params = {}, const std::string& slice_dir = {});

// Run payload serialization (versioned JSON; excludes wall time so identical
// configurations reproduce byte-identical files).
void save_run_json(const RunResult& r, const std::string& path);
RunResult load_run_json(const std::string& path);

// The two figure slices (x3 = 0 and x1 = x2 planes) of the exact example
// current against a reconstruction, one CSV per plane, written into dir.
void save_slices(int example_id, const source::FourierSource& rec, const std::string& dir);

struct SweepRow {
  double delta = 0.0;
  int N = 0;
  double error = 0.0;
  double seconds = 0.0;
};
struct SweepReport {
  int example_id = 0;
  std::string preset;
  std::uint64_t seed = 0;
  std::vector<SweepRow> rows;
};

// Noise study: delta in {1, 2, 5, 10}% with N = N(delta); one simulation at
// the largest order serves all rows (smaller orders ignore the extra shells).
SweepReport sweep_table1(int example_id, std::uint64_t seed, const Preset& preset,
                         const Params& params = {});
// Truncation study: the (delta, N) grid {1, 2, 5, 10}% x {5..10}; each delta
// row shares one noise realization across N.
SweepReport sweep_table2(int example_id, std::uint64_t seed, const Preset& preset,
                         const Params& params = {});
void save_csv(const SweepReport& report, const std::string& path);

// Noise response at fixed N: mean absolute coefficient deviation from the
// clean-pipeline baseline (isolates the noise contribution), seed-averaged,
// plus its log-log slope in delta. mean_error_truth is the same mean against
// the projected exact coefficients (bias included), reported for context.
struct NoiseScalingReport {
  int N = 0;
  std::vector<double> deltas;
  std::vector<double> mean_error;
  std::vector<double> mean_error_truth;
  double slope = 0.0;
};
NoiseScalingReport noise_scaling_study(int example_id, int N, std::span<const double> deltas,
                                       std::span<const std::uint64_t> seeds,
                                       const Preset& preset, const Params& params = {});

// || J - J_N ||_{p,0} for N = N_lo..N_hi, evaluated from one high-order
// projection capped at |l| <= proj_cap (the shared > proj_cap remainder is
// omitted, which cannot break monotonicity).
std::vector<double> truncation_decay(int example_id, int N_lo, int N_hi, int proj_order,
                                     int proj_cap);

// Fast invariant battery (dipole kernel, VSH round trip, trace propagation,
// coefficient recovery, truncation rule). flip_kernel_sign mis-signs the
// reference phase in the dipole check; the battery must then fail, proving
// the check can detect a kernel sign bug.
struct SelftestReport {
  struct Item {
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
  };
  std::vector<Item> items;
  bool all_pass = false;
};
SelftestReport selftest(bool flip_kernel_sign = false);

}  // namespace mfis::experiments

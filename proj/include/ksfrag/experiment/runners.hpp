#pragma once

// End-to-end experiments: compute_* return in-memory results, run_* also
// write the CSV files into an output directory and return a JSON summary for
// the metadata sidecar.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "ksfrag/errors.hpp"
#include "ksfrag/experiment/config.hpp"
#include "ksfrag/experiment/csv.hpp"
#include "ksfrag/fragmentation.hpp"
#include "ksfrag/schrieffer_wolff.hpp"
#include "ksfrag/spectral.hpp"
#include "ksfrag/su2_matter.hpp"
#include "ksfrag/u1_ladder.hpp"

namespace ksfrag::experiment {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

/// Budget for dense work, from KSFRAG_MEMORY_LIMIT_MB (default 8192).
inline double memory_limit_bytes() {
  if (const char* env = std::getenv("KSFRAG_MEMORY_LIMIT_MB")) {
    char* end = nullptr;
    const double mb = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(mb > 0.0)) throw ConfigError("KSFRAG_MEMORY_LIMIT_MB must be a positive number");
    return mb * 1024.0 * 1024.0;
  }
  return 8192.0 * 1024.0 * 1024.0;
}

/// A dense eigendecomposition holds the matrix, the eigenvectors and about
/// one more matrix of workspace.
inline void check_dense_capacity(double dim, const std::string& what) {
  const double bytes = 3.0 * 8.0 * dim * dim;
  const double limit = memory_limit_bytes();
  if (bytes > limit)
    throw CapacityError(what + ": dense dimension " + std::to_string(static_cast<long long>(dim)) + " needs about " +
                        std::to_string(static_cast<long long>(bytes / (1024.0 * 1024.0))) + " MiB, limit " +
                        std::to_string(static_cast<long long>(limit / (1024.0 * 1024.0))) + " MiB");
}

inline Json spectrum_check_json(const SymmetricOperator& h, const SpectralData& s) {
  const auto c = check_spectrum(h, s);
  if (c.max_residual > 1e-8 || c.max_orthonormality > 1e-10)
    throw NumericalError("eigendecomposition check failed: residual " + std::to_string(c.max_residual) +
                         ", orthonormality " + std::to_string(c.max_orthonormality));
  return Json{{"max_residual", c.max_residual}, {"max_orthonormality_error", c.max_orthonormality}};
}

// ---------------------------------------------------------------- U(1) spectrum

struct U1Params {
  int L = 0;
  int Lambda = 0;
  double g = 0.0;
};

inline U1Params u1_params(const ExperimentConfig& c, const char* command) {
  require::model(c, Model::u1_ladder, command);
  U1Params p{require::key(c.L, "L"), require::key(c.Lambda, "Lambda"), require::key(c.g, "g")};
  require::at_least(p.L, 2, "L");
  require::at_least(p.Lambda, 1, "Lambda");
  require::positive(p.g, "g");
  return p;
}

inline u1::PlaquetteConfig u1_initial_state(const ExperimentConfig& c, const U1Params& p) {
  const auto& v = require::key(c.initial_state, "initial_state");
  if (static_cast<int>(v.size()) != p.L)
    throw ConfigError("config: initial_state needs L = " + std::to_string(p.L) + " entries");
  for (int n : v)
    if (std::abs(n) > p.Lambda) throw ConfigError("config: initial_state entries must satisfy |n| <= Lambda");
  return {v};
}

inline std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

struct CounterStats {
  std::string kind;  // P, Psym or D
  int s = 0;
  ObservableStats stats;
};

struct U1Spectrum {
  U1Params params;
  std::vector<int> reference;
  Index full_dim = 0;
  int cut = 0;
  SpectralData spectrum;  // k = 0 sector
  std::vector<Index> cluster_id;
  std::vector<Index> cluster_size;
  std::vector<double> entropy;
  std::vector<double> overlap2;  // against the normalized k = 0 projection of the reference
  EnergyMoments window;          // of the reference state under the full H
  std::vector<bool> in_window;
  std::vector<CounterStats> counters;
  Json check;
};

inline std::vector<int> counter_values(const ExperimentConfig& c, int lo, int hi) {
  std::vector<int> out;
  if (!c.counter_s) {
    for (int s = lo; s <= hi; ++s) out.push_back(s);
  } else {
    for (int s : *c.counter_s)
      if (s >= lo && s <= hi) out.push_back(s);
  }
  return out;
}

inline U1Spectrum compute_u1_spectrum(const ExperimentConfig& c) {
  U1Spectrum r;
  r.params = u1_params(c, "u1-spectrum");
  const auto ref = u1_initial_state(c, r.params);
  r.reference = ref.values;
  if (!(c.overlap_threshold > 0.0 && c.overlap_threshold < 1.0))
    throw ConfigError("config: overlap_threshold must lie in (0, 1)");
  if (c.counter_s) {
    for (int s : *c.counter_s)
      if (std::abs(s) > 2 * r.params.Lambda)
        throw ConfigError("config: counter_s value " + std::to_string(s) + " is outside every counter range");
  }

  const u1::U1Space space(r.params.L, r.params.Lambda);
  r.full_dim = static_cast<Index>(space.dim());
  // Orbit count is about dim / L; check before building anything dense.
  check_dense_capacity(static_cast<double>(space.dim()) / r.params.L + space.dim() % r.params.L + 1,
                       "u1-spectrum");
  const auto sector = u1::build_momentum_zero(space);
  check_dense_capacity(static_cast<double>(sector.dim()), "u1-spectrum");

  const auto h = u1::build_u1_hamiltonian(space, r.params.g);
  const auto hk = u1::project_operator(h, sector);
  r.spectrum = diagonalize(hk);
  r.check = spectrum_check_json(hk, r.spectrum);
  r.cluster_id = cluster_ids(r.spectrum.energies);
  r.cluster_size = cluster_sizes(r.cluster_id);

  r.cut = r.params.L / 2;
  const Eigen::VectorXd psi0 = u1::basis_state(space, ref);
  Eigen::VectorXd ref_k = sector.restrict(psi0);
  if (ref_k.norm() == 0.0) throw NumericalError("u1-spectrum: reference state has no k = 0 component");
  ref_k.normalize();
  r.window = energy_moments(h, psi0);

  const Index n = r.spectrum.size();
  r.entropy.resize(static_cast<std::size_t>(n));
  r.overlap2.resize(static_cast<std::size_t>(n));
  r.in_window.resize(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const Eigen::VectorXd v = r.spectrum.vectors.col(k);
    r.entropy[static_cast<std::size_t>(k)] = half_chain_entropy(sector.embed(v), space, r.cut);
    const double ov = v.dot(ref_k);
    r.overlap2[static_cast<std::size_t>(k)] = ov * ov;
    r.in_window[static_cast<std::size_t>(k)] = std::abs(r.spectrum.energies[k] - r.window.mean) <= r.window.width;
  }

  const int cap = r.params.Lambda;
  for (int s : counter_values(c, -cap, cap))
    r.counters.push_back({"P", s, observable_stats(r.spectrum, u1::project_operator(u1::counter_P(space, s), sector))});
  for (int s : counter_values(c, 0, cap))
    r.counters.push_back(
        {"Psym", s, observable_stats(r.spectrum, u1::project_operator(u1::counter_P_symmetric(space, s), sector))});
  for (int s : counter_values(c, 0, 2 * cap))
    r.counters.push_back({"D", s, observable_stats(r.spectrum, u1::project_operator(u1::counter_D(space, s), sector))});
  return r;
}

inline Json run_u1_spectrum(const ExperimentConfig& c, const fs::path& out) {
  const U1Spectrum r = compute_u1_spectrum(c);
  const Index n = r.spectrum.size();
  {
    CsvWriter w(out / "spectrum.csv", kSchemaVersion, {"state", "energy", "cluster_id", "cluster_size"});
    for (Index k = 0; k < n; ++k)
      w.row() << static_cast<long long>(k) << r.spectrum.energies[k]
              << static_cast<long long>(r.cluster_id[static_cast<std::size_t>(k)])
              << static_cast<long long>(r.cluster_size[static_cast<std::size_t>(k)]);
  }
  {
    CsvWriter w(out / "counters.csv", kSchemaVersion,
                {"state", "energy", "kind", "s", "mean", "variance", "cluster_size"});
    for (const auto& cs : r.counters)
      for (Index k = 0; k < n; ++k)
        w.row() << static_cast<long long>(k) << r.spectrum.energies[k] << cs.kind << cs.s << cs.stats.mean[k]
                << cs.stats.variance[k] << static_cast<long long>(r.cluster_size[static_cast<std::size_t>(k)]);
  }
  std::size_t flagged = 0, window = 0;
  {
    CsvWriter w(out / "entropy.csv", kSchemaVersion,
                {"state", "energy", "entropy", "overlap2", "flagged", "in_window", "cluster_size"});
    for (Index k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const bool flag = r.overlap2[i] > c.overlap_threshold;
      flagged += flag;
      window += r.in_window[i];
      w.row() << static_cast<long long>(k) << r.spectrum.energies[k] << r.entropy[i] << r.overlap2[i] << flag
              << static_cast<bool>(r.in_window[i]) << static_cast<long long>(r.cluster_size[i]);
    }
  }
  return Json{{"full_dimension", r.full_dim},
              {"sector", "k=0"},
              {"sector_dimension", n},
              {"entropy_cut", r.cut},
              {"reference_state", join(r.reference)},
              {"window_energy", r.window.mean},
              {"window_half_width", r.window.width},
              {"window_members", window},
              {"flagged_states", flagged},
              {"spectrum_check", r.check},
              {"outputs", {"spectrum.csv", "counters.csv", "entropy.csv"}}};
}

// ---------------------------------------------------------------- quench

/// Observable time series under the quench state and the matched
/// microcanonical state.
struct QuenchRecord {
  std::string observable;
  std::string initial_state;
  std::vector<double> times;
  std::vector<double> obs_quench;
  std::vector<double> obs_micro;
  double energy = 0.0;
  double energy_width = 0.0;
  std::size_t window_members = 0;
  Index evolution_dimension = 0;
  std::string evolution_basis;
  Json check;
};

inline u1::ElectricObservable u1_observable(const ExperimentConfig& c) {
  const std::string name = c.observable.value_or("electric_total");
  if (name == "electric_total") return u1::ElectricObservable::total;
  if (name == "electric_horizontal") return u1::ElectricObservable::horizontal;
  throw ConfigError("config: u1-ladder observable must be electric_total or electric_horizontal, got '" + name + "'");
}

inline void add_into(std::vector<double>& acc, const std::vector<double>& x) {
  if (acc.empty()) acc.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) acc[i] += x[i];
}

inline QuenchRecord compute_u1_quench(const ExperimentConfig& c) {
  const U1Params p = u1_params(c, "quench");
  const auto psi_config = u1_initial_state(c, p);
  const auto kind = u1_observable(c);
  require::time_grid(c);

  QuenchRecord r;
  r.observable = c.observable.value_or("electric_total");
  r.initial_state = join(psi_config.values);
  r.times = time_grid(c.t_max, c.t_points);

  const u1::U1Space space(p.L, p.Lambda);
  check_dense_capacity(static_cast<double>(space.dim()) / p.L + space.dim() % p.L + 1, "quench");
  const auto h = u1::build_u1_hamiltonian(space, p.g);
  const auto obs = u1::electric_observable(space, kind);
  const Eigen::VectorXd psi0 = u1::basis_state(space, psi_config);
  const auto moments = energy_moments(h, psi0);
  r.energy = moments.mean;
  r.energy_width = moments.width;

  // Both H and the observable commute with translations, so the k = 0 and
  // k = pi components evolve independently and never interfere in <O>.
  const auto zero = u1::build_momentum_zero(space);
  const auto pi = u1::build_momentum_sector(space, u1::Momentum::pi);
  const Eigen::VectorXd c0 = zero.restrict(psi0);
  const Eigen::VectorXd cpi = pi.restrict(psi0);
  const double captured = c0.squaredNorm() + cpi.squaredNorm();

  if (std::abs(captured - 1.0) <= 1e-12) {
    check_dense_capacity(static_cast<double>(zero.dim()), "quench");
    const auto h0 = u1::project_operator(h, zero);
    const auto spec0 = diagonalize(h0);
    r.check = Json{{"k=0", spectrum_check_json(h0, spec0)}};
    const auto o0 = u1::project_operator(obs, zero);
    add_into(r.obs_quench, expectation_series(spec0, c0, o0, r.times));
    if (cpi.squaredNorm() > 0.0) {
      const auto hpi = u1::project_operator(h, pi);
      const auto specpi = diagonalize(hpi);
      r.check["k=pi"] = spectrum_check_json(hpi, specpi);
      add_into(r.obs_quench, expectation_series(specpi, cpi, u1::project_operator(obs, pi), r.times));
    }
    const auto mc = microcanonical_state(spec0, r.energy, r.energy_width);
    r.window_members = mc.members.size();
    r.obs_micro = expectation_series(spec0, mc.state, o0, r.times);
    r.evolution_dimension = zero.dim() + (cpi.squaredNorm() > 0.0 ? pi.dim() : 0);
    r.evolution_basis = cpi.squaredNorm() > 0.0 ? "k=0 + k=pi" : "k=0";
  } else {
    check_dense_capacity(static_cast<double>(space.dim()), "quench");
    const auto spec = diagonalize(h);
    r.check = Json{{"full", spectrum_check_json(h, spec)}};
    r.obs_quench = expectation_series(spec, psi0, obs, r.times);
    const auto mc = microcanonical_state(spec, r.energy, r.energy_width);
    r.window_members = mc.members.size();
    r.obs_micro = expectation_series(spec, mc.state, obs, r.times);
    r.evolution_dimension = static_cast<Index>(space.dim());
    r.evolution_basis = "full";
  }
  return r;
}

inline QuenchRecord compute_su2_quench(const ExperimentConfig& c) {
  require::model(c, Model::su2_matter, "quench");
  const int n = require::key(c.N, "N");
  const double g = require::key(c.g, "g");
  const double m = require::key(c.m, "m");
  require::at_least(n, 2, "N");
  if (n % 2 != 0) throw ConfigError("config: N must be even");
  require::positive(g, "g");
  require::time_grid(c);
  const auto& init = require::key(c.initial_state, "initial_state");
  if (init.size() != 2) throw ConfigError("config: su2-matter initial_state is 'x, D'");
  const std::string name = c.observable.value_or("electric");
  if (name != "electric") throw ConfigError("config: su2-matter observable must be electric, got '" + name + "'");

  QuenchRecord r;
  r.observable = name;
  r.initial_state = "x=" + std::to_string(init[0]) + " D=" + std::to_string(init[1]);
  r.times = time_grid(c.t_max, c.t_points);

  const auto space = su2::build_su2_space(n, n);
  check_dense_capacity(static_cast<double>(space.dim()), "quench");
  Eigen::VectorXd phi;
  try {
    phi = su2::build_phi_state(space, init[0], init[1]);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const auto parts = su2::build_su2_parts(space, g, m);
  const auto moments = energy_moments(parts.total, phi);
  r.energy = moments.mean;
  r.energy_width = moments.width;

  // Open boundaries leave no flux past the last site, so only global colour
  // singlets are physical; the dynamics and the ensemble live there.
  const Eigen::MatrixXd singlets = su2::singlet_basis(space);
  const Eigen::VectorXd coords = singlets.transpose() * phi;
  if (std::abs(coords.squaredNorm() - 1.0) > 1e-10)
    throw NumericalError("quench: initial state is not a colour singlet (captured weight " +
                         std::to_string(coords.squaredNorm()) + ")");
  const auto hs = restrict_operator(parts.total, singlets);
  const auto spec = diagonalize(hs);
  r.check = Json{{"singlet", spectrum_check_json(hs, spec)}};
  const auto es = restrict_operator(parts.electric, singlets);
  r.obs_quench = expectation_series(spec, coords, es, r.times);
  const auto mc = microcanonical_state(spec, r.energy, r.energy_width);
  r.window_members = mc.members.size();
  r.obs_micro = expectation_series(spec, mc.state, es, r.times);
  r.evolution_dimension = singlets.cols();
  r.evolution_basis = "colour singlets at half filling";
  return r;
}

inline QuenchRecord compute_quench(const ExperimentConfig& c) {
  return c.model == Model::u1_ladder ? compute_u1_quench(c) : compute_su2_quench(c);
}

inline Json run_quench(const ExperimentConfig& c, const fs::path& out) {
  const QuenchRecord r = compute_quench(c);
  CsvWriter w(out / "quench.csv", kSchemaVersion, {"t", "obs_quench", "obs_micro"});
  for (std::size_t i = 0; i < r.times.size(); ++i) w.row() << r.times[i] << r.obs_quench[i] << r.obs_micro[i];
  return Json{{"observable", r.observable},
              {"initial_state", r.initial_state},
              {"energy", r.energy},
              {"energy_width", r.energy_width},
              {"window_members", r.window_members},
              {"evolution_basis", r.evolution_basis},
              {"evolution_dimension", r.evolution_dimension},
              {"spectrum_check", r.check},
              {"outputs", {"quench.csv"}}};
}

// ---------------------------------------------------------------- sectors

struct SectorTable {
  std::vector<ScalingRow> rows;  // `length` is L (U(1)) or N (SU(2))
  double growth_rate = 0.0;
  bool has_growth_rate = false;
};

inline SectorTable compute_sectors(const ExperimentConfig& c) {
  const double cutoff = require::key(c.cutoff, "cutoff");
  require::positive(cutoff, "cutoff");
  SectorTable t;
  std::vector<double> xs, ys;
  if (c.model == Model::u1_ladder) {
    const int cap = require::key(c.Lambda, "Lambda");
    require::at_least(cap, 1, "Lambda");
    const std::vector<int> lengths = c.L_range ? *c.L_range : std::vector<int>{require::key(c.L, "L")};
    for (int l : lengths) require::at_least(l, 2, "L_range");
    const auto s = sector_scaling(cap, cutoff, lengths);
    t.rows = s.rows;
  } else {
    const double g = require::key(c.g, "g");
    const double m = require::key(c.m, "m");
    require::positive(g, "g");
    const std::vector<int> sizes = c.N_range ? *c.N_range : std::vector<int>{require::key(c.N, "N")};
    for (int n : sizes) {
      if (n < 2 || n % 2 != 0) throw ConfigError("config: N values must be even and >= 2");
      const auto space = su2::build_su2_space(n, n);
      check_dense_capacity(static_cast<double>(space.dim()), "sectors");
      const auto basis = su2_link_rep_basis(space, Eigen::MatrixXd::Identity(space.dim(), space.dim()));
      const auto h = restrict_operator(su2::build_su2_hamiltonian(space, g, m), basis.vectors);
      const auto eff = effective_hamiltonian(h, su2_frozen_patterns(basis, cutoff));
      const auto rep = connected_sectors(eff.matrix(), kRotatedEdgeTolerance);
      t.rows.push_back({n, cutoff, rep.count, rep.largest, rep.dimension});
    }
  }
  for (const auto& row : t.rows) {
    xs.push_back(row.length);
    ys.push_back(std::log(static_cast<double>(row.count)));
  }
  if (xs.size() >= 2) {
    t.growth_rate = fit_slope(xs, ys);
    t.has_growth_rate = true;
  }
  return t;
}

inline Json run_sectors(const ExperimentConfig& c, const fs::path& out) {
  const SectorTable t = compute_sectors(c);
  const std::string model = to_string(c.model);
  CsvWriter w(out / "sectors.csv", kSchemaVersion,
              {"model", "L", "cutoff", "sector_count", "largest_sector", "dimension"});
  for (const auto& r : t.rows)
    w.row() << model << r.length << r.cutoff << static_cast<long long>(r.count) << static_cast<long long>(r.largest)
            << static_cast<long long>(r.dimension);
  if (t.has_growth_rate) w.footer("growth_rate", t.growth_rate);
  Json j{{"rows", t.rows.size()}, {"outputs", {"sectors.csv"}}};
  if (t.has_growth_rate) j["growth_rate"] = t.growth_rate;
  return j;
}

// ---------------------------------------------------------------- sw-check

/// Eight-level test problem: H0 with three gap-separated blocks (sizes 3, 3,
/// 2 around 0, 5, 10) and a block-off-diagonal W scaled to max |W_ij| = 1.
struct SWInstance {
  Eigen::MatrixXd h0;
  Eigen::MatrixXd w;
};

inline SWInstance gap_separated_instance(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const int sizes[3] = {3, 3, 2};
  const double centres[3] = {0.0, 5.0, 10.0};
  SWInstance in{Eigen::MatrixXd::Zero(8, 8), Eigen::MatrixXd::Zero(8, 8)};
  std::vector<int> block;
  int start = 0;
  for (int b = 0; b < 3; ++b) {
    Eigen::MatrixXd a(sizes[b], sizes[b]);
    for (int i = 0; i < sizes[b]; ++i)
      for (int j = 0; j < sizes[b]; ++j) a(i, j) = normal(rng);
    in.h0.block(start, start, sizes[b], sizes[b]) =
        0.25 * (a + a.transpose()) + centres[b] * Eigen::MatrixXd::Identity(sizes[b], sizes[b]);
    block.insert(block.end(), static_cast<std::size_t>(sizes[b]), b);
    start += sizes[b];
  }
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      if (block[static_cast<std::size_t>(i)] != block[static_cast<std::size_t>(j)]) in.w(i, j) = in.w(j, i) = normal(rng);
  in.w /= in.w.cwiseAbs().maxCoeff();
  return in;
}

/// max_k |E_k(SW) - E_k(exact)| at perturbation strength eps.
inline double sw_eigenvalue_error(const SWInstance& in, double eps) {
  const auto h0 = SymmetricOperator::from_dense(in.h0);
  const auto v = SymmetricOperator::from_dense(eps * in.w);
  const auto approx = diagonalize(sw_second_order(h0, v).effective).energies;
  const auto exact = diagonalize(SymmetricOperator::from_dense(in.h0 + eps * in.w)).energies;
  return (approx - exact).cwiseAbs().maxCoeff();
}

struct SWOrderRow {
  int instance = 0;
  double eps = 0.0;
  double error = 0.0;
  double ratio = 0.0;  // error(2 eps) / error(eps); 0 on the first row of an instance
};

struct SWCheck {
  std::vector<SWOrderRow> order;
  double two_level_error = 0.0;  // vs diag(-v^2/D, D + v^2/D), v = 0.1, D = 1
  SWScaling vs_cutoff;
  SWScaling vs_coupling;
  int length = 2;
  int coupling_cutoff = 3;
};

inline const std::vector<double>& sw_eps_ladder() {
  static const std::vector<double> eps{0.1, 0.05, 0.025};
  return eps;
}

inline double sw_two_level_error() {
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(2, 2);
  h0(1, 1) = 1.0;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 2);
  v(0, 1) = v(1, 0) = 0.1;
  const Eigen::MatrixXd got =
      sw_second_order(SymmetricOperator::from_dense(h0), SymmetricOperator::from_dense(v)).effective.dense();
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
  expected(0, 0) = -0.01;
  expected(1, 1) = 1.01;
  return (got - expected).cwiseAbs().maxCoeff();
}

inline SWCheck compute_sw_check(const ExperimentConfig& c) {
  require::at_least(c.sw_instances, 1, "sw_instances");
  SWCheck r;
  std::mt19937_64 rng(c.seed);
  for (int i = 0; i < c.sw_instances; ++i) {
    const auto in = gap_separated_instance(rng);
    double previous = 0.0;
    for (double eps : sw_eps_ladder()) {
      const double err = sw_eigenvalue_error(in, eps);
      r.order.push_back({i, eps, err, previous > 0.0 ? previous / err : 0.0});
      previous = err;
    }
  }
  r.two_level_error = sw_two_level_error();

  r.length = c.L.value_or(2);
  require::at_least(r.length, 2, "L");
  const double g = c.g.value_or(1.0);
  require::positive(g, "g");
  const std::vector<int> cutoffs = c.cutoff_range.value_or(std::vector<int>{2, 3, 4, 5, 6});
  for (int e : cutoffs) require::at_least(e, 1, "cutoff_range");
  const std::vector<double> couplings = c.g_range.value_or(std::vector<double>{1.0, 1.5, 2.0});
  for (double x : couplings) require::positive(x, "g_range");
  if (c.cutoff && (*c.cutoff != std::floor(*c.cutoff) || *c.cutoff < 1 || *c.cutoff > 64))
    throw ConfigError("config: sw-check cutoff must be a positive integer");
  r.coupling_cutoff = c.cutoff ? static_cast<int>(*c.cutoff) : 3;

  std::vector<double> biggest;
  for (int e : cutoffs) biggest.push_back(std::pow(2.0 * e + 1.0, r.length));
  for (double d : biggest) check_dense_capacity(d, "sw-check");
  check_dense_capacity(std::pow(2.0 * r.coupling_cutoff + 1.0, r.length), "sw-check");

  r.vs_cutoff = sw_scaling_vs_cutoff(r.length, g, cutoffs);
  r.vs_coupling = sw_scaling_vs_coupling(r.length, r.coupling_cutoff, couplings);
  return r;
}

inline Json run_sw_check(const ExperimentConfig& c, const fs::path& out) {
  require::model(c, Model::u1_ladder, "sw-check");
  const SWCheck r = compute_sw_check(c);
  {
    CsvWriter w(out / "sw_order.csv", kSchemaVersion, {"instance", "eps", "max_eigenvalue_error", "ratio"});
    for (const auto& row : r.order) {
      auto line = w.row();
      line << row.instance << row.eps << row.error;
      if (row.ratio > 0.0) line << row.ratio;
      else line << "";
    }
  }
  {
    CsvWriter w(out / "sw_scaling.csv", kSchemaVersion,
                {"scan", "L", "Lambda", "g", "cutoff", "dimension", "correction_norm"});
    for (const auto* scan : {&r.vs_cutoff, &r.vs_coupling})
      for (const auto& row : scan->rows)
        w.row() << (scan == &r.vs_cutoff ? "cutoff" : "g") << row.length << row.truncation << row.g << row.cutoff
                << static_cast<long long>(row.dimension) << row.correction_norm;
    w.footer("exponent_cutoff", r.vs_cutoff.exponent);
    w.footer("exponent_g", r.vs_coupling.exponent);
  }
  return Json{{"instances", c.sw_instances},
              {"seed", c.seed},
              {"two_level_max_error", r.two_level_error},
              {"exponent_cutoff", r.vs_cutoff.exponent},
              {"exponent_g", r.vs_coupling.exponent},
              {"outputs", {"sw_order.csv", "sw_scaling.csv"}}};
}

}  // namespace ksfrag::experiment

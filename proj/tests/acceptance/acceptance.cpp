// Acceptance runner. Prints one PASS/FAIL line per criterion with the
// measured numbers. Usage: ksfrag_acceptance [criterion ...]; no arguments
// runs all of 1..8. Exit status is the number of failed criteria.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ksfrag/experiment/config.hpp"
#include "ksfrag/experiment/runners.hpp"
#include "ksfrag/fragmentation.hpp"
#include "ksfrag/schrieffer_wolff.hpp"
#include "ksfrag/spectral.hpp"
#include "ksfrag/su2_matter.hpp"
#include "ksfrag/u1_ladder.hpp"
#include "oracles.hpp"

using namespace ksfrag;
using namespace ksfrag::experiment;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

ExperimentConfig config(const std::string& text) { return parse_config(text); }

const char* const kU1Reference =
    "model = u1-ladder\nL = 4\nLambda = 4\ng = 0.6\ninitial_state = 3, -2, 3, -2\n";

struct WindowStats {
  double mean = 0.0;
  double stddev = 0.0;
};

WindowStats window_stats(const std::vector<double>& t, const std::vector<double>& x, double lo, double hi) {
  double sum = 0.0, sq = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= lo && t[i] <= hi) {
      sum += x[i];
      sq += x[i] * x[i];
      ++n;
    }
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sq / n - mean * mean))};
}

// ------------------------------------------------------------------ 1

Verdict criterion1() {
  Verdict v;
  const auto r = compute_u1_spectrum(config(kU1Reference));
  std::map<std::pair<std::string, int>, double> vmax;
  for (const auto& c : r.counters) vmax[{c.kind, c.s}] = c.stats.variance.maxCoeff();
  // Var[P(s) + P(-s)] for s > 0 is the Psym row.
  const auto p = [&](int s) { return vmax.at({"Psym", s}); };
  const auto d = [&](int s) { return vmax.at({"D", s}); };
  v.detail << "rows=" << r.spectrum.size() << " Vmax_P(1..4)=" << p(1) << "," << p(2) << "," << p(3) << "," << p(4)
           << " Vmax_D(2..5)=" << d(2) << "," << d(3) << "," << d(4) << "," << d(5);
  v.check(r.spectrum.size() == 1665, "k=0 sector has 1665 states");
  v.check(p(3) <= p(2) && p(4) <= p(3), "Vmax_P non-increasing on s=2,3,4");
  v.check(p(4) < 0.1 * p(1), "Vmax_P(4) < 0.1 Vmax_P(1)");
  v.check(d(4) <= d(3) && d(5) <= d(4), "Vmax_D non-increasing on s=3,4,5");
  v.check(d(5) < 0.1 * d(2), "Vmax_D(5) < 0.1 Vmax_D(2)");
  return v;
}

// ------------------------------------------------------------------ 2

Verdict criterion2() {
  Verdict v;
  const auto r = compute_quench(config(std::string(kU1Reference) + "observable = electric_total\n"));
  const auto q = window_stats(r.times, r.obs_quench, 5.0, 50.0);
  const auto m = window_stats(r.times, r.obs_micro, 5.0, 50.0);
  const double sigmas = std::abs(q.mean - m.mean) / m.stddev;
  double drift = 0.0;
  for (std::size_t i = 0; i < r.times.size(); ++i)
    if (r.times[i] >= 5.0) drift = std::max(drift, std::abs(r.obs_quench[i] - r.obs_quench[0]) / r.obs_quench[0]);
  v.detail << "mean_quench=" << q.mean << " mean_micro=" << m.mean << " sd_micro=" << m.stddev
           << " gap/sd=" << sigmas << " max_rel_drift=" << drift << " window_members=" << r.window_members;
  v.check(sigmas > 5.0, "(a) gap > 5 sd of the micro series");
  v.check(drift < 0.25, "(b) drift < 25%");
  return v;
}

// ------------------------------------------------------------------ 3

Verdict criterion3() {
  Verdict v;
  const auto r = compute_u1_spectrum(config(kU1Reference));
  std::vector<double> hits;
  int flagged = 0;
  double closest = 1e300;
  for (Index k = 0; k < r.spectrum.size(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (r.overlap2[i] <= 0.05) continue;
    ++flagged;
    const double dev = std::abs(r.entropy[i] - std::log(2.0));
    closest = std::min(closest, dev);
    if (dev < 1e-6) hits.push_back(r.spectrum.energies[k]);
  }
  std::sort(hits.begin(), hits.end());
  std::size_t distinct = hits.empty() ? 0 : 1;
  for (std::size_t i = 1; i < hits.size(); ++i) distinct += hits[i] - hits[i - 1] > 1e-9;
  v.detail << "flagged=" << flagged << " within_1e-6_of_ln2=" << hits.size() << " distinct_energies=" << distinct
           << " min|S-ln2|=" << closest;
  v.check(distinct >= 2, "two flagged states at distinct energies with S = ln 2 to 1e-6");
  return v;
}

// ------------------------------------------------------------------ 4

Verdict criterion4() {
  Verdict v;
  for (int d = 1; d <= 3; ++d) {
    const auto r = compute_quench(config("model = su2-matter\nN = 6\ng = 1\nm = 0.1\ninitial_state = 2, " +
                                         std::to_string(d) + "\n"));
    std::vector<double> gap(r.times.size());
    for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = std::abs(r.obs_quench[i] - r.obs_micro[i]);
    const double mean_gap = window_stats(r.times, gap, 10.0, 50.0).mean;
    const double sd = window_stats(r.times, r.obs_quench, 10.0, 50.0).stddev;
    const double ratio = mean_gap / sd;
    v.detail << " D=" << d << ": <|q-m|>=" << mean_gap << " sd_quench=" << sd << " ratio=" << ratio;
    if (d < 3) v.check(ratio < 2.0, "D=" + std::to_string(d) + " ratio < 2");
    else v.check(ratio > 5.0, "D=3 ratio > 5");
  }
  return v;
}

// ------------------------------------------------------------------ 5

Verdict criterion5() {
  Verdict v;
  const auto a = compute_sectors(config("model = u1-ladder\nLambda = 1\ncutoff = 1\nL_range = 2, 3, 4\n"));
  const auto b = compute_sectors(config("model = u1-ladder\nLambda = 2\ncutoff = 2\nL_range = 2, 3, 4\n"));
  std::vector<Index> ca, cb;
  for (const auto& r : a.rows) ca.push_back(r.count);
  for (const auto& r : b.rows) cb.push_back(r.count);
  v.detail << "Lambda=1,E=1 counts=" << ca[0] << "," << ca[1] << "," << ca[2] << " Lambda=2,E=2 counts=" << cb[0]
           << "," << cb[1] << "," << cb[2] << " growth=" << b.growth_rate;
  v.check(ca == std::vector<Index>{9, 27, 81}, "counts (9, 27, 81)");
  v.check(cb[0] < cb[1] && cb[1] < cb[2], "strictly increasing counts");
  v.check(b.growth_rate > 0.0, "growth exponent > 0");
  for (const auto* t : {&a, &b})
    for (const auto& r : t->rows) v.check(r.largest <= r.dimension, "largest <= dimension");
  return v;
}

// ------------------------------------------------------------------ 6

Verdict criterion6() {
  Verdict v;
  const auto r = compute_sw_check(config("model = u1-ladder\nsw_instances = 10\nseed = 1\n"));
  double lo = 1e300, hi = 0.0;
  int instances = 0;
  for (const auto& row : r.order) {
    if (row.ratio == 0.0) {
      ++instances;
      continue;
    }
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  v.detail << "instances=" << instances << " halving ratios in [" << lo << ", " << hi
           << "] two_level_error=" << r.two_level_error;
  v.check(instances == 10, "10 instances");
  v.check(lo >= 4.0 && hi <= 16.0, "ratios within a factor 2 of 8");
  v.check(r.two_level_error <= 1e-12, "2x2 analytic to 1e-12");
  return v;
}

// ------------------------------------------------------------------ 7

Verdict criterion7() {
  Verdict v;
  const auto r = compute_sw_check(config("model = u1-ladder\nL = 2\ncutoff = 3\n"));
  v.detail << "norm(E=2..6)=";
  for (const auto& row : r.vs_cutoff.rows) v.detail << row.correction_norm << (&row == &r.vs_cutoff.rows.back() ? "" : ",");
  v.detail << " exponent_E=" << r.vs_cutoff.exponent << " exponent_g=" << r.vs_coupling.exponent;
  v.check(r.vs_cutoff.exponent <= -1.0, "1/E power >= 1");
  v.check(std::abs(r.vs_coupling.exponent + 6.0) <= 1.0, "g power within 1 of -6");
  return v;
}

// ------------------------------------------------------------------ 8

oracle::Matrix to_oracle(const Eigen::MatrixXd& m) {
  oracle::Matrix out = oracle::zeros(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

Verdict criterion8() {
  Verdict v;

  // Hermiticity
  const u1::U1Space ladder(4, 4);
  const auto hu = u1::build_u1_hamiltonian(ladder, 0.6);
  const auto s4 = su2::build_su2_space(4);
  const auto s6 = su2::build_su2_space(6, 6);
  const auto h4 = su2::build_su2_hamiltonian(s4, 1.0, 0.1);
  const auto h6 = su2::build_su2_hamiltonian(s6, 1.0, 0.1);
  const double asym = std::max({hu.asymmetry(), h4.asymmetry(), h6.asymmetry()});
  v.detail << "asymmetry=" << asym;
  v.check(asym == 0.0, "Hermiticity exact");

  // Colour charges
  double comm = 0.0;
  for (int a = 0; a < 3; ++a) {
    comm = std::max(comm, commutator_max_norm(h4.matrix(), su2::color_charge(s4, a).matrix));
    comm = std::max(comm, commutator_max_norm(h6.matrix(), su2::color_charge(s6, a).matrix));
  }
  v.detail << " max|[H,Q^a]|=" << comm;
  v.check(comm == 0.0, "[H, Q^a] = 0 exact");

  // Norm and energy drift of a quench in the half-filled N = 6 sector
  {
    const Eigen::VectorXd phi = su2::build_phi_state(s6, 2, 3);
    const auto spec = diagonalize(h6);
    const auto times = time_grid(50.0, 200);
    const auto states = evolve(spec, phi, times);
    const double e0 = h6.expectation(phi);
    double norm_drift = 0.0, energy_drift = 0.0;
    for (const auto& s : states) {
      norm_drift = std::max(norm_drift, std::abs(s.norm() - 1.0));
      energy_drift = std::max(energy_drift, std::abs(h6.expectation(s) - e0));
    }
    v.detail << " norm_drift=" << norm_drift << " energy_drift=" << energy_drift;
    v.check(norm_drift < 1e-10, "norm drift < 1e-10");
    v.check(energy_drift < 1e-9, "energy drift < 1e-9");
  }

  // Spectral propagation against RK4 at dimension 125
  {
    const u1::U1Space small(3, 2);
    const auto h = u1::build_u1_hamiltonian(small, 0.6);
    const Eigen::VectorXd psi0 = u1::basis_state(small, {{2, -1, 1}});
    const double t = 2.0;
    const auto spectral = evolve(diagonalize(h), psi0, std::vector<double>{t}).front();
    oracle::CVector start(psi0.size());
    for (Index i = 0; i < psi0.size(); ++i) start[static_cast<std::size_t>(i)] = psi0[i];
    const auto ode = oracle::rk4(to_oracle(h.dense()), start, t, 4000);
    double diff = 0.0;
    for (Index i = 0; i < psi0.size(); ++i) diff = std::max(diff, std::abs(spectral[i] - ode[static_cast<std::size_t>(i)]));
    v.detail << " spectral_vs_rk4(dim=" << psi0.size() << ")=" << diff;
    v.check(diff < 1e-6, "spectral vs ODE to 1e-6");
  }

  // L = 2 hand-assembled matrix, index (n0 + 1) * 3 + (n1 + 1)
  {
    const u1::U1Space two(2, 1);
    const Eigen::MatrixXd dense = u1::build_u1_hamiltonian(two, 1.0).dense();
    double diff = 0.0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c)
          for (int d = -1; d <= 1; ++d) {
            const int i = (a + 1) * 3 + (b + 1), j = (c + 1) * 3 + (d + 1);
            double ref = 0.0;
            if (i == j) ref = a * a + b * b + (a - b) * (a - b);
            else if (std::abs(a - c) + std::abs(b - d) == 1) ref = -0.5;
            diff = std::max(diff, std::abs(dense(i, j) - ref));
          }
    v.detail << " hand_matrix_diff=" << diff;
    v.check(diff == 0.0, "L=2 hand-assembled equality");
  }

  // Effective Hamiltonian idempotence and frozen-projector commutation
  {
    const u1::U1Space space(3, 2);
    const auto h = u1::build_u1_hamiltonian(space, 0.6);
    const auto patterns = u1_frozen_patterns(space, 2.0);
    const auto eff = effective_hamiltonian(h, patterns);
    const auto twice = effective_hamiltonian(eff, patterns);
    const double idem = (eff.dense() - twice.dense()).cwiseAbs().maxCoeff();
    const auto ids = pattern_ids(patterns);
    const Index n_patterns = *std::max_element(ids.begin(), ids.end()) + 1;
    double pc = 0.0;
    for (Index p = 0; p < n_patterns; ++p) {
      Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Index>(ids.size()));
      for (std::size_t i = 0; i < ids.size(); ++i) diag[static_cast<Index>(i)] = ids[i] == p ? 1.0 : 0.0;
      pc = std::max(pc, commutator_max_norm(eff, SymmetricOperator::diagonal(diag)));
    }
    v.detail << " idempotence=" << idem << " max|[H_eff,Pi]|=" << pc << " patterns=" << n_patterns;
    v.check(idem == 0.0, "H_eff idempotent");
    v.check(pc == 0.0, "frozen projectors commute exactly");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Verdict()>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (!criteria.count(n)) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 64;
    }
    selected.insert(n);
  }
  if (selected.empty())
    for (const auto& [n, f] : criteria) selected.insert(n);

  int failed = 0;
  for (int n : selected) {
    Verdict v;
    try {
      v = criteria.at(n)();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    failed += !v.pass;
    std::printf("%s criterion %d: %s\n", v.pass ? "PASS" : "FAIL", n, v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed;
}

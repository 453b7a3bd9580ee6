#pragma once

// Experiment harness: random channel generation, single solves, convergence
// traces from several starts, and parameter sweeps averaged over channels.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "secbf/ibcd.hpp"
#include "secbf/model.hpp"

namespace secbf {

enum class Method { SingleStream, FullStream, Ibcd, AnIbcd };

const char* to_string(Method m);
/// Accepts single_stream, full_stream, ibcd, an_ibcd. Throws DataError otherwise.
Method parse_method(const std::string& s);

enum class SweepAxis { PtDbm, PeDbm, Nt };

const char* to_string(SweepAxis a);
/// Accepts pt_dbm, pe_dbm, nt. Throws DataError otherwise.
SweepAxis parse_axis(const std::string& s);

struct ScenarioConfig {
  Eigen::Index n_t = 4;
  Eigen::Index n_i = 2;
  Eigen::Index n_e = 2;
  Eigen::Index streams = 2;
  double pt_dbm = 20;
  double pe_dbm = -30;
  double sigma2_dbm = -50;
  double zeta = 0.5;
  double pathloss_db = 50;
  std::vector<std::uint64_t> seeds{0};
  Method method = Method::Ibcd;
  IbcdOptions ibcd;

  /// Throws DataError / DimensionError on out-of-range fields.
  void validate() const;
  DesignBudget budget() const { return DesignBudget::from_dbm(pt_dbm, pe_dbm); }
};

/// Seed of the k-th derived stream of a master seed. Distinct (master, k)
/// pairs give independent mt19937_64 streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k);

/// Raw channels with i.i.d. CN(0, 10^(-pathloss_db/10)) entries, deterministic in seed.
ChannelPair gen_channels(const ScenarioConfig& cfg, std::uint64_t seed);

struct SolveOutcome {
  Method method = Method::Ibcd;
  double rate_bits = 0;
  CMat V;
  /// Artificial-noise factor; empty unless method is AnIbcd.
  CMat V_E;
  int iterations = 0;
  bool nonpositive_rate = false;
  /// Set for ibcd and an_ibcd.
  std::optional<ConvergenceTrace> trace;
};

/// Solves one instance with cfg.method. Iterative methods start from the
/// warmstart drawn with start_seed. Throws FeasibilityError when the
/// harvesting target is unreachable.
SolveOutcome solve_instance(const ScenarioConfig& cfg, const ChannelPair& ch, std::uint64_t start_seed);

struct TraceRun {
  std::vector<ConvergenceTrace> traces;
  /// Global optimum in bits when a solver for it applies: single stream for
  /// d = 1, full stream for d = N_T with a PSD rate gram.
  std::optional<double> reference_bits;
  std::string reference_method;
};

/// n_starts warmstarted runs of cfg.method (ibcd or an_ibcd) on one channel.
TraceRun run_trace(const ScenarioConfig& cfg, const ChannelPair& ch, int n_starts);

/// One CSV block with columns start, iter, rate_bits, power_w, eh_margin_w
/// (and an_power_w), plus reference_bits when a reference exists.
void write_trace_run_csv(std::ostream& os, const TraceRun& run);

struct SweepResult {
  SweepAxis axis = SweepAxis::PtDbm;
  std::vector<double> values;
  std::vector<Method> arms;
  /// mean_rate_bits[arm][point] over used instances; NaN when none were used.
  std::vector<std::vector<double>> mean_rate_bits;
  /// per_seed_rates[arm][point][channel]; NaN for skipped instances.
  std::vector<std::vector<std::vector<double>>> per_seed_rates;
  std::vector<int> n_used;
  std::vector<int> n_skipped;
};

/// For each axis value, solves n_channels instances with every arm and
/// averages the rates. All arms see the same channels, and channel j uses the
/// same seed at every axis value. An instance is skipped for all arms when it
/// is infeasible, when any arm returns a nonpositive rate, or when any arm
/// fails. Instances run on `threads` workers (0 = hardware concurrency); the
/// result does not depend on the thread count.
SweepResult run_sweep(const ScenarioConfig& cfg, const std::vector<Method>& arms, SweepAxis axis,
                      const std::vector<double>& values, int n_channels, unsigned threads = 0);

/// Columns axis_value, mean_rate_bits, n_used, n_skipped, then
/// <arm>_mean_bits for every arm. mean_rate_bits is the first arm.
void write_sweep_csv(std::ostream& os, const SweepResult& r);

}  // namespace secbf

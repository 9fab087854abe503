// Monte Carlo check of the expected-energy model: every generated message
// walks toward the sink, sliding at slice j with probability p_j and
// otherwise being ejected there.
#pragma once

#include "slicenet/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace slicenet {

enum class CountRounding {
  reject_fractional,  // non-integer g is an error
  nearest,            // round each g_i to the nearest integer
};

struct SimConfig {
  std::size_t replications = 100000;
  /// When set, g is rescaled to this many messages per replication and
  /// apportioned by largest remainder; otherwise g itself is used.
  std::optional<std::size_t> messages_per_replication;
  CountRounding rounding = CountRounding::reject_fractional;
  std::uint64_t seed = 0;
  double tolerance_sigmas = 3.0;
  int jobs = 0;  // <= 0: OpenMP default
};

struct SimResult {
  /// Integer message counts per slice actually simulated.
  std::vector<std::int64_t> counts;
  /// True when counts differ from the spec's g.
  bool rounded = false;
  std::size_t replications = 0;
  std::vector<double> mean_forwarded;
  std::vector<double> mean_ejected;
  std::vector<double> mean_per_sensor;
  /// Standard error of mean_per_sensor.
  std::vector<double> std_error;

  /// The spec with g replaced by the simulated counts; the analytic side of
  /// a comparison must use it.
  [[nodiscard]] NetworkSpec simulated_spec(const NetworkSpec& original) const;
};

struct ReplicationCounts {
  std::vector<std::int64_t> forwarded;
  std::vector<std::int64_t> ejected;
};

/// Integer counts simulated for spec under config (rounding / rescaling).
std::vector<std::int64_t> simulation_counts(const NetworkSpec& spec, const SimConfig& config);

/// One replication. The random stream depends only on (seed, replication).
ReplicationCounts run_replication(std::span<const std::int64_t> counts,
                                  const Strategy& strategy, std::uint64_t seed,
                                  std::uint64_t replication);

SimResult simulate(const NetworkSpec& spec, const Strategy& strategy,
                   const SimConfig& config);

/// Single-threaded reference; bit-identical to simulate.
SimResult simulate_serial(const NetworkSpec& spec, const Strategy& strategy,
                          const SimConfig& config);

enum class SimVerdict { pass, statistical_reject, model_mismatch };

struct SimComparison {
  std::vector<double> z;
  std::size_t worst_slice = 0;
  SimVerdict verdict = SimVerdict::pass;
  [[nodiscard]] bool passed() const { return verdict == SimVerdict::pass; }
};

/// Per-slice z-scores of the empirical means against the analytic
/// per-sensor energies. A nonzero discrepancy with zero standard error is a
/// model mismatch rather than a fluctuation.
SimComparison compare(const EnergyProfile& analytic, const SimResult& sim,
                      const SimConfig& config, Tolerance tol = {});

}  // namespace slicenet

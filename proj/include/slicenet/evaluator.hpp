// Analytic evaluation of arbitrary strategies, the tabletop optimality
// check, and an exhaustive grid oracle for small networks.
#pragma once

#include "slicenet/model.hpp"

#include <cstddef>
#include <optional>

namespace slicenet {

struct Configuration {
  NetworkSpec spec;
  Strategy strategy;
};

struct Evaluation {
  FlowState flow;
  EnergyProfile profile;
};

/// Expected flows when every slice slides a fraction p_i of what it handles:
/// T_{n-1} = g_{n-1}, T_i = g_i + p_{i+1} T_{i+1}, F_i = p_i T_i,
/// J_i = (1 - p_i) T_i.
Evaluation evaluate_strategy(const Configuration& config);

/// Tabletop optimality certificate. The peak plateau is the run of
/// max-energy slices ending at the farthest one (peak_last). The
/// configuration is optimal when nothing flows into the plateau from
/// beyond it and its sink-side edge slides everything onward.
struct OptimalityReport {
  EnergyProfile profile;
  double max_value = 0.0;
  /// Farthest slice attaining the maximum.
  std::size_t peak_last = 0;
  /// Slice just sink-side of the plateau; absent when the plateau reaches
  /// the sink.
  std::optional<std::size_t> below_edge;
  /// p[peak_last + 1] == 0; nullopt when void (plateau reaches the far end).
  std::optional<bool> left_condition;
  /// p[below_edge + 1] == 1; nullopt when void.
  std::optional<bool> right_condition;
  bool optimal = false;
};

OptimalityReport check_tabletop_optimality(const Configuration& config,
                                           Tolerance tol = {});

struct OracleResult {
  Strategy strategy;
  /// Best peak per-sensor energy on the grid.
  double peak = 0.0;
  Lifespan lifespan = Lifespan::unbounded();
  std::size_t evaluated = 0;
};

/// Largest network the exhaustive oracle accepts.
inline constexpr std::size_t kOracleMaxSlices = 5;

/// Grid {0, step, 2 step, ..., 1} for every p_i, i >= 1. Picks the best peak
/// energy; ties go to the lexicographically smallest p.
/// jobs <= 0 uses the OpenMP default thread count.
OracleResult brute_force_oracle(const NetworkSpec& spec, double step, int jobs = 0);

/// Single-threaded reference for brute_force_oracle.
OracleResult brute_force_oracle_serial(const NetworkSpec& spec, double step);

/// Upper bound on how much the grid's best peak energy can exceed the true
/// optimum: a per-slice Lipschitz constant of e_i in the sup norm of p,
/// times half the grid spacing.
double oracle_energy_slack(const NetworkSpec& spec, double step);

/// Same bound expressed as a lifespan gap below the oracle's lifespan.
double oracle_lifespan_slack(const NetworkSpec& spec, double step, double oracle_peak);

/// Index i with e_i(first) >= e_i(second); nullopt would contradict the
/// no-win-win property.
std::optional<std::size_t> no_win_win_probe(const Configuration& first,
                                            const Configuration& second,
                                            Tolerance tol = {});

}  // namespace slicenet

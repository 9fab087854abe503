// Exact lifespan-maximizing propagation strategy.
//
// Slices are treated one at a time moving away from the sink. Each slice
// first ejects just enough of its own messages to match the per-sensor
// energy of its sink-side neighbour, then slides the rest along the network
// under an ejection chain that raises every slice of the running group by
// the same per-sensor amount.
//
// Two situations leave that simple pass:
//  * a slice cannot reach its neighbour's level even ejecting everything.
//    The algorithm descends one level: the slice becomes the start of a new
//    group with its ejection probability forced to 1, and farther slices
//    feed it until it catches up (then the level is popped).
//  * the chain holds negative ejection probabilities. Sliding is capped so
//    no slice ends with a negative ejected count; once a slice's ejected
//    count is exhausted its probability is pinned to 0 (a local peak with
//    sliding probability 1).
#pragma once

#include "slicenet/model.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace slicenet {

/// Saved outer level while a group tries to catch up.
struct RecursionFrame {
  std::size_t start = 0;
  double max_nrg = std::numeric_limits<double>::infinity();
  EpsilonChain saved_eps;
};

enum class TraceKind { eject, slide, descend, ascend, clamp };

struct TraceEvent {
  TraceKind kind;
  std::size_t slice;  // slice being treated, or clamped slice for clamp
  double amount;      // messages, or the ejected count at clamp time
  std::size_t level;  // recursion depth after the event
};

struct OptimizerState {
  OptimizerState(NetworkSpec spec, Tolerance tol = {});

  NetworkSpec spec;
  Tolerance tol;
  FlowState flow;
  EpsilonChain eps;
  std::vector<RecursionFrame> stack;
  std::size_t current = 0;
  std::size_t start = 0;
  double max_nrg = std::numeric_limits<double>::infinity();
  bool tracing = true;
  std::vector<TraceEvent> trace;

  [[nodiscard]] std::size_t level() const { return stack.size(); }
  [[nodiscard]] double per_sensor(std::size_t i) const {
    return per_sensor_energy(flow, spec, i);
  }
  void record(TraceKind kind, std::size_t slice, double amount);
};

/// Moves amount of the current slice's pending messages to its ejected count.
void eject(OptimizerState& state, double amount);

/// Ejection count that brings the current slice level with its sink-side
/// neighbour: b_i * e_{i-1} / d_i^2.
double ideal_ejection(const OptimizerState& state);

/// Slides amount messages from the current slice down to the sink, each slice
/// k ejecting a fraction eps_k of what reaches it.
void slide_careless(OptimizerState& state, double amount);

/// Largest slideable amount before some slice's ejected count would go
/// negative; nullopt when unbounded.
std::optional<double> compute_max_slide(const OptimizerState& state);

/// slide_careless with the physicality cap: on overflow, slides up to the
/// cap, pins exhausted negative probabilities to zero and continues.
void slide_careful(OptimizerState& state, double amount);

void down_one_level(OptimizerState& state);
void up_one_level(OptimizerState& state);

/// Messages the current slice must treat to lift its group to max_nrg.
double msg_to_go_up(const OptimizerState& state);

struct SlideDecision {
  double amount;
  bool ascend;  // the group reaches max_nrg and the level is popped
};

SlideDecision slide_amount_decision(const OptimizerState& state);

/// p_i = F_i / (F_i + J_i); idle slices get 0. Throws InvalidInput if
/// messages remain pending.
Strategy strategy_from_flow(const FlowState& flow, Tolerance tol = {});

struct Optimum {
  Strategy strategy;
  FlowState flow;
  EnergyProfile profile;
  EpsilonChain final_eps;
  /// Group starts whose catch-up never completed.
  std::vector<std::size_t> open_recursion_starts;
  std::vector<TraceEvent> trace;
};

Optimum compute_optimal(const NetworkSpec& spec, Tolerance tol = {});

}  // namespace slicenet

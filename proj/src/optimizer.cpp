#include "slicenet/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slicenet {

OptimizerState::OptimizerState(NetworkSpec spec_in, Tolerance tol_in)
    : spec(std::move(spec_in)),
      tol(tol_in),
      flow(FlowState::initial(spec)),
      eps(epsilon_chain(spec, 0)) {}

void OptimizerState::record(TraceKind kind, std::size_t slice, double amount) {
  if (tracing) trace.push_back({kind, slice, amount, level()});
}

namespace {

double message_scale(const OptimizerState& state) {
  return std::max(1.0, state.spec.total_generated());
}

// Removes amount from the current slice's pending count, snapping a
// tolerance-sized overdraw to zero.
void take_pending(OptimizerState& state, double amount, const char* what) {
  double& pending = state.flow.pending[state.current];
  if (amount < 0.0) {
    if (!state.tol.is_zero(amount, message_scale(state)))
      throw std::invalid_argument(std::string(what) + ": negative message count");
    amount = 0.0;
  }
  if (state.tol.exceeds(amount, pending))
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(amount) +
                                " exceeds the " + std::to_string(pending) +
                                " pending messages of slice " +
                                std::to_string(state.current + 1));
  pending = std::max(0.0, pending - amount);
}

}  // namespace

void eject(OptimizerState& state, double amount) {
  take_pending(state, amount, "eject");
  amount = std::max(0.0, amount);
  state.flow.ejected[state.current] += amount;
  state.record(TraceKind::eject, state.current, amount);
}

double ideal_ejection(const OptimizerState& state) {
  const auto i = state.current;
  if (i == 0) return state.flow.pending[0];
  return state.per_sensor(i - 1) * state.spec.battery(i) / state.spec.eject_cost(i);
}

void slide_careless(OptimizerState& state, double amount) {
  take_pending(state, amount, "slide");
  double moving = std::max(0.0, amount);
  if (moving == 0.0) return;
  state.record(TraceKind::slide, state.current, moving);
  for (std::size_t k = state.current + 1; k-- > 0;) {
    const double e = state.eps.eps[k];
    state.flow.forwarded[k] += moving * (1.0 - e);
    state.flow.ejected[k] += moving * e;
    moving *= 1.0 - e;
  }
}

std::optional<double> compute_max_slide(const OptimizerState& state) {
  std::optional<double> best;
  double reaching = 1.0;
  for (std::size_t k = state.current + 1; k-- > 0;) {
    const double share = reaching * state.eps.eps[k];
    reaching *= 1.0 - state.eps.eps[k];
    if (share < 0.0) {
      const double bound = std::max(0.0, state.flow.ejected[k]) / -share;
      if (!best || bound < *best) best = bound;
    }
  }
  return best;
}

void slide_careful(OptimizerState& state, double amount) {
  if (amount < 0.0 && !state.tol.is_zero(amount, message_scale(state)))
    throw std::invalid_argument("slide: negative message count");
  double remaining = std::max(0.0, amount);
  // Every round either finishes, slides a positive amount, or changes the
  // set of pinned probabilities; bound the rounds so a broken invariant
  // cannot spin forever.
  const std::size_t max_rounds = 8 * state.spec.size() + 8;
  for (std::size_t round = 0;; ++round) {
    if (round > max_rounds)
      throw InternalError("careful slide made no progress at slice " +
                          std::to_string(state.current + 1));
    const auto cap = compute_max_slide(state);
    if (!cap || remaining <= *cap) {
      slide_careless(state, remaining);
      return;
    }
    slide_careless(state, *cap);
    remaining -= *cap;

    const auto before = state.eps.kind;
    state.eps = epsilon_chain(state.spec, state.start,
                              Caution{state.flow, state.current, state.tol});
    for (std::size_t k = 0; k < state.eps.size(); ++k) {
      if (state.eps.kind[k] == EpsilonKind::clamped_zero &&
          before[k] != EpsilonKind::clamped_zero) {
        state.record(TraceKind::clamp, k, state.flow.ejected[k]);
        state.flow.ejected[k] = 0.0;
      }
    }
    if (*cap <= 0.0 && state.eps.kind == before)
      throw InternalError("careful slide: capped at zero without a new clamp at slice " +
                          std::to_string(state.current + 1));
  }
}

void down_one_level(OptimizerState& state) {
  if (state.current == 0) throw InternalError("cannot descend at the first slice");
  state.stack.push_back({state.start, state.max_nrg, state.eps});
  state.start = state.current;
  state.max_nrg = state.per_sensor(state.current - 1);
  state.eps = epsilon_chain(state.spec, state.current);
  state.record(TraceKind::descend, state.current, state.max_nrg);
}

void up_one_level(OptimizerState& state) {
  if (state.stack.empty()) throw InternalError("ascend requested at the outermost level");
  auto frame = std::move(state.stack.back());
  state.stack.pop_back();
  state.start = frame.start;
  state.max_nrg = frame.max_nrg;
  state.eps = std::move(frame.saved_eps);
  state.record(TraceKind::ascend, state.current, 0.0);
}

double msg_to_go_up(const OptimizerState& state) {
  if (std::isinf(state.max_nrg)) return std::numeric_limits<double>::infinity();
  const auto i = state.current;
  const double gap = state.max_nrg - state.per_sensor(i);
  const double per_message = treatment_cost(state.spec, i, state.eps.eps[i]);
  return std::max(0.0, gap / per_message);
}

SlideDecision slide_amount_decision(const OptimizerState& state) {
  const double pending = state.flow.pending[state.current];
  if (state.level() == 0) return {pending, false};
  const double up = msg_to_go_up(state);
  if (pending < up - state.tol.slack(up)) return {pending, false};
  return {std::min(pending, up), true};
}

Strategy strategy_from_flow(const FlowState& flow, Tolerance tol) {
  double scale = 1.0;
  for (std::size_t i = 0; i < flow.size(); ++i)
    scale = std::max(scale, flow.forwarded[i] + flow.ejected[i]);
  Strategy out{std::vector<double>(flow.size(), 0.0)};
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (!tol.is_zero(flow.pending[i], scale))
      throw InvalidInput("slice " + std::to_string(i + 1) + " still has " +
                         std::to_string(flow.pending[i]) + " untreated messages");
    const double total = flow.forwarded[i] + flow.ejected[i];
    if (total > 0.0) out.p[i] = std::clamp(flow.forwarded[i] / total, 0.0, 1.0);
  }
  return out;
}

Optimum compute_optimal(const NetworkSpec& spec, Tolerance tol) {
  OptimizerState state(spec, tol);
  const auto n = spec.size();

  eject(state, state.flow.pending[0]);

  for (std::size_t i = 1; i < n; ++i) {
    state.current = i;
    const double ideal = ideal_ejection(state);
    const double available = state.flow.pending[i];
    if (tol.exceeds(ideal, available)) {
      eject(state, available);
      down_one_level(state);
      continue;
    }
    eject(state, std::min(ideal, available));

    const double done = tol.slack(spec.generated(i));
    while (state.flow.pending[i] > done) {
      const double pending_before = state.flow.pending[i];
      const auto levels_before = state.level();
      const auto decision = slide_amount_decision(state);
      slide_careful(state, decision.amount);
      if (decision.ascend) up_one_level(state);
      if (state.flow.pending[i] >= pending_before && state.level() >= levels_before)
        throw InternalError("main loop made no progress at slice " + std::to_string(i + 1));
    }
    state.flow.pending[i] = 0.0;
  }

  Optimum out;
  out.strategy = strategy_from_flow(state.flow, tol);
  out.profile = profile_of(state.flow, spec);
  if (!state.stack.empty()) {
    for (std::size_t f = 1; f < state.stack.size(); ++f)
      out.open_recursion_starts.push_back(state.stack[f].start);
    out.open_recursion_starts.push_back(state.start);
  }
  out.final_eps = state.eps;
  out.trace = std::move(state.trace);
  out.flow = std::move(state.flow);
  return out;
}

}  // namespace slicenet

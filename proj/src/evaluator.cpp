#include "slicenet/evaluator.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace slicenet {

Evaluation evaluate_strategy(const Configuration& config) {
  const auto& spec = config.spec;
  const auto& p = config.strategy.p;
  config.strategy.validate(spec.size());
  const auto n = spec.size();

  Evaluation out;
  out.flow = FlowState{std::vector<double>(n), std::vector<double>(n),
                       std::vector<double>(n, 0.0)};
  double incoming = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double handled = spec.generated(i) + incoming;
    out.flow.forwarded[i] = p[i] * handled;
    out.flow.ejected[i] = (1.0 - p[i]) * handled;
    incoming = out.flow.forwarded[i];
  }
  out.profile = profile_of(out.flow, spec);
  return out;
}

OptimalityReport check_tabletop_optimality(const Configuration& config, Tolerance tol) {
  OptimalityReport report;
  report.profile = evaluate_strategy(config).profile;
  const auto& e = report.profile.per_sensor;
  const auto& p = config.strategy.p;
  const auto n = e.size();

  report.max_value = report.profile.peak();
  const double floor = report.max_value - tol.slack(report.max_value);
  auto on_plateau = [&](std::size_t i) { return e[i] >= floor; };

  std::size_t last = n - 1;
  while (!on_plateau(last)) --last;
  report.peak_last = last;

  std::size_t first = last;
  while (first > 0 && on_plateau(first - 1)) --first;
  if (first > 0) report.below_edge = first - 1;

  if (last + 1 < n) report.left_condition = p[last + 1] <= tol.rel;
  if (report.below_edge) report.right_condition = 1.0 - p[first] <= tol.rel;

  report.optimal = report.left_condition.value_or(true) &&
                   report.right_condition.value_or(true);
  return report;
}

namespace {

std::vector<double> grid_values(double step) {
  if (!(step > 0.0 && step <= 1.0))
    throw InvalidInput("oracle step must lie in (0, 1], got " + std::to_string(step));
  const auto intervals = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  std::vector<double> values;
  for (std::size_t k = 0; k <= intervals; ++k)
    values.push_back(std::min(1.0, static_cast<double>(k) * step));
  if (values.back() < 1.0 - 1e-12) values.push_back(1.0);
  return values;
}

double max_gap(const std::vector<double>& values) {
  double gap = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k)
    gap = std::max(gap, values[k] - values[k - 1]);
  return gap;
}

// Immutable view of one oracle run; the kernel decodes a linear grid index
// (p_1 most significant) and returns the peak per-sensor energy.
struct GridSearch {
  const NetworkSpec& spec;
  std::vector<double> values;
  std::size_t free_slices;
  std::size_t total;

  GridSearch(const NetworkSpec& s, double step)
      : spec(s), values(grid_values(step)), free_slices(s.size() - 1), total(1) {
    if (s.size() > kOracleMaxSlices)
      throw InvalidInput("oracle is limited to " + std::to_string(kOracleMaxSlices) +
                         " slices, got " + std::to_string(s.size()));
    for (std::size_t i = 0; i < free_slices; ++i) total *= values.size();
  }

  void decode(std::size_t index, double* p) const {
    p[0] = 0.0;
    for (std::size_t i = free_slices; i >= 1; --i) {
      p[i] = values[index % values.size()];
      index /= values.size();
    }
  }

  double peak_at(std::size_t index) const {
    double p[kOracleMaxSlices];
    decode(index, p);
    double incoming = 0.0;
    double peak = 0.0;
    for (std::size_t i = spec.size(); i-- > 0;) {
      const double handled = spec.generated(i) + incoming;
      const double energy = handled * (p[i] + (1.0 - p[i]) * spec.eject_cost(i));
      peak = std::max(peak, energy / spec.battery(i));
      incoming = p[i] * handled;
    }
    return peak;
  }

  OracleResult finish(std::size_t best_index, double best_peak) const {
    OracleResult out;
    out.strategy.p.resize(spec.size());
    decode(best_index, out.strategy.p.data());
    out.peak = best_peak;
    out.lifespan = best_peak > 0.0 ? Lifespan::finite(1.0 / best_peak)
                                   : Lifespan::unbounded();
    out.evaluated = total;
    return out;
  }
};

bool better(double peak, std::size_t index, double best_peak, std::size_t best_index) {
  return peak < best_peak || (peak == best_peak && index < best_index);
}

}  // namespace

OracleResult brute_force_oracle_serial(const NetworkSpec& spec, double step) {
  const GridSearch search(spec, step);
  double best_peak = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t idx = 0; idx < search.total; ++idx) {
    const double peak = search.peak_at(idx);
    if (peak < best_peak) {
      best_peak = peak;
      best_index = idx;
    }
  }
  return search.finish(best_index, best_peak);
}

OracleResult brute_force_oracle(const NetworkSpec& spec, double step, int jobs) {
  const GridSearch search(spec, step);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const auto total = static_cast<std::int64_t>(search.total);

  double best_peak = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
#pragma omp parallel num_threads(threads)
  {
    double local_peak = std::numeric_limits<double>::infinity();
    std::size_t local_index = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t idx = 0; idx < total; ++idx) {
      const auto u = static_cast<std::size_t>(idx);
      const double peak = search.peak_at(u);
      if (better(peak, u, local_peak, local_index)) {
        local_peak = peak;
        local_index = u;
      }
    }
#pragma omp critical(slicenet_oracle_reduce)
    {
      if (better(local_peak, local_index, best_peak, best_index)) {
        best_peak = local_peak;
        best_index = local_index;
      }
    }
  }
  return search.finish(best_index, best_peak);
}

double oracle_energy_slack(const NetworkSpec& spec, double step) {
  const auto n = spec.size();
  // suffix[j]: most messages slice j can ever handle.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] + spec.generated(j);

  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d2 = spec.eject_cost(i);
    double bound = i > 0 ? suffix[i] * (d2 - 1.0) : 0.0;
    for (std::size_t j = i + 1; j < n; ++j) bound += d2 * suffix[j];
    lipschitz = std::max(lipschitz, bound / spec.battery(i));
  }
  return lipschitz * max_gap(grid_values(step)) / 2.0;
}

double oracle_lifespan_slack(const NetworkSpec& spec, double step, double oracle_peak) {
  if (oracle_peak <= 0.0) return 0.0;
  const double slack = oracle_energy_slack(spec, step);
  return 1.0 / oracle_peak - 1.0 / (oracle_peak + slack);
}

std::optional<std::size_t> no_win_win_probe(const Configuration& first,
                                            const Configuration& second,
                                            Tolerance tol) {
  if (!(first.spec == second.spec))
    throw InvalidInput("no-win-win probe needs configurations over the same network");
  const auto a = evaluate_strategy(first).profile.per_sensor;
  const auto b = evaluate_strategy(second).profile.per_sensor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] >= b[i] - tol.slack(b[i])) return i;
  }
  return std::nullopt;
}

}  // namespace slicenet

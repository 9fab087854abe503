#include "slicenet/simulator.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace slicenet {

NetworkSpec SimResult::simulated_spec(const NetworkSpec& original) const {
  auto b = original.batteries();
  auto d = original.distances();
  return NetworkSpec({b.begin(), b.end()}, {d.begin(), d.end()},
                     std::vector<double>(counts.begin(), counts.end()));
}

std::vector<std::int64_t> simulation_counts(const NetworkSpec& spec,
                                            const SimConfig& config) {
  const auto n = spec.size();
  std::vector<std::int64_t> counts(n);
  if (config.messages_per_replication) {
    const double total = spec.total_generated();
    if (total <= 0.0) return counts;
    const auto target = static_cast<std::int64_t>(*config.messages_per_replication);
    std::vector<double> remainder(n);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double share = spec.generated(i) / total * static_cast<double>(target);
      counts[i] = static_cast<std::int64_t>(std::floor(share));
      remainder[i] = share - std::floor(share);
      assigned += counts[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < target; ++k, ++assigned) ++counts[order[k % n]];
    return counts;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double g = spec.generated(i);
    const double nearest = std::round(g);
    if (nearest != g && config.rounding == CountRounding::reject_fractional)
      throw InvalidInput("g[" + std::to_string(i + 1) + "] = " + std::to_string(g) +
                         " is not an integer; simulation needs explicit rounding");
    counts[i] = static_cast<std::int64_t>(nearest);
  }
  return counts;
}

ReplicationCounts run_replication(std::span<const std::int64_t> counts,
                                  const Strategy& strategy, std::uint64_t seed,
                                  std::uint64_t replication) {
  const auto n = counts.size();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication),
                    static_cast<std::uint32_t>(replication >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ReplicationCounts out{std::vector<std::int64_t>(n, 0), std::vector<std::int64_t>(n, 0)};
  for (std::size_t origin = n; origin-- > 0;) {
    for (std::int64_t m = 0; m < counts[origin]; ++m) {
      std::size_t at = origin;
      while (at > 0 && unit(rng) < strategy.p[at]) {
        ++out.forwarded[at];
        --at;
      }
      ++out.ejected[at];
    }
  }
  return out;
}

namespace {

// Exact integer moments per slice, so any summation order gives the same
// result.
struct Moments {
  explicit Moments(std::size_t n) : f(n), j(n), ff(n), jj(n), fj(n) {}
  std::vector<std::int64_t> f, j, ff, jj, fj;

  void add(const ReplicationCounts& r) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] += r.forwarded[i];
      j[i] += r.ejected[i];
      ff[i] += r.forwarded[i] * r.forwarded[i];
      jj[i] += r.ejected[i] * r.ejected[i];
      fj[i] += r.forwarded[i] * r.ejected[i];
    }
  }
  void merge(const Moments& o) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] += o.f[i];
      j[i] += o.j[i];
      ff[i] += o.ff[i];
      jj[i] += o.jj[i];
      fj[i] += o.fj[i];
    }
  }
};

struct Prepared {
  std::vector<std::int64_t> counts;
  bool rounded = false;
};

Prepared prepare(const NetworkSpec& spec, const Strategy& strategy, const SimConfig& config) {
  strategy.validate(spec.size());
  if (config.replications < 1) throw InvalidInput("replications must be at least 1");
  Prepared out{simulation_counts(spec, config), false};
  for (std::size_t i = 0; i < spec.size(); ++i)
    out.rounded |= static_cast<double>(out.counts[i]) != spec.generated(i);
  // Squared per-replication counts are summed in 64 bits.
  const auto total = std::accumulate(out.counts.begin(), out.counts.end(), std::int64_t{0});
  const long double worst = static_cast<long double>(total) * total * 2.0L *
                            static_cast<long double>(config.replications);
  if (worst > static_cast<long double>(std::numeric_limits<std::int64_t>::max()))
    throw InvalidInput("too many messages x replications for exact accumulation");
  return out;
}

SimResult summarize(const NetworkSpec& spec, const Prepared& prep, const Moments& m,
                    std::size_t replications) {
  const auto n = spec.size();
  const long double r = static_cast<long double>(replications);
  SimResult out;
  out.counts = prep.counts;
  out.rounded = prep.rounded;
  out.replications = replications;
  out.mean_forwarded.resize(n);
  out.mean_ejected.resize(n);
  out.mean_per_sensor.resize(n);
  out.std_error.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long double c = spec.eject_cost(i);
    const long double b = spec.battery(i);
    const long double mf = m.f[i] / r;
    const long double mj = m.j[i] / r;
    out.mean_forwarded[i] = static_cast<double>(mf);
    out.mean_ejected[i] = static_cast<double>(mj);
    out.mean_per_sensor[i] = static_cast<double>((mf + mj * c) / b);
    if (replications < 2) continue;
    // sum of (F + c J)^2 minus r * mean^2, all from exact integer moments.
    const long double sum_sq = m.ff[i] + 2.0L * c * m.fj[i] + c * c * m.jj[i];
    const long double sum = m.f[i] + c * m.j[i];
    const long double var = std::max(0.0L, (sum_sq - sum * sum / r) / (r - 1.0L));
    out.std_error[i] = static_cast<double>(std::sqrt(var / r) / b);
  }
  return out;
}

}  // namespace

SimResult simulate_serial(const NetworkSpec& spec, const Strategy& strategy,
                          const SimConfig& config) {
  const auto prep = prepare(spec, strategy, config);
  Moments total(spec.size());
  for (std::size_t rep = 0; rep < config.replications; ++rep)
    total.add(run_replication(prep.counts, strategy, config.seed, rep));
  return summarize(spec, prep, total, config.replications);
}

SimResult simulate(const NetworkSpec& spec, const Strategy& strategy,
                   const SimConfig& config) {
  const auto prep = prepare(spec, strategy, config);
  const int threads = config.jobs > 0 ? config.jobs : omp_get_max_threads();
  const auto reps = static_cast<std::int64_t>(config.replications);
  Moments total(spec.size());
#pragma omp parallel num_threads(threads)
  {
    Moments local(spec.size());
#pragma omp for schedule(static) nowait
    for (std::int64_t rep = 0; rep < reps; ++rep)
      local.add(run_replication(prep.counts, strategy, config.seed,
                                static_cast<std::uint64_t>(rep)));
#pragma omp critical(slicenet_sim_reduce)
    total.merge(local);
  }
  return summarize(spec, prep, total, config.replications);
}

SimComparison compare(const EnergyProfile& analytic, const SimResult& sim,
                      const SimConfig& config, Tolerance tol) {
  const auto n = analytic.size();
  if (sim.mean_per_sensor.size() != n)
    throw InvalidInput("analytic profile and simulation cover different slice counts");
  SimComparison out;
  out.z.resize(n);
  double worst = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = sim.mean_per_sensor[i] - analytic.per_sensor[i];
    double z = 0.0;
    if (sim.std_error[i] > 0.0) {
      z = diff / sim.std_error[i];
    } else if (!tol.equal(sim.mean_per_sensor[i], analytic.per_sensor[i])) {
      z = std::copysign(std::numeric_limits<double>::infinity(), diff);
      out.verdict = SimVerdict::model_mismatch;
    }
    out.z[i] = z;
    if (std::abs(z) > worst) {
      worst = std::abs(z);
      out.worst_slice = i;
    }
  }
  if (out.verdict == SimVerdict::pass && worst > config.tolerance_sigmas)
    out.verdict = SimVerdict::statistical_reject;
  return out;
}

}  // namespace slicenet

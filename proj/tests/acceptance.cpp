// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "slicenet/evaluator.hpp"
#include "slicenet/model.hpp"
#include "slicenet/optimizer.hpp"
#include "slicenet/simulator.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace slicenet;
using slicenet::testing::random_spec;
using slicenet::testing::random_strategy;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool rel_eq(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

const NetworkSpec kBalanced({1, 1}, {1, 2}, {1, 10});
const NetworkSpec kLittleMessages({1, 1}, {1, 2}, {10, 1});

Outcome worked_balanced() {
  const auto t0 = Clock::now();
  const auto best = compute_optimal(kBalanced);
  const double ms = ms_since(t0);
  const auto& p = best.strategy.p;
  const auto& E = best.profile.energy;
  const auto life = best.profile.lifespan();
  std::ostringstream os;
  os.precision(12);
  os << "p=(" << p[0] << ", " << p[1] << ") E=(" << E[0] << ", " << E[1] << ") lifespan="
     << (life.is_unbounded() ? 0.0 : life.value()) << " in " << ms << " ms";
  const bool ok = p[0] == 0.0 && rel_eq(p[1], 0.975) && rel_eq(E[0], 10.75) &&
                  rel_eq(E[1], 10.75) && !life.is_unbounded() &&
                  rel_eq(life.value(), 1 / 10.75) && ms < 1.0;
  return {ok, os.str()};
}

Outcome worked_little_messages() {
  const auto t0 = Clock::now();
  const auto best = compute_optimal(kLittleMessages);
  const auto report = check_tabletop_optimality({kLittleMessages, best.strategy});
  const double ms = ms_since(t0);
  const auto& p = best.strategy.p;
  const auto& E = best.profile.energy;
  std::ostringstream os;
  os << "p=(" << p[0] << ", " << p[1] << ") E=(" << E[0] << ", " << E[1]
     << ") optimal=" << (report.optimal ? "yes" : "no") << " in " << ms << " ms";
  const bool ok = p[0] == 0.0 && p[1] == 0.0 && rel_eq(E[0], 10) && rel_eq(E[1], 4) &&
                  report.optimal && ms < 1.0;
  return {ok, os.str()};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2718);
  const double step = 0.01;
  int checked = 0, failures = 0;
  double worst = 0.0;  // largest (oracle - optimizer) lifespan relative to slack
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = random_spec(rng, 2 + trial % 3);
    const auto oracle = brute_force_oracle(spec, step);
    const auto life = compute_optimal(spec).profile.lifespan();
    ++checked;
    if (oracle.lifespan.is_unbounded() || life.is_unbounded()) {
      failures += !life.is_unbounded();
      continue;
    }
    const double slack = oracle_lifespan_slack(spec, step, oracle.peak);
    const double deficit = oracle.lifespan.value() - life.value();
    if (deficit > slack) ++failures;
    if (slack > 0) worst = std::max(worst, deficit / slack);
  }
  const double ms = ms_since(t0);
  std::ostringstream os;
  os << checked << " specs, " << failures << " beyond slack, worst deficit/slack " << worst
     << ", " << ms / 1000 << " s";
  return {failures == 0 && checked >= 50 && ms < 60000, os.str()};
}

bool free_chain_in_unit_interval(const NetworkSpec& spec) {
  const auto chain = epsilon_chain(spec, 0);
  for (double e : chain.eps)
    if (e < 0.0 || e > 1.0) return false;
  return true;
}

Outcome balanced_exactness() {
  std::mt19937_64 rng(1618);
  int qualifying = 0, failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 5000 && qualifying < 500; ++trial) {
    // Far slices generating more makes the simple pass likely.
    auto spec = random_spec(rng, 2 + trial % 6);
    std::vector<double> g(spec.generated_counts().begin(), spec.generated_counts().end());
    std::sort(g.begin(), g.end());
    spec = NetworkSpec({spec.batteries().begin(), spec.batteries().end()},
                       {spec.distances().begin(), spec.distances().end()}, g);
    if (!free_chain_in_unit_interval(spec)) continue;
    const auto best = compute_optimal(spec);
    bool simple = true;
    for (const auto& ev : best.trace)
      simple &= ev.kind != TraceKind::descend && ev.kind != TraceKind::clamp;
    if (!simple) continue;
    ++qualifying;
    const auto& e = best.profile.per_sensor;
    const double hi = *std::max_element(e.begin(), e.end());
    const double lo = *std::min_element(e.begin(), e.end());
    if (hi - lo > 1e-9 * hi) ++failures;
    if (hi > 0) worst = std::max(worst, (hi - lo) / hi);
  }
  std::ostringstream os;
  os << qualifying << " qualifying specs, " << failures << " unbalanced, worst spread " << worst;
  return {failures == 0 && qualifying >= 50, os.str()};
}

Outcome structural_signature() {
  std::mt19937_64 rng(1414);
  const Tolerance tol;
  int checked = 0;
  int monotone = 0, starts = 0, tabletop = 0;
  auto check = [&](const NetworkSpec& spec) {
    const auto best = compute_optimal(spec, tol);
    const auto& e = best.profile.per_sensor;
    const auto& p = best.strategy.p;
    ++checked;
    for (std::size_t i = 1; i < spec.size(); ++i)
      if (tol.exceeds(e[i], e[i - 1]) && !tol.equal(p[i], 1.0)) {
        ++monotone;
        break;
      }
    for (auto s : best.open_recursion_starts)
      if (p[s] != 0.0) {
        ++starts;
        break;
      }
    tabletop += !check_tabletop_optimality({spec, best.strategy}, tol).optimal;
  };
  check(kBalanced);
  check(kLittleMessages);
  for (int trial = 0; trial < 3000; ++trial) check(random_spec(rng, 1 + trial % 8));
  std::ostringstream os;
  os << checked << " outputs; violations: monotonicity " << monotone << ", open starts "
     << starts << ", tabletop " << tabletop;
  return {monotone == 0 && starts == 0 && tabletop == 0, os.str()};
}

Outcome physicality() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> g(0.0, 20.0);
  int specs = 0, negative_chains = 0, clamps = 0, bad_flow = 0, bad_clamp = 0;
  double most_negative = 0.0;
  auto check = [&](const NetworkSpec& spec) {
    ++specs;
    negative_chains += epsilon_chain(spec, 0).has_negative();
    const auto best = compute_optimal(spec);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      most_negative = std::min({most_negative, best.flow.forwarded[i], best.flow.ejected[i]});
      if (best.flow.forwarded[i] < -1e-9 || best.flow.ejected[i] < -1e-9) ++bad_flow;
    }
    for (const auto& ev : best.trace) {
      if (ev.kind != TraceKind::clamp) continue;
      ++clamps;
      if (std::abs(ev.amount) > 1e-9 * std::max(1.0, spec.total_generated())) ++bad_clamp;
    }
  };
  for (int trial = 0; trial < 1000; ++trial) check(NetworkSpec({1, 0.1, 1}, {1, 2, 3}, {g(rng), g(rng), g(rng)}));
  for (int trial = 0; trial < 2000; ++trial)
    check(random_spec(rng, 3 + trial % 5, {.b_lo = 0.05, .b_hi = 1.0}));
  std::ostringstream os;
  os << specs << " specs (" << negative_chains << " with negative epsilon, " << clamps
     << " clamps); negative flows " << bad_flow << " (min " << most_negative
     << "), clamps with J != 0: " << bad_clamp;
  return {bad_flow == 0 && bad_clamp == 0 && negative_chains > 0 && clamps > 0, os.str()};
}

Outcome recurrence_residual_check() {
  std::mt19937_64 rng(9001);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto spec = random_spec(rng, n);
    const std::size_t first = trial % 3 == 0 ? (trial / 3) % n : 0;
    const auto chain = epsilon_chain(spec, first);
    for (std::size_t k = first + 1; k < n; ++k) {
      if (chain.kind[k] != EpsilonKind::free) continue;
      const double scale = treatment_cost(spec, k, chain.eps[k]);
      const double rel = std::abs(recurrence_residual(spec, chain, k)) / scale;
      worst = std::max(worst, rel);
      if (rel > 1e-9) ++failures;
    }
  }
  std::ostringstream os;
  os << "1000 specs, " << failures << " residuals above 1e-9, worst " << worst;
  return {failures == 0, os.str()};
}

Outcome monte_carlo() {
  const auto t0 = Clock::now();
  SimConfig config;
  config.replications = 100000;
  config.tolerance_sigmas = 3.0;
  config.seed = 20240101;
  std::ostringstream os;
  bool ok = true;
  for (const auto* spec : {&kBalanced, &kLittleMessages}) {
    const auto best = compute_optimal(*spec);
    const auto analytic = evaluate_strategy({*spec, best.strategy}).profile;
    const auto sim = simulate(*spec, best.strategy, config);
    const auto cmp = compare(analytic, sim, config);
    ok &= cmp.passed();
    os << "max |z| " << std::abs(cmp.z[cmp.worst_slice]) << (cmp.passed() ? " ok; " : " REJECTED; ");
  }
  const double ms = ms_since(t0);
  os << ms / 1000 << " s";
  return {ok && ms < 10000, os.str()};
}

Outcome no_win_win() {
  std::mt19937_64 rng(31415);
  int missing = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto spec = random_spec(rng, 1 + trial % 6);
    const Configuration a{spec, random_strategy(rng, spec.size())};
    const Configuration b{spec, random_strategy(rng, spec.size())};
    missing += !no_win_win_probe(a, b).has_value();
  }
  std::ostringstream os;
  os << "500 pairs, " << missing << " without a witness";
  return {missing == 0, os.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"worked balanced instance", worked_balanced},
      {"worked little-messages instance", worked_little_messages},
      {"grid oracle equivalence", oracle_equivalence},
      {"balanced-case exactness", balanced_exactness},
      {"structural optimality signature", structural_signature},
      {"physicality with negative epsilon", physicality},
      {"recurrence residual", recurrence_residual_check},
      {"Monte Carlo agreement", monte_carlo},
      {"no-win-win property", no_win_win},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("%s %d %s: %s\n", out.pass ? "PASS" : "FAIL", index++, name, out.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}

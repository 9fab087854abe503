#include "slicenet/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace slicenet {

double Tolerance::slack(double reference) const {
  return rel * std::max(1.0, std::abs(reference));
}

bool Tolerance::equal(double a, double b) const {
  return std::abs(a - b) <= slack(std::max(std::abs(a), std::abs(b)));
}

bool Tolerance::exceeds(double a, double b) const { return a > b + slack(b); }

bool Tolerance::is_zero(double a, double scale) const {
  return std::abs(a) <= slack(scale);
}

namespace {

[[noreturn]] void reject(const std::string& field, const std::string& what) {
  throw InvalidInput("field '" + field + "': " + what);
}

std::string at(std::size_t i, double v) {
  std::ostringstream os;
  os << "[" << i + 1 << "] = " << v;
  return os.str();
}

}  // namespace

NetworkSpec::NetworkSpec(std::vector<double> battery, std::vector<double> distance,
                         std::vector<double> generated)
    : battery_(std::move(battery)),
      distance_(std::move(distance)),
      generated_(std::move(generated)) {
  if (battery_.empty()) reject("n", "at least one slice is required");
  if (distance_.size() != battery_.size())
    reject("d", "length differs from b");
  if (generated_.size() != battery_.size())
    reject("g", "length differs from b");
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(battery_[i]) || battery_[i] <= 0)
      reject("b", "battery must be positive and finite, got b" + at(i, battery_[i]));
    if (!std::isfinite(distance_[i]))
      reject("d", "distance must be finite, got d" + at(i, distance_[i]));
    if (!std::isfinite(generated_[i]) || generated_[i] < 0)
      reject("g", "message count must be nonnegative and finite, got g" +
                      at(i, generated_[i]));
  }
  if (distance_[0] < 1) reject("d", "d[1] must be >= 1, got d" + at(0, distance_[0]));
  for (std::size_t i = 1; i < size(); ++i) {
    if (distance_[i] < distance_[i - 1])
      reject("d", "distances must be non-decreasing, but d" + at(i, distance_[i]) +
                      " < d" + at(i - 1, distance_[i - 1]));
  }
}

double NetworkSpec::total_generated() const {
  return std::accumulate(generated_.begin(), generated_.end(), 0.0);
}

FlowState FlowState::initial(const NetworkSpec& spec) {
  const auto n = spec.size();
  auto g = spec.generated_counts();
  return FlowState{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                   std::vector<double>(g.begin(), g.end())};
}

bool EpsilonChain::has_negative() const {
  return std::any_of(eps.begin(), eps.end(), [](double e) { return e < 0; });
}

void Strategy::validate(std::size_t expected_size) const {
  if (p.size() != expected_size)
    throw InvalidInput("field 'p': expected " + std::to_string(expected_size) +
                       " entries, got " + std::to_string(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw InvalidInput("field 'p': probability out of [0,1] at p" + at(i, p[i]));
  }
  if (p[0] != 0.0)
    throw InvalidInput("field 'p': the slice next to the sink cannot slide, p[1] must be 0");
}

double EnergyProfile::peak() const {
  return per_sensor.empty() ? 0.0
                            : *std::max_element(per_sensor.begin(), per_sensor.end());
}

Lifespan EnergyProfile::lifespan() const {
  const double top = peak();
  if (top <= 0.0) return Lifespan::unbounded();
  return Lifespan::finite(1.0 / top);
}

double slice_energy(const FlowState& flow, const NetworkSpec& spec, std::size_t i) {
  if (i >= spec.size() || i >= flow.size())
    throw std::out_of_range("slice index " + std::to_string(i) + " out of range");
  return flow.forwarded[i] + flow.ejected[i] * spec.eject_cost(i);
}

double per_sensor_energy(const FlowState& flow, const NetworkSpec& spec,
                         std::size_t i) {
  return slice_energy(flow, spec, i) / spec.battery(i);
}

EnergyProfile profile_of(const FlowState& flow, const NetworkSpec& spec) {
  EnergyProfile out;
  out.energy.resize(spec.size());
  out.per_sensor.resize(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out.energy[i] = slice_energy(flow, spec, i);
    out.per_sensor[i] = out.energy[i] / spec.battery(i);
  }
  return out;
}

EpsilonChain epsilon_chain(const NetworkSpec& spec, std::size_t first,
                           std::optional<Caution> caution) {
  const auto n = spec.size();
  if (first >= n) first = n - 1;
  EpsilonChain chain{std::vector<double>(n, 1.0),
                     std::vector<EpsilonKind>(n, EpsilonKind::forced_one)};
  const double scale = caution ? std::max(1.0, spec.total_generated()) : 1.0;
  for (std::size_t k = first + 1; k < n; ++k) {
    const double a = (spec.eject_cost(k) - 1.0) / spec.battery(k);
    const double b =
        (chain.eps[k - 1] * (spec.eject_cost(k - 1) - 1.0) + 1.0) / spec.battery(k - 1);
    if (!(a + b > 0.0))
      throw InternalError("balance recurrence denominator is not positive at slice " +
                          std::to_string(k + 1));
    chain.eps[k] = (b - 1.0 / spec.battery(k)) / (a + b);
    chain.kind[k] = EpsilonKind::free;
    if (caution && chain.eps[k] <= 0.0 && k <= caution->current &&
        caution->tol.is_zero(caution->flow.ejected[k], scale)) {
      chain.eps[k] = 0.0;
      chain.kind[k] = EpsilonKind::clamped_zero;
    }
  }
  return chain;
}

double treatment_cost(const NetworkSpec& spec, std::size_t i, double q) {
  return ((1.0 - q) + q * spec.eject_cost(i)) / spec.battery(i);
}

double recurrence_residual(const NetworkSpec& spec, const EpsilonChain& chain,
                           std::size_t k) {
  const double lhs = treatment_cost(spec, k, chain.eps[k]);
  const double rhs = (1.0 - chain.eps[k]) * treatment_cost(spec, k - 1, chain.eps[k - 1]);
  return lhs - rhs;
}

std::vector<double> unit_slide_increments(const NetworkSpec& spec,
                                          const EpsilonChain& chain,
                                          std::size_t i) {
  std::vector<double> inc(i + 1, 0.0);
  double reaching = 1.0;
  for (std::size_t k = i + 1; k-- > 0;) {
    inc[k] = reaching * treatment_cost(spec, k, chain.eps[k]);
    reaching *= 1.0 - chain.eps[k];
  }
  return inc;
}

bool is_energy_balanced(const EnergyProfile& profile, Tolerance tol) {
  if (profile.per_sensor.empty()) return true;
  const auto [lo, hi] =
      std::minmax_element(profile.per_sensor.begin(), profile.per_sensor.end());
  return *hi - *lo <= tol.rel * std::max(1.0, *hi);
}

}  // namespace slicenet

// Network model for sliced sensor networks: slices S_1 (nearest the sink)
// to S_n (farthest), each holding a battery b, a distance d to the sink and
// a count g of generated messages. A message handled by a slice is either
// slid one hop toward the sink (cost 1) or ejected straight to the sink
// (cost d^2).
//
// Slice indices in this API are zero-based: index 0 is the slice adjacent
// to the sink. Message counts are nonnegative reals (expectations).
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicenet {

/// Raised when user-supplied data violates a model invariant.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an algorithm's own invariant (progress, physicality) breaks.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Relative comparison tolerance shared by every "equal within tolerance"
/// predicate. Comparisons are scaled by max(1, |reference|).
struct Tolerance {
  double rel = 1e-9;

  [[nodiscard]] double slack(double reference) const;
  [[nodiscard]] bool equal(double a, double b) const;
  /// a > b beyond tolerance.
  [[nodiscard]] bool exceeds(double a, double b) const;
  [[nodiscard]] bool is_zero(double a, double scale = 1.0) const;
};

/// Static network description. Always valid once constructed.
class NetworkSpec {
 public:
  /// Throws InvalidInput naming the violated field.
  NetworkSpec(std::vector<double> battery, std::vector<double> distance,
              std::vector<double> generated);

  [[nodiscard]] std::size_t size() const { return battery_.size(); }
  [[nodiscard]] double battery(std::size_t i) const { return battery_.at(i); }
  [[nodiscard]] double distance(std::size_t i) const { return distance_.at(i); }
  /// Cost of ejecting one message from slice i.
  [[nodiscard]] double eject_cost(std::size_t i) const {
    return distance_.at(i) * distance_.at(i);
  }
  [[nodiscard]] double generated(std::size_t i) const { return generated_.at(i); }

  [[nodiscard]] std::span<const double> batteries() const { return battery_; }
  [[nodiscard]] std::span<const double> distances() const { return distance_; }
  [[nodiscard]] std::span<const double> generated_counts() const { return generated_; }
  [[nodiscard]] double total_generated() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

 private:
  std::vector<double> battery_;
  std::vector<double> distance_;
  std::vector<double> generated_;
};

/// Per-slice message accounting. forwarded[i] is what slice i slides toward
/// slice i-1, ejected[i] what it sends straight to the sink, pending[i] what
/// it generated and has not treated yet.
struct FlowState {
  std::vector<double> forwarded;
  std::vector<double> ejected;
  std::vector<double> pending;

  /// Zero flows with pending = generated counts.
  static FlowState initial(const NetworkSpec& spec);
  [[nodiscard]] std::size_t size() const { return forwarded.size(); }
};

enum class EpsilonKind { free, forced_one, clamped_zero };

/// Ejection probabilities of sliding messages, one per slice.
struct EpsilonChain {
  std::vector<double> eps;
  std::vector<EpsilonKind> kind;

  [[nodiscard]] std::size_t size() const { return eps.size(); }
  [[nodiscard]] bool has_negative() const;
  friend bool operator==(const EpsilonChain&, const EpsilonChain&) = default;
};

/// Sliding probability per slice.
struct Strategy {
  std::vector<double> p;

  /// Throws InvalidInput unless 0 <= p_i <= 1 and p_0 == 0.
  void validate(std::size_t expected_size) const;
};

/// min_i b_i / E_i, or unbounded when no slice spends anything.
class Lifespan {
 public:
  static Lifespan unbounded() { return Lifespan{}; }
  static Lifespan finite(double value) { return Lifespan{value}; }

  [[nodiscard]] bool is_unbounded() const { return !value_.has_value(); }
  /// Throws std::bad_optional_access when unbounded.
  [[nodiscard]] double value() const { return value_.value(); }

  friend bool operator==(const Lifespan&, const Lifespan&) = default;

 private:
  Lifespan() = default;
  explicit Lifespan(double v) : value_(v) {}
  std::optional<double> value_;
};

/// Per-slice energies. energy[i] = E_i, per_sensor[i] = E_i / b_i.
struct EnergyProfile {
  std::vector<double> energy;
  std::vector<double> per_sensor;

  [[nodiscard]] std::size_t size() const { return per_sensor.size(); }
  [[nodiscard]] double peak() const;
  [[nodiscard]] Lifespan lifespan() const;
};

/// E_i = F_i + J_i d_i^2.
double slice_energy(const FlowState& flow, const NetworkSpec& spec, std::size_t i);
/// E_i / b_i.
double per_sensor_energy(const FlowState& flow, const NetworkSpec& spec,
                         std::size_t i);
EnergyProfile profile_of(const FlowState& flow, const NetworkSpec& spec);

/// Context for the cautious variant of the chain solver: entries k <= current
/// whose value comes out <= 0 while slice k has ejected nothing are pinned
/// to zero.
struct Caution {
  const FlowState& flow;
  std::size_t current;
  Tolerance tol;
};

/// Solves the balance recurrence with eps_k = 1 for k <= first and
///   A = (d_k^2 - 1) / b_k
///   B = (eps_{k-1} (d_{k-1}^2 - 1) + 1) / b_{k-1}
///   eps_k = (B - 1/b_k) / (A + B)
/// for k > first.
EpsilonChain epsilon_chain(const NetworkSpec& spec, std::size_t first,
                           std::optional<Caution> caution = std::nullopt);

/// Per-sensor cost at slice i of treating one message while ejecting a
/// fraction q of it: ((1 - q) + q d_i^2) / b_i.
double treatment_cost(const NetworkSpec& spec, std::size_t i, double q);

/// Left side minus right side of the balance recurrence at index k >= 1.
double recurrence_residual(const NetworkSpec& spec, const EpsilonChain& chain,
                           std::size_t k);

/// Per-sensor energy increase at every slice j <= i (result[j]) caused by
/// sliding one message along the network from slice i under the chain.
std::vector<double> unit_slide_increments(const NetworkSpec& spec,
                                          const EpsilonChain& chain,
                                          std::size_t i);

/// max e - min e <= tol * max(1, max e).
bool is_energy_balanced(const EnergyProfile& profile, Tolerance tol = {});

}  // namespace slicenet

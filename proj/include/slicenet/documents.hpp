// On-disk formats. Specs and results are JSON with a versioned "schema"
// field; the profile table is comma-separated text for plotting tools.
#pragma once

#include "slicenet/evaluator.hpp"
#include "slicenet/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slicenet {

inline constexpr std::string_view kSpecSchema = "slicenet.spec/1";
inline constexpr std::string_view kResultSchema = "slicenet.result/1";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct SpecDocument {
  NetworkSpec spec;
  std::string label;
};

/// Throws InvalidInput with the parse position or the offending field.
SpecDocument parse_spec_document(std::string_view text);
std::string write_spec_document(const SpecDocument& doc);

/// "sha256:<hex>" over the canonical JSON of b, d and g.
std::string spec_hash(const NetworkSpec& spec);

struct ResultDocument {
  std::string kind;  // "optimize" or "evaluate"
  SpecDocument input;
  std::string input_hash{};
  std::string tool_version{kToolVersion};
  double tolerance = Tolerance{}.rel;
  Strategy strategy{};
  FlowState flow{};
  EnergyProfile profile{};
  OptimalityReport optimality{};
  bool balanced = false;
  /// Zero-based; only meaningful for optimizer output.
  std::vector<std::size_t> open_recursion_starts{};
};

/// Fills every derived field. Flows default to evaluating the strategy;
/// the optimizer passes its own final flows instead.
ResultDocument make_result(std::string kind, SpecDocument input, Strategy strategy,
                           Tolerance tol, std::optional<FlowState> flow = std::nullopt);

std::string write_result_document(const ResultDocument& doc);
ResultDocument parse_result_document(std::string_view text);

struct VerifyOutcome {
  bool ok = false;
  /// Name of the first violated condition, empty when ok.
  std::string violated;
  std::string detail;
  OptimalityReport report;
  bool balanced = false;
};

/// Re-derives everything from the echoed input and strategy: the hash, the
/// flows and energies recorded in the document, and the tabletop conditions.
VerifyOutcome verify_result(const ResultDocument& doc, Tolerance tol);

/// Columns: slice,b,d,g,F,J,E,e,p with a header row, one row per slice.
std::string profile_csv(const ResultDocument& doc);

struct ProfileRow {
  std::size_t slice;
  double b, d, g, forwarded, ejected, energy, per_sensor, p;
};
std::vector<ProfileRow> parse_profile_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
/// Throws std::runtime_error when the path cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace slicenet

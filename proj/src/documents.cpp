#include "slicenet/documents.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace slicenet {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw InvalidInput("field '" + field + "': " + what);
}

const Json& require(const Json& obj, const std::string& field) {
  if (!obj.is_object()) bad_field(field, "enclosing value is not an object");
  auto it = obj.find(field);
  if (it == obj.end()) bad_field(field, "missing");
  return *it;
}

std::vector<double> number_array(const Json& obj, const std::string& field) {
  const Json& arr = require(obj, field);
  if (!arr.is_array()) bad_field(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      bad_field(field, "entry " + std::to_string(i + 1) + " is not a number");
    out.push_back(arr[i].get<double>());
  }
  return out;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("parse error: ") + e.what());
  }
}

void check_schema(const Json& doc, std::string_view expected) {
  const Json& schema = require(doc, "schema");
  if (!schema.is_string() || schema.get<std::string>() != expected)
    bad_field("schema", "expected \"" + std::string(expected) + "\"");
}

SpecDocument spec_from_json(const Json& doc) {
  check_schema(doc, kSpecSchema);
  auto b = number_array(doc, "b");
  auto d = number_array(doc, "d");
  auto g = number_array(doc, "g");
  const Json& n = require(doc, "n");
  if (!n.is_number_integer() || n.get<long long>() < 1)
    bad_field("n", "expected a positive integer");
  if (static_cast<std::size_t>(n.get<long long>()) != b.size())
    bad_field("n", "is " + std::to_string(n.get<long long>()) + " but b has " +
                       std::to_string(b.size()) + " entries");
  std::string label;
  if (auto it = doc.find("label"); it != doc.end()) {
    if (!it->is_string()) bad_field("label", "expected a string");
    label = it->get<std::string>();
  }
  return SpecDocument{NetworkSpec(std::move(b), std::move(d), std::move(g)), std::move(label)};
}

Json to_array(std::span<const double> values) { return Json(std::vector<double>(values.begin(), values.end())); }

Json spec_to_json(const SpecDocument& doc) {
  Json j;
  j["schema"] = kSpecSchema;
  if (!doc.label.empty()) j["label"] = doc.label;
  j["n"] = doc.spec.size();
  j["b"] = to_array(doc.spec.batteries());
  j["d"] = to_array(doc.spec.distances());
  j["g"] = to_array(doc.spec.generated_counts());
  return j;
}

Json optional_bool(const std::optional<bool>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<bool> read_optional_bool(const Json& obj, const std::string& field) {
  const Json& v = require(obj, field);
  if (v.is_null()) return std::nullopt;
  if (!v.is_boolean()) bad_field(field, "expected true, false or null");
  return v.get<bool>();
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

}  // namespace

SpecDocument parse_spec_document(std::string_view text) {
  try {
    return spec_from_json(parse_json(text));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed spec document: ") + e.what());
  }
}

std::string write_spec_document(const SpecDocument& doc) { return spec_to_json(doc).dump(2) + "\n"; }

std::string spec_hash(const NetworkSpec& spec) {
  nlohmann::json canonical;
  canonical["b"] = to_array(spec.batteries());
  canonical["d"] = to_array(spec.distances());
  canonical["g"] = to_array(spec.generated_counts());
  const std::string bytes = canonical.dump();

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  std::ostringstream hex;
  hex << "sha256:";
  for (unsigned int i = 0; i < length; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

ResultDocument make_result(std::string kind, SpecDocument input, Strategy strategy,
                           Tolerance tol, std::optional<FlowState> flow) {
  ResultDocument doc{.kind = std::move(kind), .input = std::move(input)};
  doc.input_hash = spec_hash(doc.input.spec);
  doc.tolerance = tol.rel;
  Configuration config{doc.input.spec, std::move(strategy)};
  auto eval = evaluate_strategy(config);
  doc.optimality = check_tabletop_optimality(config, tol);
  if (flow) {
    doc.flow = std::move(*flow);
    doc.flow.pending.assign(doc.flow.size(), 0.0);
    doc.profile = profile_of(doc.flow, doc.input.spec);
  } else {
    doc.flow = std::move(eval.flow);
    doc.profile = std::move(eval.profile);
  }
  doc.balanced = is_energy_balanced(doc.profile, tol);
  doc.strategy = std::move(config.strategy);
  return doc;
}

std::string write_result_document(const ResultDocument& doc) {
  Json j;
  j["schema"] = kResultSchema;
  j["kind"] = doc.kind;
  j["tool_version"] = doc.tool_version;
  j["tolerance"] = doc.tolerance;
  j["input"] = {{"hash", doc.input_hash},
                {"label", doc.input.label},
                {"spec", spec_to_json(doc.input)}};
  j["strategy"] = {{"p", doc.strategy.p}};
  j["flow"] = {{"F", doc.flow.forwarded}, {"J", doc.flow.ejected}};
  const auto life = doc.profile.lifespan();
  j["profile"] = {{"E", doc.profile.energy},
                  {"e", doc.profile.per_sensor},
                  {"lifespan", life.is_unbounded() ? Json("unbounded") : Json(life.value())}};
  j["balanced"] = doc.balanced;
  const auto& r = doc.optimality;
  j["optimality"] = {
      {"max", r.max_value},
      {"peak_last_slice", r.peak_last + 1},
      {"below_edge_slice", r.below_edge ? Json(*r.below_edge + 1) : Json(nullptr)},
      {"left_condition", optional_bool(r.left_condition)},
      {"right_condition", optional_bool(r.right_condition)},
      {"optimal", r.optimal}};
  Json starts = Json::array();
  for (auto s : doc.open_recursion_starts) starts.push_back(s + 1);
  j["open_recursion_starts"] = starts;
  return j.dump(2) + "\n";
}

namespace {

ResultDocument result_from_json(const Json& j) {
  check_schema(j, kResultSchema);
  const Json& input = require(j, "input");
  ResultDocument doc{.kind = require(j, "kind").get<std::string>(),
                     .input = spec_from_json(require(input, "spec"))};
  doc.tool_version = require(j, "tool_version").get<std::string>();
  const Json& tol = require(j, "tolerance");
  if (!tol.is_number() || tol.get<double>() <= 0) bad_field("tolerance", "expected a positive number");
  doc.tolerance = tol.get<double>();

  const Json& hash = require(input, "hash");
  if (!hash.is_string()) bad_field("input.hash", "expected a string");
  doc.input_hash = hash.get<std::string>();

  const auto n = doc.input.spec.size();
  auto sized = [n](std::vector<double> v, const std::string& field) {
    if (v.size() != n) bad_field(field, "expected " + std::to_string(n) + " entries");
    return v;
  };
  doc.strategy.p = sized(number_array(require(j, "strategy"), "p"), "strategy.p");
  doc.strategy.validate(n);
  const Json& flow = require(j, "flow");
  doc.flow.forwarded = sized(number_array(flow, "F"), "flow.F");
  doc.flow.ejected = sized(number_array(flow, "J"), "flow.J");
  doc.flow.pending.assign(n, 0.0);
  const Json& profile = require(j, "profile");
  doc.profile.energy = sized(number_array(profile, "E"), "profile.E");
  doc.profile.per_sensor = sized(number_array(profile, "e"), "profile.e");
  doc.balanced = require(j, "balanced").get<bool>();

  const Json& r = require(j, "optimality");
  doc.optimality.profile = doc.profile;
  doc.optimality.max_value = require(r, "max").get<double>();
  doc.optimality.peak_last = require(r, "peak_last_slice").get<std::size_t>() - 1;
  if (const Json& l = require(r, "below_edge_slice"); !l.is_null())
    doc.optimality.below_edge = l.get<std::size_t>() - 1;
  doc.optimality.left_condition = read_optional_bool(r, "left_condition");
  doc.optimality.right_condition = read_optional_bool(r, "right_condition");
  doc.optimality.optimal = require(r, "optimal").get<bool>();
  if (auto it = j.find("open_recursion_starts"); it != j.end())
    for (const auto& s : *it) doc.open_recursion_starts.push_back(s.get<std::size_t>() - 1);
  return doc;
}

}  // namespace

ResultDocument parse_result_document(std::string_view text) {
  const Json j = parse_json(text);
  try {
    return result_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed result document: ") + e.what());
  }
}

VerifyOutcome verify_result(const ResultDocument& doc, Tolerance tol) {
  VerifyOutcome out;
  const Configuration config{doc.input.spec, doc.strategy};
  out.report = check_tabletop_optimality(config, tol);
  out.balanced = is_energy_balanced(out.report.profile, tol);

  std::vector<std::string> violated;
  std::ostringstream detail;
  if (out.report.left_condition == false) {
    violated.push_back("left_condition");
    detail << "slice " << out.report.peak_last + 2 << " slides into the peak plateau (p = "
           << doc.strategy.p[out.report.peak_last + 1] << ", expected 0)\n";
  }
  if (out.report.right_condition == false) {
    const auto edge = *out.report.below_edge + 1;
    violated.push_back("right_condition");
    detail << "plateau edge slice " << edge + 1 << " has p = " << doc.strategy.p[edge]
           << ", expected 1\n";
  }
  if (spec_hash(doc.input.spec) != doc.input_hash) {
    violated.push_back("input_hash");
    detail << "recorded input hash does not match the echoed spec\n";
  }
  const auto eval = evaluate_strategy(config);
  for (std::size_t i = 0; i < doc.input.spec.size(); ++i) {
    if (!tol.equal(eval.flow.forwarded[i], doc.flow.forwarded[i]) ||
        !tol.equal(eval.flow.ejected[i], doc.flow.ejected[i]) ||
        !tol.equal(eval.profile.energy[i], doc.profile.energy[i]) ||
        !tol.equal(eval.profile.per_sensor[i], doc.profile.per_sensor[i])) {
      violated.push_back("flow_consistency");
      detail << "recorded flows or energies of slice " << i + 1
             << " disagree with the strategy\n";
      break;
    }
  }
  out.ok = violated.empty();
  for (std::size_t k = 0; k < violated.size(); ++k)
    out.violated += (k ? ", " : "") + violated[k];
  out.detail = detail.str();
  return out;
}

std::string profile_csv(const ResultDocument& doc) {
  const auto& spec = doc.input.spec;
  std::string out = "slice,b,d,g,F,J,E,e,p\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out += std::to_string(i + 1);
    for (double v : {spec.battery(i), spec.distance(i), spec.generated(i), doc.flow.forwarded[i],
                     doc.flow.ejected[i], doc.profile.energy[i], doc.profile.per_sensor[i],
                     doc.strategy.p[i]}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<ProfileRow> parse_profile_csv(std::string_view text) {
  std::vector<ProfileRow> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line_no++ == 0 || line.empty()) continue;
    double fields[9];
    std::size_t count = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end && count < 9) {
      auto [next, ec] = std::from_chars(p, end, fields[count]);
      if (ec != std::errc{})
        throw InvalidInput("csv line " + std::to_string(line_no) + ": bad number in column " +
                           std::to_string(count + 1));
      ++count;
      p = next + 1;
    }
    if (count != 9)
      throw InvalidInput("csv line " + std::to_string(line_no) + ": expected 9 columns");
    rows.push_back({static_cast<std::size_t>(fields[0]), fields[1], fields[2], fields[3],
                    fields[4], fields[5], fields[6], fields[7], fields[8]});
  }
  return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace slicenet

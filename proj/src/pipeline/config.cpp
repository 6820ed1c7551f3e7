#include "dsketch/pipeline/config.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "dsketch/core/error.hpp"
#include "dsketch/core/sketch_io.hpp"

namespace dsketch {
namespace {

using Json = nlohmann::json;
using Setter = std::function<void(const Json&)>;

double number(const Json& v, const std::string& key) {
  if (!v.is_number()) fail(ErrorCode::kFormat, "config key '" + key + "' must be a number");
  return v.get<double>();
}

long long integer(const Json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(ErrorCode::kFormat, "config key '" + key + "' must be an integer");
  return v.get<long long>();
}

void check(bool ok, const std::string& key, const std::string& range) {
  if (!ok) fail(ErrorCode::kValidation, "config key '" + key + "' out of range " + range);
}

Setter real(double& field, const std::string& key, double lo, double hi, bool open_lo = false) {
  return [&field, key, lo, hi, open_lo](const Json& v) {
    const double x = number(v, key);
    const bool above = open_lo ? x > lo : x >= lo;
    check(std::isfinite(x) && above && x <= hi, key,
          std::string(open_lo ? "(" : "[") + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    field = x;
  };
}

template <typename T>
Setter whole(T& field, const std::string& key, long long lo, long long hi) {
  return [&field, key, lo, hi](const Json& v) {
    const long long x = integer(v, key);
    check(x >= lo && x <= hi, key, "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    field = T(x);
  };
}

Setter text(std::string& field, const std::string& key) {
  return [&field, key](const Json& v) {
    if (!v.is_string()) fail(ErrorCode::kFormat, "config key '" + key + "' must be a string");
    field = v.get<std::string>();
  };
}

void apply_section(const Json& obj, const std::string& section, const std::map<std::string, Setter>& setters) {
  if (!obj.is_object()) fail(ErrorCode::kFormat, "config section '" + section + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorCode::kValidation, "unknown config key '" + section + "." + key + "'");
    it->second(value);
  }
}

}  // namespace

void merge_config(Config& c, const nlohmann::json& overrides) {
  if (!overrides.is_object()) fail(ErrorCode::kFormat, "config must be a JSON object");
  Config next = c;
  auto& reg = next.registration;
  auto& an = next.analysis;
  auto& syn = next.synthesis.synthesis;
  auto& tr = next.synthesis.training;
  std::size_t bins = an.distance_bins.bins;
  const std::map<std::string, std::map<std::string, Setter>> sections{
      {"registration",
       {{"iters", whole(reg.iterations, "registration.iters", 1, 100)},
        {"omega", real(reg.omega, "registration.omega", 0.0, 100.0, true)},
        {"tolerance", whole(reg.tolerance, "registration.tolerance", 0, 10)},
        {"sigma_field", real(reg.demons.sigma_field, "registration.sigma_field", 0.0, 100.0, true)},
        {"content_only",
         [&reg](const Json& v) {
           if (!v.is_boolean()) fail(ErrorCode::kFormat, "config key 'registration.content_only' must be a boolean");
           reg.content_only = v.get<bool>();
         }}}},
      {"analysis",
       {{"rho", real(an.rho, "analysis.rho", 0.0, 100.0)},
        {"tolerance", whole(an.tolerance, "analysis.tolerance", 0, 10)},
        {"distance_bin_width", real(an.distance_bins.bin_width, "analysis.distance_bin_width", 0.0, 100.0, true)},
        {"distance_bins", whole(bins, "analysis.distance_bins", 1, 10000)}}},
      {"synthesis",
       {{"eps_c", real(syn.eps_c, "synthesis.eps_c", 0.0, 100.0, true)},
        {"w_s", real(syn.layout.w_s, "synthesis.w_s", 0.0, 1e6)},
        {"w_m", real(syn.layout.w_m, "synthesis.w_m", 0.0, 1e6)},
        {"mlp_hidden",
         [&tr](const Json& v) {
           if (!v.is_array() || v.empty()) fail(ErrorCode::kFormat, "config key 'synthesis.mlp_hidden' must be a non-empty array");
           std::vector<int> sizes;
           for (const auto& s : v) {
             int n = 0;
             whole(n, "synthesis.mlp_hidden", 1, 4096)(s);
             sizes.push_back(n);
           }
           tr.hidden = sizes;
         }},
        {"epochs", whole(tr.train.epochs, "synthesis.epochs", 1, 1000000)},
        {"learning_rate", real(tr.train.learning_rate, "synthesis.learning_rate", 0.0, 10.0, true)},
        {"momentum", real(tr.train.momentum, "synthesis.momentum", 0.0, 0.999)},
        {"batch", whole(tr.train.batch, "synthesis.batch", 1, 1000000)},
        {"seed", whole(syn.seed, "synthesis.seed", 0, (1LL << 53))},
        {"n1", real(syn.n1, "synthesis.n1", 0.0, 1.0)},
        {"n2", real(syn.n2, "synthesis.n2", 0.0, 1.0)}}},
      {"io", {{"dataset", text(next.io.dataset, "io.dataset")}, {"output", text(next.io.output, "io.output")}}},
  };
  for (const auto& [key, value] : overrides.items()) {
    if (key == "jobs") {
      whole(next.jobs, "jobs", 1, 1024)(value);
      continue;
    }
    if (key == "format_version" || key == "toolkit_version") continue;
    const auto it = sections.find(key);
    if (it == sections.end()) fail(ErrorCode::kValidation, "unknown config key '" + key + "'");
    apply_section(value, key, it->second);
  }
  an.distance_bins.bins = bins;
  tr.train.seed = syn.seed;
  c = next;
}

nlohmann::json config_to_json(const Config& c) {
  const auto& syn = c.synthesis.synthesis;
  const auto& tr = c.synthesis.training;
  Json j;
  j["format_version"] = kFormatVersion;
  j["toolkit_version"] = kToolkitVersion;
  j["registration"] = {{"iters", c.registration.iterations},
                       {"omega", c.registration.omega},
                       {"tolerance", c.registration.tolerance},
                       {"sigma_field", c.registration.demons.sigma_field},
                       {"content_only", c.registration.content_only}};
  j["analysis"] = {{"rho", c.analysis.rho},
                   {"tolerance", c.analysis.tolerance},
                   {"distance_bin_width", c.analysis.distance_bins.bin_width},
                   {"distance_bins", c.analysis.distance_bins.bins}};
  j["synthesis"] = {{"eps_c", syn.eps_c},         {"w_s", syn.layout.w_s},
                    {"w_m", syn.layout.w_m},       {"mlp_hidden", tr.hidden},
                    {"epochs", tr.train.epochs},   {"learning_rate", tr.train.learning_rate},
                    {"momentum", tr.train.momentum}, {"batch", tr.train.batch},
                    {"seed", syn.seed},            {"n1", syn.n1},
                    {"n2", syn.n2}};
  j["io"] = {{"dataset", c.io.dataset}, {"output", c.io.output}};
  j["jobs"] = c.jobs;
  return j;
}

}  // namespace dsketch

#include "riemannopt/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "riemannopt/error.hpp"

namespace riemannopt::harness {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + value + "'");
    items.push_back(item);
  }
  if (items.empty()) throw ConfigError("empty list");
  return items;
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + text + "' is not a valid number");
  }
  return value;
}

std::size_t parse_count(const std::string& text) {
  return parse_number<std::size_t>(text);
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("'" + text + "' is not a boolean");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model", [](auto& c, const auto& v) { c.model = parse_model_kind(v); }},
      {"model.hidden",
       [](auto& c, const auto& v) {
         c.hidden.clear();
         for (const auto& item : split_list(v)) c.hidden.push_back(parse_count(item));
       }},
      {"model.seed",
       [](auto& c, const auto& v) { c.model_seed = parse_number<std::uint64_t>(v); }},
      {"model.gain",
       [](auto& c, const auto& v) { c.model_gain = parse_number<double>(v); }},
      {"model.bias_scale",
       [](auto& c, const auto& v) { c.model_bias_scale = parse_number<double>(v); }},
      {"model.width",
       [](auto& c, const auto& v) { c.bump_width = parse_number<double>(v); }},
      {"model.weights", [](auto& c, const auto& v) { c.weights_file = v; }},
      {"methods",
       [](auto& c, const auto& v) {
         c.methods.clear();
         for (const auto& item : split_list(v)) c.methods.push_back(parse_method(item));
       }},
      {"sample_counts",
       [](auto& c, const auto& v) {
         c.sample_counts.clear();
         for (const auto& item : split_list(v)) {
           c.sample_counts.push_back(parse_count(item));
         }
       }},
      {"calibration_size",
       [](auto& c, const auto& v) { c.calibration_size = parse_count(v); }},
      {"probes", [](auto& c, const auto& v) { c.probes = parse_count(v); }},
      {"dataset.generator",
       [](auto& c, const auto& v) { c.dataset.generator = parse_generator(v); }},
      {"dataset.count",
       [](auto& c, const auto& v) { c.dataset.count = parse_count(v); }},
      {"dataset.height",
       [](auto& c, const auto& v) { c.dataset.height = parse_count(v); }},
      {"dataset.width",
       [](auto& c, const auto& v) { c.dataset.width = parse_count(v); }},
      {"dataset.noise",
       [](auto& c, const auto& v) { c.dataset.noise = parse_number<double>(v); }},
      {"dataset.seed",
       [](auto& c, const auto& v) {
         c.dataset.seed = parse_number<std::uint64_t>(v);
         c.dataset_seed_pinned = true;
       }},
      {"dataset.dir", [](auto& c, const auto& v) { c.dataset.dir = v; }},
      {"insertion_steps",
       [](auto& c, const auto& v) { c.insertion_steps = parse_count(v); }},
      {"blur.alpha_max",
       [](auto& c, const auto& v) { c.blur_alpha_max = parse_number<double>(v); }},
      {"blur.radius",
       [](auto& c, const auto& v) { c.blur_radius = parse_number<int>(v); }},
      {"blur.velocity_step",
       [](auto& c, const auto& v) { c.blur_velocity_step = parse_number<double>(v); }},
      {"gig.fraction",
       [](auto& c, const auto& v) { c.gig_fraction = parse_number<double>(v); }},
      {"gig.steps", [](auto& c, const auto& v) { c.gig_steps = parse_count(v); }},
      {"min_delta",
       [](auto& c, const auto& v) { c.min_delta = parse_number<double>(v); }},
      {"bound",
       [](auto& c, const auto& v) {
         try {
           c.bound = parse_bound_rule(v);
         } catch (const DomainError& e) {
           throw ConfigError(e.what());
         }
       }},
      {"powell.tol",
       [](auto& c, const auto& v) { c.powell.tol = parse_number<double>(v); }},
      {"powell.max_iter",
       [](auto& c, const auto& v) { c.powell.max_iter = parse_number<int>(v); }},
      {"powell.line_tol",
       [](auto& c, const auto& v) { c.powell.line_tol = parse_number<double>(v); }},
      {"output", [](auto& c, const auto& v) { c.output = v; }},
      {"seed",
       [](auto& c, const auto& v) {
         const bool pinned = c.dataset_seed_pinned;
         const auto dataset_seed = c.dataset.seed;
         apply_seed(c, parse_number<std::uint64_t>(v));
         if (pinned) c.dataset.seed = dataset_seed;
       }},
      {"model.sigmoid_output",
       [](auto& c, const auto& v) { c.model_sigmoid = parse_bool(v); }},
  };
  return table;
}

}  // namespace

Method parse_method(const std::string& text) {
  if (text == "ig") return Method::kIg;
  if (text == "blurig") return Method::kBlurIg;
  if (text == "gig") return Method::kGig;
  throw ConfigError("unknown method '" + text + "' (expected ig, blurig, gig)");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kIg: return "ig";
    case Method::kBlurIg: return "blurig";
    case Method::kGig: return "gig";
  }
  return "?";
}

Generator parse_generator(const std::string& text) {
  if (text == "gaussian-blob") return Generator::kGaussianBlob;
  if (text == "bars") return Generator::kBars;
  if (text == "checker") return Generator::kChecker;
  throw ConfigError("unknown generator '" + text +
                    "' (expected gaussian-blob, bars, checker)");
}

std::string to_string(Generator generator) {
  switch (generator) {
    case Generator::kGaussianBlob: return "gaussian-blob";
    case Generator::kBars: return "bars";
    case Generator::kChecker: return "checker";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (hidden.size() != 2 || hidden[0] == 0 || hidden[1] == 0) {
    throw ConfigError("model.hidden must list two positive layer sizes");
  }
  if (!(model_gain > 0.0)) throw ConfigError("model.gain must be > 0");
  if (!(model_bias_scale >= 0.0)) throw ConfigError("model.bias_scale must be >= 0");
  if (!(bump_width > 0.0)) throw ConfigError("model.width must be > 0");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (sample_counts.empty()) throw ConfigError("sample_counts must not be empty");
  for (std::size_t k : sample_counts) {
    if (k < 1) throw ConfigError("sample counts must be >= 1");
  }
  if (calibration_size < 1) throw ConfigError("calibration_size must be >= 1");
  if (probes < 2) throw ConfigError("probes must be >= 2");
  if (dataset.dir.empty() && dataset.count <= calibration_size) {
    throw ConfigError(fmt::format(
        "dataset.count ({}) must exceed calibration_size ({}) so that "
        "evaluation images remain",
        dataset.count, calibration_size));
  }
  if (!(dataset.noise >= 0.0)) throw ConfigError("dataset.noise must be >= 0");
  if (insertion_steps < 1) throw ConfigError("insertion_steps must be >= 1");
  if (!(blur_alpha_max >= 0.0)) throw ConfigError("blur.alpha_max must be >= 0");
  if (blur_radius < 0) throw ConfigError("blur.radius must be >= 0");
  if (!(blur_velocity_step > 0.0)) throw ConfigError("blur.velocity_step must be > 0");
  if (!(gig_fraction > 0.0 && gig_fraction <= 1.0)) {
    throw ConfigError("gig.fraction must lie in (0, 1]");
  }
  if (gig_steps == 1) throw ConfigError("gig.steps must be 0 or >= 2");
  if (!(min_delta >= 0.0)) throw ConfigError("min_delta must be >= 0");
  if (!(powell.tol > 0.0) || powell.max_iter < 1 || !(powell.line_tol > 0.0)) {
    throw ConfigError("powell options must be positive");
  }
  if (output.empty()) throw ConfigError("output must not be empty");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
    if (!seen.insert(key).second) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key));
    }
    if (value.empty()) {
      throw ConfigError(fmt::format("line {}: empty value for '{}'", line_no, key));
    }
    try {
      it->second(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}: {}", line_no, key, e.what()));
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("line {}: {}: {}", line_no, key, e.what()));
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void apply_seed(ExperimentConfig& config, std::uint64_t seed) {
  config.seed = seed;
  if (!config.dataset_seed_pinned) config.dataset.seed = seed;
}

}  // namespace riemannopt::harness

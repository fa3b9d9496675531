#include "hdseizure/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace hdseizure {
namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Key {
  std::string name;
  Setter set;
  Getter get;
};

double ToDouble(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t ToUnsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> SplitList(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string Num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

#define HDS_DOUBLE(KEY, FIELD) \
  Key { KEY, [](ExperimentConfig& c, const std::string& v) { c.FIELD = ToDouble(KEY, v); }, \
        [](const ExperimentConfig& c) { return Num(c.FIELD); } }
#define HDS_SIZE(KEY, FIELD) \
  Key { KEY, [](ExperimentConfig& c, const std::string& v) { c.FIELD = ToUnsigned(KEY, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.FIELD); } }
#define HDS_PATH(KEY, FIELD) \
  Key { KEY, [](ExperimentConfig& c, const std::string& v) { c.FIELD = v; }, \
        [](const ExperimentConfig& c) { return c.FIELD.string(); } }

const std::vector<Key>& Keys() {
  static const std::vector<Key> keys{
      Key{"experiment.name", [](ExperimentConfig& c, const std::string& v) {
            if (v.empty() || v.find('/') != std::string::npos) throw ConfigError("experiment.name must be a plain name");
            c.name = v;
          },
          [](const ExperimentConfig& c) { return c.name; }},
      HDS_SIZE("experiment.seed", seed),
      HDS_PATH("paths.raw", raw_dir),
      HDS_PATH("paths.dataset", dataset_dir),
      HDS_PATH("paths.results", results_dir),
      HDS_SIZE("synth.subjects", synth.subjects),
      HDS_SIZE("synth.recordings_per_subject", synth.recordings_per_subject),
      HDS_SIZE("synth.seizures_per_recording", synth.seizures_per_recording),
      HDS_DOUBLE("synth.recording_sec", synth.recording_sec),
      HDS_SIZE("synth.channels", synth.channels),
      Key{"features.registry", [](ExperimentConfig& c, const std::string& v) {
            RegistryById(v);
            c.registry = v;
          },
          [](const ExperimentConfig& c) { return c.registry; }},
      Key{"features.channels", [](ExperimentConfig& c, const std::string& v) { c.channels = SplitList(v); },
          [](const ExperimentConfig& c) { return Join(c.channels); }},
      HDS_DOUBLE("features.window_sec", dataset.window_sec),
      HDS_DOUBLE("features.step_sec", dataset.step_sec),
      HDS_DOUBLE("dataset.ratio", dataset.ratio),
      HDS_DOUBLE("dataset.pre_exclusion_sec", dataset.pre_exclusion_sec),
      HDS_DOUBLE("dataset.post_exclusion_sec", dataset.post_exclusion_sec),
      HDS_SIZE("hd.dim", hd.dim),
      HDS_SIZE("hd.num_levels", hd.num_levels),
      Key{"hd.two_stage", [](ExperimentConfig& c, const std::string& v) { c.hd.two_stage = ToBool("hd.two_stage", v); },
          [](const ExperimentConfig& c) { return std::string(c.hd.two_stage ? "true" : "false"); }},
      HDS_DOUBLE("learning.learning_rate", learning.learning_rate),
      HDS_DOUBLE("learning.stop_epsilon", learning.stop.epsilon),
      HDS_SIZE("learning.stop_patience", learning.stop.patience),
      HDS_SIZE("learning.max_passes", learning.stop.max_passes),
      HDS_DOUBLE("learning.reduce_min_members", learning.reduction.min_members),
      HDS_DOUBLE("learning.reduce_min_fraction", learning.reduction.min_fraction),
      Key{"learning.keep_fraction",
          [](ExperimentConfig& c, const std::string& v) {
            const double f = ToDouble("learning.keep_fraction", v);
            if (f == 0.0) {
              c.learning.reduction.keep_fraction.reset();
            } else if (f > 0.0 && f <= 1.0) {
              c.learning.reduction.keep_fraction = f;
            } else {
              throw ConfigError("learning.keep_fraction must be 0 (threshold rule) or in (0, 1]");
            }
          },
          [](const ExperimentConfig& c) { return Num(c.learning.reduction.keep_fraction.value_or(0.0)); }},
      HDS_DOUBLE("postprocess.smooth_sec", learning.post.smooth_sec),
      HDS_DOUBLE("postprocess.merge_gap_sec", learning.post.merge_gap_sec),
      Key{"run.strategies",
          [](ExperimentConfig& c, const std::string& v) {
            std::vector<Strategy> out;
            for (const auto& tag : SplitList(v)) {
              const auto s = ParseStrategy(tag);
              if (!s) throw ConfigError("unknown strategy '" + tag + "'; valid tags: " + ValidStrategyTags());
              out.push_back(*s);
            }
            if (out.empty()) throw ConfigError("run.strategies must list at least one strategy");
            c.strategies = out;
          },
          [](const ExperimentConfig& c) {
            std::vector<std::string> tags;
            for (auto s : c.strategies) tags.emplace_back(StrategyTag(s));
            return Join(tags);
          }},
      HDS_SIZE("run.bench_repeats", bench_repeats),
  };
  return keys;
}

#undef HDS_DOUBLE
#undef HDS_SIZE
#undef HDS_PATH

void Validate(ExperimentConfig& c) {
  if (c.hd.dim == 0) throw ConfigError("hd.dim must be positive");
  if (c.hd.num_levels < 2) throw ConfigError("hd.num_levels must be >= 2");
  if (!(c.dataset.window_sec > 0.0) || !(c.dataset.step_sec > 0.0)) {
    throw ConfigError("features.window_sec and features.step_sec must be positive");
  }
  if (!(c.learning.learning_rate > 0.0)) throw ConfigError("learning.learning_rate must be positive");
  if (c.learning.stop.max_passes < 1) throw ConfigError("learning.max_passes must be >= 1");
  if (c.bench_repeats < 1) throw ConfigError("run.bench_repeats must be >= 1");
  c.hd.seed = c.seed;
  c.dataset.seed = c.seed;
}

}  // namespace

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : Keys()) out.push_back(k.name);
    return out;
  }();
  return names;
}

void ApplySetting(ExperimentConfig& config, const std::string& dotted_key, const std::string& value) {
  for (const auto& k : Keys()) {
    if (k.name == dotted_key) {
      k.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + dotted_key + "'");
}

void ApplyOverride(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not section.key=value");
  ApplySetting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig ParseConfig(const std::string& text, const std::vector<std::string>& overrides) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) ApplySetting(config, section + "." + key, value.data());
  }
  for (const auto& o : overrides) ApplyOverride(config, o);
  Validate(config);
  return config;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), overrides);
}

std::string RenderConfig(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : Keys()) {
    const auto dot = k.name.find('.');
    const std::string sec = k.name.substr(0, dot);
    if (sec != section) {
      out += (out.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += k.name.substr(dot + 1) + " = " + k.get(config) + "\n";
  }
  return out;
}

std::string ConfigJson(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  for (const auto& k : Keys()) j[k.name] = k.get(config);
  return j.dump(2);
}

std::filesystem::path ResolveDataPath(const std::filesystem::path& p) {
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("HDC_SEIZURE_DATA"); root != nullptr && *root != '\0') {
    return std::filesystem::path(root) / p;
  }
  return p;
}

}  // namespace hdseizure

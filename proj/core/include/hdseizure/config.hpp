#pragma once

// Experiment configuration: sectioned key=value text with documented
// defaults, plus "section.key=value" overrides from the command line.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hdseizure/dataio.hpp"
#include "hdseizure/encoder.hpp"
#include "hdseizure/errors.hpp"
#include "hdseizure/learning.hpp"

namespace hdseizure {

// Unknown keys, malformed values or bad overrides. The CLI maps this to a
// usage error (exit 2).
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct SynthCorpusOptions {
  std::size_t subjects = 6;
  std::size_t recordings_per_subject = 3;
  std::size_t seizures_per_recording = 1;
  double recording_sec = 2400.0;
  std::size_t channels = 4;
};

// Default construction leaves hd.seed and dataset.seed at 0; ParseConfig and
// LoadConfig copy `seed` into both, so ParseConfig("") is the documented
// default experiment.
struct ExperimentConfig {
  std::string name = "demo";
  std::uint64_t seed = 1;

  std::filesystem::path raw_dir = "data/raw";
  std::filesystem::path dataset_dir = "data/dataset";
  std::filesystem::path results_dir = "results";

  SynthCorpusOptions synth;
  std::string registry = "default";
  // Channels to read from EDF input; empty means the 18-channel montage.
  std::vector<std::string> channels;
  DatasetOptions dataset;
  ItemMemoryOptions hd;
  LearningOptions learning;
  std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  std::size_t bench_repeats = 3;
};

// Every accepted "section.key" in declaration order.
const std::vector<std::string>& ConfigKeys();

void ApplySetting(ExperimentConfig& config, const std::string& dotted_key, const std::string& value);
// Parses "section.key=value".
void ApplyOverride(ExperimentConfig& config, const std::string& assignment);

ExperimentConfig LoadConfig(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
ExperimentConfig ParseConfig(const std::string& text, const std::vector<std::string>& overrides = {});

// Fully resolved configuration; re-parsing it yields the same config.
std::string RenderConfig(const ExperimentConfig& config);
std::string ConfigJson(const ExperimentConfig& config);

// Resolves a relative path against $HDC_SEIZURE_DATA when that is set.
std::filesystem::path ResolveDataPath(const std::filesystem::path& p);

}  // namespace hdseizure

#pragma once

// Per-window, per-channel scalar features: mean amplitude, Welch spectral
// features and histogram/template/ordinal entropies.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hdseizure {

// Half-open [start_sec, end_sec) seizure annotation.
struct Interval {
  double start_sec = 0.0;
  double end_sec = 0.0;

  [[nodiscard]] bool Contains(double t) const noexcept { return t >= start_sec && t < end_sec; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Recording {
  double fs = 0.0;
  std::vector<std::string> channels;
  std::vector<std::vector<double>> samples;  // one series per channel, microvolts
  std::vector<Interval> annotations;

  [[nodiscard]] std::size_t num_samples() const noexcept {
    return samples.empty() ? 0 : samples.front().size();
  }
  [[nodiscard]] double duration_sec() const noexcept {
    return fs > 0 ? static_cast<double>(num_samples()) / fs : 0.0;
  }
};

// Throws InvalidArgument when channel lengths differ, fs <= 0, or annotations
// are out of bounds / overlapping / empty.
void ValidateRecording(const Recording& rec);

struct FeatureWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  int label = 0;
  std::size_t num_features = 0;
  std::vector<double> values;  // row-major channels x features

  [[nodiscard]] std::size_t num_channels() const noexcept {
    return num_features == 0 ? 0 : values.size() / num_features;
  }
  [[nodiscard]] double at(std::size_t channel, std::size_t feature) const {
    return values[channel * num_features + feature];
  }
};

enum class FeatureKind {
  kMeanAmplitude,
  kTotalPower,
  kRelPowerLow,
  kRelPowerDelta,
  kRelPowerTheta,
  kRelPowerAlpha,
  kRelPowerBeta,
  kRelPowerGamma,
  kPeakFrequency,
  kShannonEntropy,
  kRenyiEntropy,
  kTsallisEntropy,
  kSampleEntropy,
  kPermutationEntropy,
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kMeanAmplitude;
  // Interpretation depends on kind: alpha / q / r_factor in `real`,
  // n_bins / m / order in `a`, delay in `b`.
  double real = 0.0;
  int a = 0;
  int b = 0;
};

struct FeatureRegistry {
  std::string id;
  std::vector<FeatureSpec> entries;

  [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
  [[nodiscard]] std::vector<std::string> names() const;
  // Shortest window (in samples) on which every entry is defined.
  [[nodiscard]] std::size_t MinWindowSamples(double fs) const;
};

// 36 features: mean amplitude, 8 spectral, 27 entropies.
FeatureRegistry DefaultRegistry();
// Mean amplitude + 8 spectral only; used for quick demos.
FeatureRegistry CompactRegistry();
// Looks up "default" or "compact"; throws InvalidArgument otherwise.
FeatureRegistry RegistryById(const std::string& id);

inline constexpr double kSampleEntropyCap = 10.0;
inline constexpr int kDefaultHistogramBins = 100;

double MeanAmplitude(std::span<const double> x);

struct SpectralFeatures {
  double total_power = 0.0;
  // low [0, 0.5), delta [0.5, 4), theta [4, 8), alpha [8, 12), beta [12, 30),
  // gamma [30, 45].
  std::array<double, 6> relative_power{};
  double peak_frequency = 0.0;

  [[nodiscard]] std::array<double, 8> Flatten() const;
};

// Welch PSD: 1 s Hann segments, 50 % overlap. Requires fs >= 90 and at least
// one second of samples.
SpectralFeatures ComputeSpectralFeatures(std::span<const double> x, double fs);
// One-sided PSD at 1/segment_sec resolution; exposed for tests.
std::vector<double> WelchPsd(std::span<const double> x, double fs);

double ShannonEntropy(std::span<const double> x, int n_bins = kDefaultHistogramBins);
double RenyiEntropy(std::span<const double> x, double alpha, int n_bins = kDefaultHistogramBins);
double TsallisEntropy(std::span<const double> x, double q, int n_bins = kDefaultHistogramBins);
// -ln(A/B), Chebyshev distance, tolerance r = r_factor * population std.
double SampleEntropy(std::span<const double> x, int m = 2, double r_factor = 0.2,
                     double cap = kSampleEntropyCap);
// SampleEntropy for several tolerances in one pass over template pairs.
std::vector<double> SampleEntropySweep(std::span<const double> x, int m, std::span<const double> r_factors,
                                       double cap = kSampleEntropyCap);
// Normalized to [0, 1] by ln(order!).
double PermutationEntropy(std::span<const double> x, int order = 3, int delay = 1);

// Features for one window of `rec` starting at sample `first` and spanning
// `count` samples. Rows follow rec.channels, columns follow the registry.
std::vector<double> ComputeWindowFeatures(const Recording& rec, std::size_t first, std::size_t count,
                                          const FeatureRegistry& registry);

struct WindowSpan {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t first_sample = 0;
  std::size_t num_samples = 0;
  int label = 0;
};

// Sliding windows with start times k * step_sec; label 1 iff the window
// midpoint lies inside an annotation.
std::vector<WindowSpan> EnumerateWindows(const Recording& rec, double window_sec, double step_sec);

std::vector<FeatureWindow> ExtractFeatures(const Recording& rec, double window_sec, double step_sec,
                                           const FeatureRegistry& registry, unsigned jobs = 1);

}  // namespace hdseizure

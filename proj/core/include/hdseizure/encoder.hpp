#pragma once

// Maps a FeatureWindow to one hypervector: quantize each value onto the level
// table, bind with the feature item vector, bundle per channel, bind with the
// channel item vector, then bundle across channels.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdseizure/features.hpp"
#include "hdseizure/hypervector.hpp"

namespace hdseizure {

struct Bounds {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct ItemMemoryOptions {
  std::size_t dim = kDefaultDim;
  std::size_t num_levels = kDefaultNumLevels;
  std::uint64_t seed = 0;
  // false selects single-stage bundling over every (channel, feature) term.
  bool two_stage = true;
};

class ItemMemory {
 public:
  ItemMemory() = default;

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t num_levels() const noexcept { return levels_.num_levels(); }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] bool two_stage() const noexcept { return two_stage_; }
  [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  [[nodiscard]] const std::vector<std::string>& channel_names() const noexcept { return channel_names_; }
  [[nodiscard]] const std::vector<Hypervector>& feature_vectors() const noexcept { return feature_vectors_; }
  [[nodiscard]] const std::vector<Hypervector>& channel_vectors() const noexcept { return channel_vectors_; }
  [[nodiscard]] const LevelTable& levels() const noexcept { return levels_; }
  [[nodiscard]] const std::vector<Bounds>& bounds() const noexcept { return bounds_; }
  // Fixed random vector deciding ties at every binarization in the experiment.
  [[nodiscard]] const Hypervector& tie_break() const noexcept { return tie_break_; }

  friend bool operator==(const ItemMemory&, const ItemMemory&) = default;

 private:
  friend ItemMemory FitItemMemory(std::span<const FeatureWindow>, const std::vector<std::string>&,
                                  const std::vector<std::string>&, const ItemMemoryOptions&);
  friend ItemMemory ReadItemMemory(std::istream&);

  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  bool two_stage_ = true;
  std::vector<std::string> feature_names_;
  std::vector<std::string> channel_names_;
  std::vector<Hypervector> feature_vectors_;
  std::vector<Hypervector> channel_vectors_;
  LevelTable levels_;
  std::vector<Bounds> bounds_;
  Hypervector tie_break_;
};

// Item vectors are drawn from `options.seed`; per-feature bounds are the 1st
// and 99th percentiles of the training values across all channels.
ItemMemory FitItemMemory(std::span<const FeatureWindow> train, const std::vector<std::string>& feature_names,
                         const std::vector<std::string>& channel_names, const ItemMemoryOptions& options);

// Clip to bounds, then floor(fraction * num_levels); value == max maps to the
// top level.
std::size_t Quantize(double value, const Bounds& bounds, std::size_t num_levels);

Hypervector EncodeWindow(const FeatureWindow& window, const ItemMemory& memory);
std::vector<Hypervector> EncodeWindows(std::span<const FeatureWindow> windows, const ItemMemory& memory,
                                       unsigned jobs = 1);

// Header: magic, dim, num_levels, feature/channel counts, seed, stage flag;
// then names, bounds and vectors (features, channels, levels, tie-break).
void WriteItemMemory(std::ostream& out, const ItemMemory& memory);
ItemMemory ReadItemMemory(std::istream& in);

}  // namespace hdseizure

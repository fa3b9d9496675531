#pragma once

// Prototype learning over encoded windows: single-pass (2C), multi-pass with
// add or add/subtract updates (2C+, 2C+-), multi-centroid with reduction and
// fine-tuning (MC, MCr, MCc, MCri) and similarity-weighted online learning
// (On+, On+-).

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdseizure/evaluation.hpp"
#include "hdseizure/hypervector.hpp"

namespace hdseizure {

inline constexpr int kNumClasses = 2;

enum class Strategy { k2C, k2CAdd, k2CAddSub, kMC, kMCr, kMCc, kMCri, kOnAdd, kOnAddSub };

inline constexpr std::array<Strategy, 9> kAllStrategies{
    Strategy::k2C, Strategy::k2CAdd, Strategy::k2CAddSub, Strategy::kMC,       Strategy::kMCr,
    Strategy::kMCc, Strategy::kMCri, Strategy::kOnAdd,    Strategy::kOnAddSub};

// "2C", "2C+", "2C+-", "MC", "MCr", "MCc", "MCri", "On+", "On+-".
std::string_view StrategyTag(Strategy s) noexcept;
std::optional<Strategy> ParseStrategy(std::string_view tag) noexcept;
std::string ValidStrategyTags();

struct Centroid {
  Accumulator acc;
  Hypervector proto;  // always Binarize(acc, model tie-break)
  // Total positive weight that contributed (subtractions do not reduce it).
  FixedWeight n_members;
  int label = 0;
};

struct WeightSummary {
  std::size_t count = 0;
  double mean = 0.0;
  std::array<std::size_t, 10> histogram{};  // equal bins over [0, 1]
};

struct TrainStats {
  std::size_t passes = 1;
  // One entry per refinement pass (pass 2 onwards): mispredicted fraction.
  std::vector<double> readded_fraction_per_pass;
  // Training F1DEmean after each pass, starting with pass 1.
  std::vector<double> train_score_per_pass;
  std::size_t best_pass = 1;
  std::array<std::size_t, kNumClasses> centroids_before{};
  std::array<std::size_t, kNumClasses> centroids_after{};
  std::array<WeightSummary, kNumClasses> weights{};
};

struct Model {
  Strategy strategy = Strategy::k2C;
  std::vector<Centroid> centroids;
  Hypervector tie_break;
  TrainStats stats;

  [[nodiscard]] std::size_t dim() const noexcept { return tie_break.dim(); }
  [[nodiscard]] std::array<std::size_t, kNumClasses> CentroidCounts() const;
};

struct Prediction {
  int label = 0;
  double similarity = 0.0;
  std::size_t centroid = 0;
};

// Most similar centroid; ties go to the lower class label, then the lower
// centroid index.
Prediction Predict(const Model& model, const Hypervector& x);

// Encoded training windows in chronological order, split into files so the
// training score can be post-processed per file.
struct TrainingSet {
  std::span<const Hypervector> samples;
  std::span<const int> labels;
  // Start offset of every file; file k spans [file_starts[k], file_starts[k+1]).
  std::vector<std::size_t> file_starts{0};
  double step_sec = 0.5;
};

struct StopRule {
  double epsilon = 0.003;
  std::size_t patience = 3;
  std::size_t max_passes = 30;

  // history holds the per-pass training scores so far (non-empty).
  [[nodiscard]] bool ShouldStop(std::span<const double> history) const;
};

enum class ReductionMethod { kRemove, kCluster };

struct ReductionOptions {
  // Keep centroids with n_members >= max(min_members, min_fraction * class count).
  double min_members = 2.0;
  double min_fraction = 0.02;
  // When set, keep the top ceil(keep_fraction * count) centroids per class.
  std::optional<double> keep_fraction;
};

struct LearningOptions {
  double learning_rate = 1.0;
  StopRule stop;
  PostProcessing post;
  ReductionOptions reduction;
};

enum class UpdateRule { kAddOnly, kAddSubtract };

Model TrainSinglePass(const TrainingSet& data, const Hypervector& tie_break);
Model TrainMultiPass(const TrainingSet& data, UpdateRule rule, const LearningOptions& options,
                     const Hypervector& tie_break);
Model TrainMultiCentroid(const TrainingSet& data, const Hypervector& tie_break);
Model ReduceCentroids(Model model, ReductionMethod method, const ReductionOptions& options);
// Multi-pass refinement over a frozen centroid set.
Model FineTuneMultiPass(Model model, const TrainingSet& data, const LearningOptions& options);
Model TrainOnline(const TrainingSet& data, UpdateRule rule, const Hypervector& tie_break);

Model Train(Strategy strategy, const TrainingSet& data, const LearningOptions& options,
            const Hypervector& tie_break);

// Mean over files of F1DEmean of post-processed predictions.
double TrainingScore(const Model& model, const TrainingSet& data, const PostProcessing& post);

// Header: magic, version, 8-byte strategy tag, dim, centroid count, per-centroid
// label and n_members, tie-break vector; then accumulator + prototype per
// centroid.
void WriteModel(std::ostream& out, const Model& model);
Model ReadModel(std::istream& in);
std::size_t SerializedSize(const Model& model);

std::string TrainStatsJson(const TrainStats& stats);

}  // namespace hdseizure

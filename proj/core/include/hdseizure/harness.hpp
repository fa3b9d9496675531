#pragma once

// Leave-one-seizure-out cross-validation, paired strategy comparison,
// training cost benchmarks and the result files they produce.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdseizure/config.hpp"
#include "hdseizure/dataio.hpp"
#include "hdseizure/encoder.hpp"
#include "hdseizure/evaluation.hpp"
#include "hdseizure/learning.hpp"

namespace hdseizure {

struct SubjectRecordings {
  std::string subject_id;
  std::vector<std::string> files;  // file name per recording
  std::vector<Recording> recordings;
};

// Synthetic corpus from config.synth: subjects "S01", "S02", ... with
// recordings "rec<j>.csv" drawn from the multimodal demo spec.
std::vector<SubjectRecordings> GenerateSynthCorpus(const ExperimentConfig& config);

// One fold: train on `train_files`, test on `test_file`. A subject with a
// single file gets one split of that file: even windows train, odd windows
// test.
struct FoldPlan {
  std::size_t index = 0;
  std::vector<std::size_t> train_files;
  std::size_t test_file = 0;
  bool single_split = false;
};

std::vector<FoldPlan> PlanFolds(const SubjectDataset& dataset);

struct EncodedFold {
  ItemMemory memory;
  std::vector<Hypervector> train;
  std::vector<int> train_labels;
  std::vector<std::size_t> train_file_starts;
  std::vector<Hypervector> test;
  std::vector<int> test_labels;

  [[nodiscard]] TrainingSet training_set(double step_sec) const;
};

// Item memory is fit on training windows only.
EncodedFold EncodeFold(const SubjectDataset& dataset, const FoldPlan& plan, const ExperimentConfig& config,
                       unsigned jobs = 1);

struct FoldResult {
  std::string subject;
  std::size_t fold = 0;
  std::string strategy;
  bool ok = true;
  std::string error;
  MetricsReport metrics;
  TrainStats stats;
  std::array<std::size_t, kNumClasses> centroids{};
  std::size_t model_bytes = 0;
  std::vector<std::uint8_t> truth;
  std::vector<std::uint8_t> raw_pred;
};

struct SubjectSummary {
  std::string subject;
  std::string strategy;
  std::size_t folds = 0;
  std::size_t failed_folds = 0;
  bool single_split = false;
  // Arithmetic mean over folds; meaningless when ok() is false.
  MetricsReport mean;

  [[nodiscard]] bool ok() const noexcept { return failed_folds == 0 && folds > 0; }
  [[nodiscard]] std::string flag() const;
};

struct LosoResult {
  std::string subject;
  bool single_split = false;
  std::vector<FoldResult> folds;       // fold-major, strategies in request order
  std::vector<SubjectSummary> summary;  // one per strategy
};

// Scores raw window predictions of one fold: post-process, then score.
FoldResult ScoreFold(std::string subject, std::size_t fold, std::string strategy, std::vector<std::uint8_t> truth,
                     std::vector<std::uint8_t> raw_pred, double step_sec, const PostProcessing& post);

SubjectSummary Summarize(std::span<const FoldResult> folds, const std::string& subject, const std::string& strategy);

// Encodes each fold once and trains every requested strategy on it. Folds
// run on up to `jobs` lanes. Strategy failures are recorded, not thrown.
LosoResult LosoCv(const SubjectDataset& dataset, std::span<const Strategy> strategies, const ExperimentConfig& config,
                  unsigned jobs = 1);

struct ComparisonRow {
  std::string strategy_a;
  std::string strategy_b;
  std::size_t subjects = 0;  // pairs used
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_diff = 0.0;  // mean of a - b over used pairs
  double p_value = 1.0;
  double w_plus = 0.0;
  bool exact = false;
  bool insufficient = false;  // p_value is the 1.0 sentinel
  std::vector<std::string> excluded;
};

// Paired Wilcoxon over per-subject F1DEmean. Both sides must cover the same
// subjects (InvalidArgument otherwise); subjects where either side failed are
// excluded and listed.
ComparisonRow CompareStrategies(std::span<const SubjectSummary> a, std::span<const SubjectSummary> b);

struct BenchRow {
  std::string strategy;
  std::size_t folds = 0;
  double train_seconds = 0.0;  // mean over folds of the fastest repeat
  double train_relative = 0.0;
  double model_bytes = 0.0;  // mean serialized size
  double bytes_relative = 0.0;
};

// Single lane. 2C is always measured and is the reference for relative
// values.
std::vector<BenchRow> Bench(std::span<const SubjectDataset> datasets, std::span<const Strategy> strategies,
                            const ExperimentConfig& config);

// Result files.
void WriteFoldCsv(const std::filesystem::path& path, std::span<const FoldResult> folds);
void WriteSubjectCsv(const std::filesystem::path& path, std::span<const SubjectSummary> rows);
std::vector<SubjectSummary> ReadSubjectCsv(const std::filesystem::path& path);
void WriteComparisonCsv(const std::filesystem::path& path, std::span<const ComparisonRow> rows);
void WriteBenchCsv(const std::filesystem::path& path, std::span<const BenchRow> rows);
// subject,fold,index,truth,pred with raw (not post-processed) predictions.
void WritePredictionsCsv(const std::filesystem::path& path, std::span<const FoldResult> folds);

struct PredictionFold {
  std::string subject;
  std::size_t fold = 0;
  std::vector<std::uint8_t> truth;
  std::vector<std::uint8_t> pred;
};
std::vector<PredictionFold> ReadPredictionsCsv(const std::filesystem::path& path);

// Scores externally produced predictions exactly like internal ones.
std::vector<FoldResult> EvaluatePredictions(std::span<const PredictionFold> folds, const std::string& name,
                                            double step_sec, const PostProcessing& post);

// Run manifest with the resolved config, seeds, code version and machine
// info. Extra entries are added as strings.
void WriteManifest(const std::filesystem::path& dir, const std::string& stage, const ExperimentConfig& config,
                   const std::vector<std::pair<std::string, std::string>>& extra = {});

// Reads every <exp_dir>/<strategy>/per_subject.csv and writes report.csv
// (all per-subject rows) and report.json (per-subject means and pairwise
// Wilcoxon results). Returns the strategies found.
std::vector<std::string> WriteReport(const std::filesystem::path& exp_dir);

std::string_view CodeVersion() noexcept;

}  // namespace hdseizure

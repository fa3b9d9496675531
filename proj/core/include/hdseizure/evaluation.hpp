#pragma once

// Label post-processing, episode/duration detection metrics and the
// Wilcoxon signed-rank test.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hdseizure {

struct LabelSequence {
  std::vector<std::uint8_t> labels;  // 0 / 1 at window rate
  double step_sec = 0.5;
};

struct PostProcessing {
  double smooth_sec = 5.0;
  double merge_gap_sec = 30.0;
};

// Centered majority vote over round(sw_len_sec / step_sec) labels, truncated
// at the edges. Ties resolve to 1.
LabelSequence SmoothLabels(const LabelSequence& seq, double sw_len_sec = 5.0);
// Fills runs of 0s strictly shorter than gap_sec that sit between two runs
// of 1s.
LabelSequence MergeEvents(const LabelSequence& seq, double gap_sec = 30.0);
// Smooth, then merge.
LabelSequence PostProcess(const LabelSequence& seq, const PostProcessing& params);

struct Block {
  std::size_t begin = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  friend bool operator==(const Block&, const Block&) = default;
};

// Maximal runs of 1s.
std::vector<Block> FindBlocks(std::span<const std::uint8_t> labels);

struct DetectionScores {
  double tpr = 0.0;
  double ppv = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// TPR/PPV/F1 from raw counts with the empty-denominator conventions:
// no truth and no predictions scores 1; otherwise an empty denominator is 0.
DetectionScores ScoresFromCounts(std::size_t tp, std::size_t fp, std::size_t fn);

// A truth block overlapping any predicted block is one TP; a predicted block
// overlapping no truth block is one FP. Fragments over a seizure are free.
DetectionScores EpisodeMetrics(const LabelSequence& pred, const LabelSequence& truth);
DetectionScores DurationMetrics(const LabelSequence& pred, const LabelSequence& truth);

struct MetricsReport {
  DetectionScores episode;
  DetectionScores duration;
  double f1_de_mean = 0.0;
};

double F1DEMean(double f1_episode, double f1_duration);
MetricsReport ScoreSequences(const LabelSequence& pred, const LabelSequence& truth);

struct WilcoxonResult {
  double p_value = 1.0;
  double w_plus = 0.0;   // sum of ranks of positive differences
  std::size_t n = 0;     // non-zero differences used
  bool exact = false;
};

inline constexpr std::size_t kWilcoxonMinPairs = 5;
inline constexpr std::size_t kWilcoxonExactMax = 12;

// Two-sided paired test on a - b. Zero differences are dropped and tied
// absolute differences share their average rank. Exact null distribution for
// n <= 12, tie-corrected normal approximation above. Throws
// InsufficientData when fewer than 5 non-zero differences remain.
WilcoxonResult WilcoxonSignedRank(std::span<const double> a, std::span<const double> b);

}  // namespace hdseizure

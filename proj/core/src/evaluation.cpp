#include "hdseizure/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hdseizure/errors.hpp"

namespace hdseizure {
namespace {

void CheckComparable(const LabelSequence& a, const LabelSequence& b) {
  if (a.labels.size() != b.labels.size()) throw DimensionMismatch(b.labels.size(), a.labels.size());
  if (std::abs(a.step_sec - b.step_sec) > 1e-9) throw InvalidArgument("label sequences differ in step");
}

}  // namespace

LabelSequence SmoothLabels(const LabelSequence& seq, double sw_len_sec) {
  if (seq.labels.empty()) throw InvalidArgument("cannot smooth an empty label sequence");
  if (!(seq.step_sec > 0.0)) throw InvalidArgument("label step must be positive");
  if (sw_len_sec + 1e-9 < seq.step_sec) throw InvalidArgument("smoothing window shorter than one step");
  const auto width = static_cast<std::size_t>(std::max(1L, std::lround(sw_len_sec / seq.step_sec)));
  const std::size_t left = (width - 1) / 2;
  const std::size_t right = width / 2;
  const std::size_t n = seq.labels.size();

  // prefix[i] = number of 1s in labels[0, i)
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (seq.labels[i] != 0);

  LabelSequence out{std::vector<std::uint8_t>(n, 0), seq.step_sec};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n, i + right + 1);
    const std::size_t ones = prefix[hi] - prefix[lo];
    out.labels[i] = 2 * ones >= hi - lo ? 1 : 0;
  }
  return out;
}

LabelSequence MergeEvents(const LabelSequence& seq, double gap_sec) {
  LabelSequence out = seq;
  const auto blocks = FindBlocks(seq.labels);
  for (std::size_t k = 1; k < blocks.size(); ++k) {
    const std::size_t gap = blocks[k].begin - blocks[k - 1].end;
    if (static_cast<double>(gap) * seq.step_sec < gap_sec - 1e-9) {
      std::fill(out.labels.begin() + static_cast<std::ptrdiff_t>(blocks[k - 1].end),
                out.labels.begin() + static_cast<std::ptrdiff_t>(blocks[k].begin), 1);
    }
  }
  return out;
}

LabelSequence PostProcess(const LabelSequence& seq, const PostProcessing& params) {
  return MergeEvents(SmoothLabels(seq, params.smooth_sec), params.merge_gap_sec);
}

std::vector<Block> FindBlocks(std::span<const std::uint8_t> labels) {
  std::vector<Block> blocks;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == 0) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < labels.size() && labels[i] != 0) ++i;
    blocks.push_back({begin, i});
  }
  return blocks;
}

DetectionScores ScoresFromCounts(std::size_t tp, std::size_t fp, std::size_t fn) {
  DetectionScores s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  const bool no_truth = tp + fn == 0;
  const bool no_pred = tp + fp == 0;
  s.tpr = no_truth ? (no_pred ? 1.0 : 0.0) : static_cast<double>(tp) / static_cast<double>(tp + fn);
  s.ppv = no_pred ? (no_truth ? 1.0 : 0.0) : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.f1 = s.tpr + s.ppv > 0.0 ? 2.0 * s.tpr * s.ppv / (s.tpr + s.ppv) : 0.0;
  return s;
}

DetectionScores EpisodeMetrics(const LabelSequence& pred, const LabelSequence& truth) {
  CheckComparable(pred, truth);
  const auto p = FindBlocks(pred.labels);
  const auto t = FindBlocks(truth.labels);
  auto overlaps = [](const Block& a, const Block& b) { return a.begin < b.end && b.begin < a.end; };

  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  // Both block lists are sorted and disjoint, so a sweep finds overlaps.
  std::size_t j = 0;
  for (const auto& tb : t) {
    while (j < p.size() && p[j].end <= tb.begin) ++j;
    if (j < p.size() && overlaps(p[j], tb)) {
      ++tp;
    } else {
      ++fn;
    }
  }
  j = 0;
  for (const auto& pb : p) {
    while (j < t.size() && t[j].end <= pb.begin) ++j;
    if (!(j < t.size() && overlaps(t[j], pb))) ++fp;
  }
  return ScoresFromCounts(tp, fp, fn);
}

DetectionScores DurationMetrics(const LabelSequence& pred, const LabelSequence& truth) {
  CheckComparable(pred, truth);
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    const bool p = pred.labels[i] != 0;
    const bool t = truth.labels[i] != 0;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  return ScoresFromCounts(tp, fp, fn);
}

double F1DEMean(double f1_episode, double f1_duration) { return 0.5 * (f1_episode + f1_duration); }

MetricsReport ScoreSequences(const LabelSequence& pred, const LabelSequence& truth) {
  MetricsReport r;
  r.episode = EpisodeMetrics(pred, truth);
  r.duration = DurationMetrics(pred, truth);
  r.f1_de_mean = F1DEMean(r.episode.f1, r.duration.f1);
  return r;
}

WilcoxonResult WilcoxonSignedRank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const std::size_t n = diffs.size();
  if (n < kWilcoxonMinPairs) {
    throw InsufficientData("Wilcoxon signed-rank needs at least " + std::to_string(kWilcoxonMinPairs) +
                           " non-zero differences, got " + std::to_string(n));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return std::abs(diffs[i]) < std::abs(diffs[j]); });
  // Ranks are stored doubled so averaged ties stay integral.
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    const auto shared = static_cast<std::int64_t>(i + 1 + j + 1);  // 2 * average rank
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = shared;
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  WilcoxonResult res;
  res.n = n;
  std::int64_t w2 = 0;
  std::int64_t total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (diffs[i] > 0) w2 += rank2[i];
  }
  res.w_plus = static_cast<double>(w2) / 2.0;

  if (n <= kWilcoxonExactMax) {
    // Null distribution of 2*W+ by dynamic programming over sign choices.
    std::vector<double> dist(static_cast<std::size_t>(total2) + 1, 0.0);
    dist[0] = 1.0;
    std::int64_t reach = 0;
    for (auto r : rank2) {
      for (std::int64_t s = reach; s >= 0; --s) {
        dist[static_cast<std::size_t>(s + r)] += dist[static_cast<std::size_t>(s)];
      }
      reach += r;
    }
    // |2W - total| >= |2w - total| in doubled units, all integers.
    const std::int64_t observed = std::abs(2 * w2 - total2);
    double extreme = 0.0;
    for (std::int64_t s = 0; s <= total2; ++s) {
      if (std::abs(2 * s - total2) >= observed) extreme += dist[static_cast<std::size_t>(s)];
    }
    res.p_value = std::min(1.0, extreme / std::ldexp(1.0, static_cast<int>(n)));
    res.exact = true;
    return res;
  }

  const auto nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = (res.w_plus - mean) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  return res;
}

}  // namespace hdseizure

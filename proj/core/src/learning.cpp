#include "hdseizure/learning.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "hdseizure/binary_io.hpp"
#include "hdseizure/errors.hpp"

namespace hdseizure {
namespace {

constexpr char kMagic[4] = {'H', 'D', 'M', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kTagBytes = 8;

constexpr std::array<std::string_view, 9> kTags{"2C", "2C+", "2C+-", "MC", "MCr", "MCc", "MCri", "On+", "On+-"};

void ValidateTrainingSet(const TrainingSet& data) {
  if (data.samples.size() != data.labels.size()) throw DimensionMismatch(data.samples.size(), data.labels.size());
  std::array<std::size_t, kNumClasses> per_class{};
  for (int y : data.labels) {
    if (y < 0 || y >= kNumClasses) throw InvalidArgument("label " + std::to_string(y) + " outside {0, 1}");
    ++per_class[static_cast<std::size_t>(y)];
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (per_class[static_cast<std::size_t>(c)] == 0) {
      throw InvalidArgument("training data has no samples of class " + std::to_string(c));
    }
  }
  const std::size_t dim = data.samples.front().dim();
  for (const auto& x : data.samples) {
    if (x.dim() != dim) throw DimensionMismatch(dim, x.dim());
  }
  if (data.file_starts.empty() || data.file_starts.front() != 0 ||
      !std::is_sorted(data.file_starts.begin(), data.file_starts.end()) ||
      data.file_starts.back() > data.samples.size()) {
    throw InvalidArgument("training file offsets are inconsistent");
  }
}

void Refresh(Centroid& c, const Hypervector& tie_break) { c.proto = Binarize(c.acc, tie_break); }

Centroid Seed(const Hypervector& x, int label, FixedWeight weight, const Hypervector& tie_break) {
  Centroid c{Accumulator(x.dim()), Hypervector(), FixedWeight(0), label};
  c.acc.Add(x, weight);
  c.n_members = weight;
  Refresh(c, tie_break);
  return c;
}

void AddTo(Centroid& c, const Hypervector& x, FixedWeight weight, const Hypervector& tie_break,
           bool refresh = true) {
  c.acc.Add(x, weight, +1);
  c.n_members = FixedWeight(c.n_members.raw() + weight.raw());
  if (refresh) Refresh(c, tie_break);
}

void SubtractFrom(Centroid& c, const Hypervector& x, FixedWeight weight, const Hypervector& tie_break,
                  bool refresh = true) {
  c.acc.Add(x, weight, -1);
  if (refresh) Refresh(c, tie_break);
}

// Per-sample inference result plus the best centroid of each class, so a
// refinement pass knows where to add a mispredicted sample.
struct Scored {
  Prediction best;
  std::array<std::size_t, kNumClasses> best_in_class{};
  std::array<double, kNumClasses> class_best{-1.0, -1.0};
};

Scored ScoreSample(const Model& model, const Hypervector& x) {
  Scored s;
  double best = -1.0;
  for (std::size_t i = 0; i < model.centroids.size(); ++i) {
    const auto& c = model.centroids[i];
    const double sim = Similarity(c.proto, x);
    const auto cls = static_cast<std::size_t>(c.label);
    if (sim > s.class_best[cls]) {
      s.class_best[cls] = sim;
      s.best_in_class[cls] = i;
    }
    if (sim > best || (sim == best && c.label < s.best.label)) {
      best = sim;
      s.best = Prediction{c.label, sim, i};
    }
  }
  return s;
}

double ScoreFromPredictions(const TrainingSet& data, std::span<const Scored> scored, const PostProcessing& post) {
  double total = 0.0;
  const std::size_t files = data.file_starts.size();
  std::size_t counted = 0;
  for (std::size_t f = 0; f < files; ++f) {
    const std::size_t begin = data.file_starts[f];
    const std::size_t end = f + 1 < files ? data.file_starts[f + 1] : data.samples.size();
    if (begin == end) continue;
    LabelSequence pred{{}, data.step_sec};
    LabelSequence truth{{}, data.step_sec};
    for (std::size_t i = begin; i < end; ++i) {
      pred.labels.push_back(static_cast<std::uint8_t>(scored[i].best.label));
      truth.labels.push_back(static_cast<std::uint8_t>(data.labels[i]));
    }
    total += ScoreSequences(PostProcess(pred, post), truth).f1_de_mean;
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

std::vector<Scored> ScoreAll(const Model& model, const TrainingSet& data) {
  std::vector<Scored> out;
  out.reserve(data.samples.size());
  for (const auto& x : data.samples) out.push_back(ScoreSample(model, x));
  return out;
}

// Shared multi-pass loop. Each pass predicts with the prototypes frozen at
// the end of the previous pass, re-adds every mispredicted sample to its
// closest correct-class centroid (optionally subtracting it from the
// predicted one), then re-binarizes. Returns the best-scoring pass.
Model Refine(Model model, const TrainingSet& data, UpdateRule rule, const LearningOptions& options) {
  if (!(options.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  const FixedWeight lr = FixedWeight::FromDouble(options.learning_rate);
  const std::size_t n = data.samples.size();

  std::vector<Scored> scored = ScoreAll(model, data);
  std::vector<double> history{ScoreFromPredictions(data, scored, options.post)};
  std::vector<double> readded;
  Model best = model;
  std::size_t best_pass = 1;

  while (!options.stop.ShouldStop(history)) {
    std::vector<bool> touched(model.centroids.size(), false);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = data.labels[i];
      const Prediction& p = scored[i].best;
      if (p.label == y) continue;
      ++wrong;
      const std::size_t target = scored[i].best_in_class[static_cast<std::size_t>(y)];
      AddTo(model.centroids[target], data.samples[i], lr, model.tie_break, false);
      touched[target] = true;
      if (rule == UpdateRule::kAddSubtract) {
        SubtractFrom(model.centroids[p.centroid], data.samples[i], lr, model.tie_break, false);
        touched[p.centroid] = true;
      }
    }
    readded.push_back(static_cast<double>(wrong) / static_cast<double>(n));
    if (wrong == 0) {
      history.push_back(history.back());
      break;
    }
    for (std::size_t c = 0; c < model.centroids.size(); ++c) {
      if (touched[c]) Refresh(model.centroids[c], model.tie_break);
    }
    scored = ScoreAll(model, data);
    history.push_back(ScoreFromPredictions(data, scored, options.post));
    if (history.back() > history[best_pass - 1]) {
      best = model;
      best_pass = history.size();
    }
  }

  best.stats = model.stats;
  best.stats.passes = history.size();
  best.stats.best_pass = best_pass;
  best.stats.train_score_per_pass = std::move(history);
  best.stats.readded_fraction_per_pass = std::move(readded);
  best.stats.centroids_after = best.CentroidCounts();
  return best;
}

WeightSummary Summarize(const std::vector<double>& weights) {
  WeightSummary s;
  s.count = weights.size();
  if (weights.empty()) return s;
  s.mean = std::accumulate(weights.begin(), weights.end(), 0.0) / static_cast<double>(weights.size());
  for (double w : weights) {
    const auto bin = std::min<std::size_t>(static_cast<std::size_t>(w * 10.0), 9);
    ++s.histogram[bin];
  }
  return s;
}

}  // namespace

std::string_view StrategyTag(Strategy s) noexcept { return kTags[static_cast<std::size_t>(s)]; }

std::optional<Strategy> ParseStrategy(std::string_view tag) noexcept {
  for (std::size_t i = 0; i < kTags.size(); ++i) {
    if (kTags[i] == tag) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

std::string ValidStrategyTags() {
  std::string out;
  for (auto t : kTags) {
    if (!out.empty()) out += ", ";
    out += t;
  }
  return out;
}

std::array<std::size_t, kNumClasses> Model::CentroidCounts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& c : centroids) ++counts[static_cast<std::size_t>(c.label)];
  return counts;
}

Prediction Predict(const Model& model, const Hypervector& x) {
  if (model.centroids.empty()) throw InvalidArgument("cannot predict with an empty model");
  if (x.dim() != model.dim()) throw DimensionMismatch(model.dim(), x.dim());
  return ScoreSample(model, x).best;
}

bool StopRule::ShouldStop(std::span<const double> history) const {
  if (history.empty()) throw InvalidArgument("stop rule needs at least one pass");
  if (history.size() >= max_passes) return true;
  // Last pass that beat the running best by more than epsilon.
  std::size_t best_at = 0;
  double best = history[0];
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i] > best + epsilon) {
      best = history[i];
      best_at = i;
    }
  }
  return history.size() - 1 - best_at >= patience;
}

Model TrainSinglePass(const TrainingSet& data, const Hypervector& tie_break) {
  ValidateTrainingSet(data);
  const std::size_t dim = data.samples.front().dim();
  if (tie_break.dim() != dim) throw DimensionMismatch(dim, tie_break.dim());
  Model model;
  model.strategy = Strategy::k2C;
  model.tie_break = tie_break;
  for (int c = 0; c < kNumClasses; ++c) {
    model.centroids.push_back(Centroid{Accumulator(dim), Hypervector(), FixedWeight(0), c});
  }
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    AddTo(model.centroids[static_cast<std::size_t>(data.labels[i])], data.samples[i], FixedWeight::One(), tie_break,
          false);
  }
  for (auto& c : model.centroids) Refresh(c, tie_break);
  model.stats.centroids_before = model.stats.centroids_after = model.CentroidCounts();
  return model;
}

Model TrainMultiPass(const TrainingSet& data, UpdateRule rule, const LearningOptions& options,
                     const Hypervector& tie_break) {
  Model model = Refine(TrainSinglePass(data, tie_break), data, rule, options);
  model.strategy = rule == UpdateRule::kAddOnly ? Strategy::k2CAdd : Strategy::k2CAddSub;
  return model;
}

Model TrainMultiCentroid(const TrainingSet& data, const Hypervector& tie_break) {
  ValidateTrainingSet(data);
  const std::size_t dim = data.samples.front().dim();
  if (tie_break.dim() != dim) throw DimensionMismatch(dim, tie_break.dim());
  Model model;
  model.strategy = Strategy::kMC;
  model.tie_break = tie_break;
  std::array<bool, kNumClasses> seeded{};
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const int y = data.labels[i];
    const Hypervector& x = data.samples[i];
    if (!seeded[static_cast<std::size_t>(y)]) {
      model.centroids.push_back(Seed(x, y, FixedWeight::One(), tie_break));
      seeded[static_cast<std::size_t>(y)] = true;
      continue;
    }
    const Prediction p = ScoreSample(model, x).best;
    if (p.label == y) {
      AddTo(model.centroids[p.centroid], x, FixedWeight::One(), tie_break);
    } else {
      model.centroids.push_back(Seed(x, y, FixedWeight::One(), tie_break));
    }
  }
  model.stats.centroids_before = model.stats.centroids_after = model.CentroidCounts();
  return model;
}

Model ReduceCentroids(Model model, ReductionMethod method, const ReductionOptions& options) {
  if (options.keep_fraction && !(*options.keep_fraction > 0.0 && *options.keep_fraction <= 1.0)) {
    throw InvalidArgument("keep_fraction must lie in (0, 1]");
  }
  const auto before = model.CentroidCounts();
  const double scale = kFixedScale;
  std::vector<Centroid> kept;
  for (int cls = 0; cls < kNumClasses; ++cls) {
    std::vector<std::size_t> members;
    double class_total = 0.0;
    for (std::size_t i = 0; i < model.centroids.size(); ++i) {
      if (model.centroids[i].label == cls) {
        members.push_back(i);
        class_total += model.centroids[i].n_members.ToDouble();
      }
    }
    if (members.empty()) continue;
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return model.centroids[a].n_members > model.centroids[b].n_members;
    });
    std::size_t keep = 0;
    if (options.keep_fraction) {
      keep = static_cast<std::size_t>(std::ceil(*options.keep_fraction * static_cast<double>(members.size())));
    } else {
      const double threshold = std::max(options.min_members, options.min_fraction * class_total) * scale;
      while (keep < members.size() &&
             static_cast<double>(model.centroids[members[keep]].n_members.raw()) >= threshold) {
        ++keep;
      }
    }
    keep = std::clamp<std::size_t>(keep, 1, members.size());

    std::vector<Centroid> survivors;
    for (std::size_t k = 0; k < keep; ++k) survivors.push_back(std::move(model.centroids[members[k]]));
    if (method == ReductionMethod::kCluster) {
      // Dropped centroids merge, largest first, into the most similar survivor.
      for (std::size_t k = keep; k < members.size(); ++k) {
        const Centroid& dropped = model.centroids[members[k]];
        std::size_t target = 0;
        double best = -1.0;
        for (std::size_t s = 0; s < survivors.size(); ++s) {
          const double sim = Similarity(survivors[s].proto, dropped.proto);
          if (sim > best) {
            best = sim;
            target = s;
          }
        }
        survivors[target].acc.Merge(dropped.acc);
        survivors[target].n_members = FixedWeight(survivors[target].n_members.raw() + dropped.n_members.raw());
      }
      for (auto& s : survivors) Refresh(s, model.tie_break);
    }
    for (auto& s : survivors) kept.push_back(std::move(s));
  }
  model.centroids = std::move(kept);
  model.strategy = method == ReductionMethod::kRemove ? Strategy::kMCr : Strategy::kMCc;
  model.stats.centroids_before = before;
  model.stats.centroids_after = model.CentroidCounts();
  return model;
}

Model FineTuneMultiPass(Model model, const TrainingSet& data, const LearningOptions& options) {
  ValidateTrainingSet(data);
  const auto counts = model.CentroidCounts();
  for (auto c : counts) {
    if (c == 0) throw InvalidArgument("fine-tuning needs at least one centroid per class");
  }
  const auto before = model.stats.centroids_before;
  Model tuned = Refine(std::move(model), data, UpdateRule::kAddSubtract, options);
  tuned.strategy = Strategy::kMCri;
  tuned.stats.centroids_before = before;
  return tuned;
}

Model TrainOnline(const TrainingSet& data, UpdateRule rule, const Hypervector& tie_break) {
  ValidateTrainingSet(data);
  const std::size_t dim = data.samples.front().dim();
  if (tie_break.dim() != dim) throw DimensionMismatch(dim, tie_break.dim());
  Model model;
  model.strategy = rule == UpdateRule::kAddOnly ? Strategy::kOnAdd : Strategy::kOnAddSub;
  model.tie_break = tie_break;
  std::array<std::optional<std::size_t>, kNumClasses> slot{};
  std::array<std::vector<double>, kNumClasses> weights;

  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const int y = data.labels[i];
    const auto cls = static_cast<std::size_t>(y);
    const Hypervector& x = data.samples[i];
    if (!slot[cls]) {
      slot[cls] = model.centroids.size();
      model.centroids.push_back(Seed(x, y, FixedWeight::One(), tie_break));
      continue;
    }
    Centroid& own = model.centroids[*slot[cls]];
    // Add-only never needs the prediction; with one centroid per class the
    // scoring pass already holds the similarity to the own prototype.
    std::optional<Prediction> wrong;
    double sim = 0.0;
    if (rule == UpdateRule::kAddSubtract) {
      const Scored s = ScoreSample(model, x);
      sim = s.class_best[cls];
      if (s.best.label != y) wrong = s.best;
    } else {
      sim = Similarity(x, own.proto);
    }
    const double w = 1.0 - sim;
    const FixedWeight fw = FixedWeight::FromDouble(w);
    AddTo(own, x, fw, tie_break);
    if (wrong) SubtractFrom(model.centroids[wrong->centroid], x, fw, tie_break);
    weights[cls].push_back(w);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) model.stats.weights[c] = Summarize(weights[c]);
  model.stats.centroids_before = model.stats.centroids_after = model.CentroidCounts();
  return model;
}

Model Train(Strategy strategy, const TrainingSet& data, const LearningOptions& options,
            const Hypervector& tie_break) {
  switch (strategy) {
    case Strategy::k2C: {
      Model m = TrainSinglePass(data, tie_break);
      return m;
    }
    case Strategy::k2CAdd:
      return TrainMultiPass(data, UpdateRule::kAddOnly, options, tie_break);
    case Strategy::k2CAddSub:
      return TrainMultiPass(data, UpdateRule::kAddSubtract, options, tie_break);
    case Strategy::kMC:
      return TrainMultiCentroid(data, tie_break);
    case Strategy::kMCr:
      return ReduceCentroids(TrainMultiCentroid(data, tie_break), ReductionMethod::kRemove, options.reduction);
    case Strategy::kMCc:
      return ReduceCentroids(TrainMultiCentroid(data, tie_break), ReductionMethod::kCluster, options.reduction);
    case Strategy::kMCri:
      return FineTuneMultiPass(
          ReduceCentroids(TrainMultiCentroid(data, tie_break), ReductionMethod::kRemove, options.reduction), data,
          options);
    case Strategy::kOnAdd:
      return TrainOnline(data, UpdateRule::kAddOnly, tie_break);
    case Strategy::kOnAddSub:
      return TrainOnline(data, UpdateRule::kAddSubtract, tie_break);
  }
  throw InvalidArgument("unknown strategy");
}

double TrainingScore(const Model& model, const TrainingSet& data, const PostProcessing& post) {
  const auto scored = ScoreAll(model, data);
  return ScoreFromPredictions(data, scored, post);
}

void WriteModel(std::ostream& out, const Model& model) {
  out.write(kMagic, 4);
  binio::WriteU32(out, kVersion);
  // Fixed-width tag so the header size does not depend on the strategy.
  std::array<char, kTagBytes> tag{};
  const auto name = StrategyTag(model.strategy);
  std::copy(name.begin(), name.end(), tag.begin());
  out.write(tag.data(), kTagBytes);
  binio::WriteU64(out, model.dim());
  binio::WriteU64(out, model.centroids.size());
  for (const auto& c : model.centroids) {
    binio::WriteI32(out, c.label);
    binio::WriteI64(out, c.n_members.raw());
  }
  WriteHypervector(out, model.tie_break);
  for (const auto& c : model.centroids) {
    WriteAccumulator(out, c.acc);
    WriteHypervector(out, c.proto);
  }
}

Model ReadModel(std::istream& in) {
  char magic[4];
  binio::ReadBytes(in, magic, 4);
  if (!std::equal(magic, magic + 4, kMagic)) throw ParseError("not a model file", 0);
  if (binio::ReadU32(in) != kVersion) throw ParseError("unsupported model version", 4);
  Model m;
  std::array<char, kTagBytes> raw{};
  binio::ReadBytes(in, raw.data(), kTagBytes);
  const std::string tag(raw.data(), std::find(raw.begin(), raw.end(), '\0'));
  const auto strategy = ParseStrategy(tag);
  if (!strategy) throw ParseError("unknown strategy tag '" + tag + "'", 8);
  m.strategy = *strategy;
  const std::uint64_t dim = binio::ReadU64(in);
  const std::uint64_t count = binio::ReadU64(in);
  if (count > 1000000) throw ParseError("implausible centroid count", static_cast<std::uint64_t>(in.tellg()));
  m.centroids.resize(count);
  for (auto& c : m.centroids) {
    c.label = binio::ReadI32(in);
    c.n_members = FixedWeight(binio::ReadI64(in));
    if (c.label < 0 || c.label >= kNumClasses) {
      throw ParseError("centroid label out of range", static_cast<std::uint64_t>(in.tellg()));
    }
  }
  m.tie_break = ReadHypervector(in);
  if (m.tie_break.dim() != dim) throw ParseError("tie-break dimension mismatch", static_cast<std::uint64_t>(in.tellg()));
  for (auto& c : m.centroids) {
    c.acc = ReadAccumulator(in);
    c.proto = ReadHypervector(in);
    if (c.acc.dim() != dim || c.proto.dim() != dim) {
      throw ParseError("centroid dimension mismatch", static_cast<std::uint64_t>(in.tellg()));
    }
  }
  m.stats.centroids_before = m.stats.centroids_after = m.CentroidCounts();
  return m;
}

std::size_t SerializedSize(const Model& model) {
  std::size_t bytes = 4 + 4 + kTagBytes + 8 + 8;
  bytes += model.centroids.size() * (4 + 8);
  bytes += SerializedSize(model.tie_break);
  for (const auto& c : model.centroids) bytes += SerializedSize(c.acc) + SerializedSize(c.proto);
  return bytes;
}

std::string TrainStatsJson(const TrainStats& stats) {
  nlohmann::json j;
  j["passes"] = stats.passes;
  j["best_pass"] = stats.best_pass;
  j["readded_fraction_per_pass"] = stats.readded_fraction_per_pass;
  j["train_f1de_per_pass"] = stats.train_score_per_pass;
  j["centroids_before"] = stats.centroids_before;
  j["centroids_after"] = stats.centroids_after;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& w = stats.weights[c];
    j["weights"][std::to_string(c)] = {{"count", w.count}, {"mean", w.mean}, {"histogram", w.histogram}};
  }
  return j.dump(2);
}

}  // namespace hdseizure

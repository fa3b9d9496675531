#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "hdseizure/errors.hpp"
#include "hdseizure/learning.hpp"
#include "oracles.hpp"

using namespace hdseizure;

namespace {

// Owns the samples a TrainingSet points into.
struct Data {
  std::vector<Hypervector> x;
  std::vector<int> y;
  std::vector<std::size_t> files{0};

  [[nodiscard]] TrainingSet set() const { return TrainingSet{x, y, files, 0.5}; }
  void push(Hypervector v, int label) {
    x.push_back(std::move(v));
    y.push_back(label);
  }
};

Hypervector Noisy(const Hypervector& base, double flip, std::mt19937_64& rng) {
  std::bernoulli_distribution b(flip);
  Hypervector out = base;
  for (std::size_t i = 0; i < out.dim(); ++i) {
    if (b(rng)) out.Flip(i);
  }
  return out;
}

oracle::Bits ToBits(const Hypervector& v) {
  oracle::Bits b(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) b[i] = v.Get(i) ? 1 : 0;
  return b;
}

Hypervector FromBits(const oracle::Bits& b) {
  Hypervector v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v.Set(i, b[i] != 0);
  return v;
}

Centroid MakeCentroid(const Hypervector& v, int label, std::int64_t members, const Hypervector& tie) {
  Centroid c{Accumulator(v.dim()), Hypervector(), FixedWeight(members * kFixedScale), label};
  c.acc.Add(v, c.n_members);
  c.proto = Binarize(c.acc, tie);
  return c;
}

void ExpectSameCentroids(const Model& a, const Model& b) {
  ASSERT_EQ(a.centroids.size(), b.centroids.size());
  for (std::size_t i = 0; i < a.centroids.size(); ++i) {
    EXPECT_EQ(a.centroids[i].label, b.centroids[i].label) << i;
    EXPECT_EQ(a.centroids[i].n_members, b.centroids[i].n_members) << i;
    EXPECT_EQ(a.centroids[i].acc, b.centroids[i].acc) << i;
    EXPECT_EQ(a.centroids[i].proto, b.centroids[i].proto) << i;
  }
}

void ExpectCoherent(const Model& m) {
  for (int c = 0; c < kNumClasses; ++c) EXPECT_GE(m.CentroidCounts()[static_cast<std::size_t>(c)], 1U);
  for (const auto& c : m.centroids) {
    EXPECT_GT(c.n_members.raw(), 0);
    EXPECT_EQ(c.proto, Binarize(c.acc, m.tie_break));
  }
}

std::string Bytes(const Model& m) {
  std::ostringstream out;
  WriteModel(out, m);
  return out.str();
}

// Two well-separated modes, one per class, with light noise. Class 0 comes
// first as one block so post-processing keeps perfect predictions intact.
Data Separable(std::size_t dim, std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto a = RandomHypervector(dim, seed * 2 + 1);
  const auto b = RandomHypervector(dim, seed * 2 + 2);
  Data d;
  for (std::size_t i = 0; i < per_class; ++i) d.push(Noisy(a, 0.1, rng), 0);
  for (std::size_t i = 0; i < per_class; ++i) d.push(Noisy(b, 0.1, rng), 1);
  return d;
}

// Class 0 alternates between far-apart modes A and B; class 1 sits on C,
// which shares half its bits with A and half with B. Class 1 comes first so
// the first B sample is mispredicted.
Data Bimodal(std::size_t dim, std::size_t per_mode, std::uint64_t seed, double flip = 0.05) {
  std::mt19937_64 rng(seed);
  const auto a = RandomHypervector(dim, seed * 3 + 1);
  const auto b = RandomHypervector(dim, seed * 3 + 2);
  Hypervector c(dim);
  for (std::size_t i = 0; i < dim; ++i) c.Set(i, i < dim / 2 ? a.Get(i) : b.Get(i));
  Data d;
  for (std::size_t i = 0; i < per_mode; ++i) {
    d.push(Noisy(c, flip, rng), 1);
    d.push(Noisy(a, flip, rng), 0);
    d.push(Noisy(b, flip, rng), 0);
  }
  return d;
}

}  // namespace

TEST(Strategy, TagsRoundTrip) {
  for (Strategy s : kAllStrategies) EXPECT_EQ(ParseStrategy(StrategyTag(s)), s);
  EXPECT_EQ(StrategyTag(Strategy::k2CAddSub), "2C+-");
  EXPECT_EQ(StrategyTag(Strategy::kOnAdd), "On+");
  EXPECT_FALSE(ParseStrategy("bogus").has_value());
  EXPECT_FALSE(ParseStrategy("").has_value());
  EXPECT_NE(ValidStrategyTags().find("MCri"), std::string::npos);
}

TEST(Predict, ExactMatchAndTies) {
  const Hypervector tie(8);
  Hypervector zeros(8);
  Hypervector ones(8);
  for (std::size_t i = 0; i < 8; ++i) ones.Set(i, true);
  Model m;
  m.tie_break = tie;
  m.centroids = {MakeCentroid(zeros, 0, 1, tie), MakeCentroid(ones, 1, 1, tie)};
  const auto p = Predict(m, ones);
  EXPECT_EQ(p.label, 1);
  EXPECT_EQ(p.similarity, 1.0);
  Hypervector half(8);
  for (std::size_t i = 4; i < 8; ++i) half.Set(i, true);
  EXPECT_EQ(Predict(m, half).label, 0);
  // Order of centroids does not matter for the class tie rule.
  std::swap(m.centroids[0], m.centroids[1]);
  EXPECT_EQ(Predict(m, half).label, 0);
  EXPECT_EQ(Predict(m, half).centroid, 1U);
  EXPECT_THROW(Predict(m, Hypervector(9)), DimensionMismatch);
  EXPECT_THROW(Predict(Model{}, half), InvalidArgument);
}

TEST(Predict, MatchesExhaustiveArgmax) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + rng() % 64;
    const Hypervector tie = RandomHypervector(dim, rng());
    Model m;
    m.tie_break = tie;
    for (int k = 0; k < 3; ++k) m.centroids.push_back(MakeCentroid(RandomHypervector(dim, rng()), static_cast<int>(rng() % 2), 1, tie));
    m.centroids[rng() % 3].label = 0;
    m.centroids[rng() % 3].label = 1;
    const auto x = RandomHypervector(dim, rng());
    // Smallest (distance, label, index) wins.
    std::tuple<std::size_t, int, std::size_t> best{dim + 1, 2, 3};
    for (std::size_t i = 0; i < 3; ++i) {
      best = std::min(best, std::make_tuple(HammingDistance(m.centroids[i].proto, x), m.centroids[i].label, i));
    }
    const auto p = Predict(m, x);
    EXPECT_EQ(p.label, std::get<1>(best));
    EXPECT_EQ(p.centroid, std::get<2>(best));
  }
}

TEST(SinglePass, SmallExamples) {
  const auto v = RandomHypervector(100, 1);
  const auto w = RandomHypervector(100, 2);
  const auto tie = RandomHypervector(100, 3);
  Data d;
  d.push(v, 0);
  d.push(w, 1);
  Model m = TrainSinglePass(d.set(), tie);
  EXPECT_EQ(m.strategy, Strategy::k2C);
  ASSERT_EQ(m.centroids.size(), 2U);
  EXPECT_EQ(m.centroids[0].proto, v);
  EXPECT_EQ(m.centroids[1].proto, w);
  d.push(v, 0);
  m = TrainSinglePass(d.set(), tie);
  EXPECT_EQ(m.centroids[0].proto, v);
  EXPECT_EQ(m.centroids[0].n_members, FixedWeight(2 * kFixedScale));
}

TEST(SinglePass, MatchesBruteForceMajority) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 64;
    const auto tie = RandomHypervector(dim, rng());
    Data d;
    for (int i = 0; i < 200; ++i) d.push(RandomHypervector(dim, rng()), static_cast<int>(rng() % 2));
    d.y[0] = 0;
    d.y[1] = 1;
    const Model m = TrainSinglePass(d.set(), tie);
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<oracle::Bits> members;
      for (std::size_t i = 0; i < d.x.size(); ++i) {
        if (d.y[i] == cls) members.push_back(ToBits(d.x[i]));
      }
      const auto expected = oracle::WeightedMajority(members, std::vector<long>(members.size(), 1),
                                                     std::vector<int>(members.size(), 1), ToBits(tie));
      EXPECT_EQ(m.centroids[static_cast<std::size_t>(cls)].proto, FromBits(expected));
    }
  }
}

TEST(SinglePass, RejectsInvalidData) {
  const auto tie = RandomHypervector(64, 1);
  Data d;
  d.push(RandomHypervector(64, 2), 0);
  d.push(RandomHypervector(64, 3), 0);
  EXPECT_THROW(TrainSinglePass(d.set(), tie), InvalidArgument);
  for (Strategy s : kAllStrategies) EXPECT_THROW(Train(s, d.set(), {}, tie), InvalidArgument);
  d.y[1] = 2;
  EXPECT_THROW(TrainSinglePass(d.set(), tie), InvalidArgument);
  d.y[1] = 1;
  d.x[1] = RandomHypervector(65, 3);
  EXPECT_THROW(TrainSinglePass(d.set(), tie), DimensionMismatch);
  d.x[1] = RandomHypervector(64, 3);
  EXPECT_THROW(TrainSinglePass(d.set(), RandomHypervector(32, 1)), DimensionMismatch);
  d.files = {0, 5};
  EXPECT_THROW(TrainSinglePass(d.set(), tie), InvalidArgument);
}

TEST(StopRule, Examples) {
  const StopRule rule;
  const std::vector<double> plateau{0.5, 0.9, 0.9, 0.9, 0.9};
  EXPECT_FALSE(rule.ShouldStop(std::span(plateau).first(4)));
  EXPECT_TRUE(rule.ShouldStop(plateau));
  std::vector<double> rising;
  for (int i = 0; i < 29; ++i) rising.push_back(0.01 * i);
  EXPECT_FALSE(rule.ShouldStop(rising));
  EXPECT_FALSE(rule.ShouldStop(std::vector<double>{0.3}));
  const std::vector<double> constant(30, 0.7);
  EXPECT_TRUE(rule.ShouldStop(constant));
  // Gains at or below epsilon do not count as improvement.
  EXPECT_TRUE(rule.ShouldStop(std::vector<double>{0.5, 0.501, 0.502, 0.5025}));
  EXPECT_FALSE(rule.ShouldStop(std::vector<double>{0.5, 0.501, 0.502, 0.504}));
  EXPECT_THROW(static_cast<void>(rule.ShouldStop(std::vector<double>{})), InvalidArgument);
}

TEST(MultiPass, SeparableConvergesImmediately) {
  const Data d = Separable(2000, 40, 1);
  const auto tie = RandomHypervector(2000, 99);
  const Model base = TrainSinglePass(d.set(), tie);
  // Identity post-processing: the centered smoothing window would move the
  // class boundary by one window.
  LearningOptions opt;
  opt.post = PostProcessing{0.5, 0.0};
  for (UpdateRule rule : {UpdateRule::kAddOnly, UpdateRule::kAddSubtract}) {
    const Model m = TrainMultiPass(d.set(), rule, opt, tie);
    EXPECT_EQ(m.strategy, rule == UpdateRule::kAddOnly ? Strategy::k2CAdd : Strategy::k2CAddSub);
    EXPECT_EQ(m.stats.passes, 2U);
    ASSERT_EQ(m.stats.readded_fraction_per_pass.size(), 1U);
    EXPECT_EQ(m.stats.readded_fraction_per_pass[0], 0.0);
    EXPECT_EQ(m.stats.train_score_per_pass.back(), 1.0);
    ExpectSameCentroids(m, base);
  }
}

TEST(MultiPass, ReturnsBestPassAndStopsByRule) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Data d = Bimodal(512, 30, seed, 0.3);
    d.files = {0, 45};
    const auto tie = RandomHypervector(512, seed);
    for (UpdateRule rule : {UpdateRule::kAddOnly, UpdateRule::kAddSubtract}) {
      const Model m = TrainMultiPass(d.set(), rule, {}, tie);
      const auto& h = m.stats.train_score_per_pass;
      ASSERT_EQ(h.size(), m.stats.passes);
      EXPECT_EQ(m.stats.readded_fraction_per_pass.size(), h.size() - 1);
      for (double r : m.stats.readded_fraction_per_pass) {
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
      }
      ASSERT_GE(m.stats.best_pass, 1U);
      ASSERT_LE(m.stats.best_pass, h.size());
      EXPECT_EQ(h[m.stats.best_pass - 1], *std::max_element(h.begin(), h.end()));
      EXPECT_EQ(TrainingScore(m, d.set(), {}), h[m.stats.best_pass - 1]);
      ExpectCoherent(m);
    }
  }
}

TEST(MultiPass, LearningRateMustBePositive) {
  const Data d = Separable(256, 5, 2);
  LearningOptions opt;
  opt.learning_rate = 0.0;
  EXPECT_THROW(TrainMultiPass(d.set(), UpdateRule::kAddOnly, opt, RandomHypervector(256, 1)), InvalidArgument);
}

TEST(MultiCentroid, UnimodalEqualsSinglePass) {
  const Data d = Separable(2000, 50, 3);
  const auto tie = RandomHypervector(2000, 7);
  const Model mc = TrainMultiCentroid(d.set(), tie);
  const Model two = TrainSinglePass(d.set(), tie);
  ExpectSameCentroids(mc, two);
  EXPECT_EQ(mc.strategy, Strategy::kMC);
}

TEST(MultiCentroid, BimodalClassSplits) {
  const Data d = Bimodal(2000, 30, 4);
  const auto tie = RandomHypervector(2000, 8);
  const Model m = TrainMultiCentroid(d.set(), tie);
  EXPECT_GE(m.CentroidCounts()[0], 2U);
  EXPECT_EQ(m.CentroidCounts()[1], 1U);
  ExpectCoherent(m);
  EXPECT_EQ(TrainingScore(m, d.set(), PostProcessing{0.5, 0.0}), 1.0);
}

TEST(Reduce, SingleCentroidPerClassUnchanged) {
  const Data d = Separable(512, 10, 5);
  const auto tie = RandomHypervector(512, 1);
  const Model mc = TrainMultiCentroid(d.set(), tie);
  for (auto method : {ReductionMethod::kRemove, ReductionMethod::kCluster}) {
    const Model r = ReduceCentroids(mc, method, {});
    ExpectSameCentroids(r, mc);
    EXPECT_EQ(r.strategy, method == ReductionMethod::kRemove ? Strategy::kMCr : Strategy::kMCc);
  }
}

TEST(Reduce, ThresholdRule) {
  const std::size_t dim = 1000;
  const auto tie = RandomHypervector(dim, 1);
  const auto big = RandomHypervector(dim, 2);
  const auto mid = RandomHypervector(dim, 3);
  Hypervector near_mid = mid;
  for (std::size_t i = 0; i < 100; ++i) near_mid.Flip(i);
  Model m;
  m.tie_break = tie;
  m.centroids = {MakeCentroid(near_mid, 0, 1, tie), MakeCentroid(big, 0, 100, tie),
                 MakeCentroid(RandomHypervector(dim, 4), 1, 7, tie), MakeCentroid(mid, 0, 50, tie)};
  // Class 0 total 151: threshold max(2, 3.02), so the 1-member centroid goes.
  const Model removed = ReduceCentroids(m, ReductionMethod::kRemove, {});
  ASSERT_EQ(removed.centroids.size(), 3U);
  EXPECT_EQ(removed.CentroidCounts()[0], 2U);
  EXPECT_EQ(removed.centroids[0].n_members, FixedWeight(100 * kFixedScale));
  EXPECT_EQ(removed.centroids[1].n_members, FixedWeight(50 * kFixedScale));
  EXPECT_EQ(removed.stats.centroids_before[0], 3U);
  EXPECT_EQ(removed.stats.centroids_after[0], 2U);

  const Model clustered = ReduceCentroids(m, ReductionMethod::kCluster, {});
  ASSERT_EQ(clustered.centroids.size(), 3U);
  const Centroid& merged = clustered.centroids[1];
  EXPECT_EQ(merged.n_members, FixedWeight(51 * kFixedScale));
  Accumulator expected = m.centroids[3].acc;
  expected.Merge(m.centroids[0].acc);
  EXPECT_EQ(merged.acc, expected);
  EXPECT_EQ(merged.proto, Binarize(expected, tie));
  EXPECT_EQ(clustered.centroids[0].acc, m.centroids[1].acc);
  ExpectCoherent(clustered);
}

TEST(Reduce, KeepFractionOverridesAndAlwaysKeepsOne) {
  const auto tie = RandomHypervector(256, 1);
  Model m;
  m.tie_break = tie;
  for (int k = 0; k < 3; ++k) m.centroids.push_back(MakeCentroid(RandomHypervector(256, 10 + k), 0, 1, tie));
  m.centroids.push_back(MakeCentroid(RandomHypervector(256, 20), 1, 1, tie));
  ReductionOptions opt;
  opt.keep_fraction = 0.5;
  EXPECT_EQ(ReduceCentroids(m, ReductionMethod::kRemove, opt).CentroidCounts()[0], 2U);
  // All below threshold: still one per class.
  const Model r = ReduceCentroids(m, ReductionMethod::kRemove, {});
  EXPECT_EQ(r.CentroidCounts()[0], 1U);
  EXPECT_EQ(r.CentroidCounts()[1], 1U);
  opt.keep_fraction = 0.0;
  EXPECT_THROW(ReduceCentroids(m, ReductionMethod::kRemove, opt), InvalidArgument);
  opt.keep_fraction = 1.5;
  EXPECT_THROW(ReduceCentroids(m, ReductionMethod::kCluster, opt), InvalidArgument);
}

TEST(FineTune, FrozenCountAndBestPass) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Data d = Bimodal(1000, 25, seed, 0.25);
    const auto tie = RandomHypervector(1000, seed + 50);
    const Model reduced = ReduceCentroids(TrainMultiCentroid(d.set(), tie), ReductionMethod::kRemove, {});
    const Model tuned = FineTuneMultiPass(reduced, d.set(), {});
    EXPECT_EQ(tuned.strategy, Strategy::kMCri);
    EXPECT_EQ(tuned.CentroidCounts(), reduced.CentroidCounts());
    const auto& h = tuned.stats.train_score_per_pass;
    EXPECT_EQ(h.front(), TrainingScore(reduced, d.set(), {}));
    EXPECT_EQ(h[tuned.stats.best_pass - 1], *std::max_element(h.begin(), h.end()));
    EXPECT_GE(TrainingScore(tuned, d.set(), {}), h.front());
    ExpectCoherent(tuned);
  }
}

TEST(FineTune, PerfectModelUnchanged) {
  const Data d = Separable(1000, 20, 6);
  const auto tie = RandomHypervector(1000, 2);
  const Model reduced = ReduceCentroids(TrainMultiCentroid(d.set(), tie), ReductionMethod::kRemove, {});
  const Model tuned = FineTuneMultiPass(reduced, d.set(), {});
  ExpectSameCentroids(tuned, reduced);
  EXPECT_EQ(tuned.stats.readded_fraction_per_pass, std::vector<double>{0.0});
}

TEST(Online, SeedingAndZeroWeight) {
  const auto tie = RandomHypervector(300, 1);
  const auto v = RandomHypervector(300, 2);
  const auto w = RandomHypervector(300, 3);
  Data d;
  d.push(v, 0);
  d.push(w, 1);
  const Model seeded = TrainOnline(d.set(), UpdateRule::kAddOnly, tie);
  EXPECT_EQ(seeded.centroids[0].n_members, FixedWeight::One());
  EXPECT_EQ(seeded.centroids[0].proto, v);
  d.push(v, 0);
  for (UpdateRule rule : {UpdateRule::kAddOnly, UpdateRule::kAddSubtract}) {
    const Model m = TrainOnline(d.set(), rule, tie);
    ExpectSameCentroids(m, seeded);
    EXPECT_EQ(m.stats.weights[0].count, 1U);
    EXPECT_EQ(m.stats.weights[0].mean, 0.0);
  }
}

TEST(Online, MatchesNaiveSimulation) {
  // Integer-count re-implementation at small dim, following the update rule
  // literally.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 64;
    const auto tie = RandomHypervector(dim, rng());
    Data d;
    for (int i = 0; i < 60; ++i) d.push(RandomHypervector(dim, rng()), static_cast<int>(rng() % 2));
    for (UpdateRule rule : {UpdateRule::kAddOnly, UpdateRule::kAddSubtract}) {
      std::vector<std::vector<long>> counts;
      std::vector<Hypervector> protos;
      std::array<int, 2> slot{-1, -1};
      auto proto_of = [&](const std::vector<long>& c) {
        Hypervector p(dim);
        for (std::size_t i = 0; i < dim; ++i) p.Set(i, c[i] > 0 || (c[i] == 0 && tie.Get(i)));
        return p;
      };
      auto add = [&](int k, const Hypervector& x, long w) {
        for (std::size_t i = 0; i < dim; ++i) counts[k][i] += w * (x.Get(i) ? 1 : -1);
        protos[k] = proto_of(counts[k]);
      };
      for (std::size_t n = 0; n < d.x.size(); ++n) {
        const int y = d.y[n];
        const auto& x = d.x[n];
        if (slot[y] < 0) {
          slot[y] = static_cast<int>(counts.size());
          counts.emplace_back(dim, 0);
          protos.emplace_back(dim);
          add(slot[y], x, kFixedScale);
          continue;
        }
        // Prediction uses the prototypes before this sample's update.
        int pred = 0;
        double best = -1.0;
        for (int k = 0; k < static_cast<int>(protos.size()); ++k) {
          const int label = slot[0] == k ? 0 : 1;
          const double s = Similarity(protos[k], x);
          if (s > best || (s == best && label < pred)) {
            best = s;
            pred = label;
          }
        }
        const long w = std::llround((1.0 - Similarity(x, protos[slot[y]])) * kFixedScale);
        add(slot[y], x, w);
        if (rule == UpdateRule::kAddSubtract && pred != y) add(slot[pred], x, -w);
      }
      const Model m = TrainOnline(d.set(), rule, tie);
      ASSERT_EQ(m.centroids.size(), 2U);
      for (int cls = 0; cls < 2; ++cls) {
        const auto& c = m.centroids[static_cast<std::size_t>(slot[cls])];
        EXPECT_EQ(c.label, cls);
        EXPECT_EQ(c.proto, protos[slot[cls]]);
        for (std::size_t i = 0; i < dim; ++i) ASSERT_EQ(c.acc.counts()[i], counts[slot[cls]][i]);
      }
    }
  }
}

TEST(Online, OrthogonalSamplesGiveHalfWeights) {
  std::mt19937_64 rng(3);
  Data d;
  for (int i = 0; i < 400; ++i) d.push(RandomHypervector(10000, rng()), i % 2);
  const Model m = TrainOnline(d.set(), UpdateRule::kAddOnly, RandomHypervector(10000, 1));
  for (const auto& w : m.stats.weights) {
    EXPECT_EQ(w.count, 199U);
    EXPECT_NEAR(w.mean, 0.5, 0.02);
  }
}

TEST(AllStrategies, DeterministicCoherentAndSerializable) {
  const Data d = Bimodal(1000, 20, 9, 0.2);
  const auto tie = RandomHypervector(1000, 3);
  std::map<Strategy, std::size_t> sizes;
  for (Strategy s : kAllStrategies) {
    const Model a = Train(s, d.set(), {}, tie);
    const Model b = Train(s, d.set(), {}, tie);
    EXPECT_EQ(a.strategy, s);
    ExpectCoherent(a);
    const std::string bytes = Bytes(a);
    EXPECT_EQ(bytes, Bytes(b)) << StrategyTag(s);
    EXPECT_EQ(bytes.size(), SerializedSize(a)) << StrategyTag(s);
    std::istringstream in(bytes);
    const Model back = ReadModel(in);
    EXPECT_EQ(back.strategy, s);
    EXPECT_EQ(back.tie_break, a.tie_break);
    ExpectSameCentroids(back, a);
    sizes[s] = bytes.size();
  }
  EXPECT_EQ(sizes[Strategy::k2C], sizes[Strategy::kOnAdd]);
  EXPECT_EQ(sizes[Strategy::k2C], sizes[Strategy::kOnAddSub]);
  EXPECT_GT(sizes[Strategy::kMC], sizes[Strategy::k2C]);
  EXPECT_LE(sizes[Strategy::kMCr], sizes[Strategy::kMC]);
}

TEST(ModelSerialization, RejectsCorruptInput) {
  const Data d = Separable(128, 3, 1);
  const std::string bytes = Bytes(TrainSinglePass(d.set(), RandomHypervector(128, 1)));
  std::string bad = bytes;
  bad[8] = 'Z';
  std::istringstream a(bad);
  EXPECT_THROW(ReadModel(a), ParseError);
  std::istringstream b(bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(ReadModel(b), ParseError);
}

TEST(TrainStats, JsonHasPerPassFields) {
  const Data d = Bimodal(512, 10, 2, 0.3);
  const Model m = Train(Strategy::k2CAddSub, d.set(), {}, RandomHypervector(512, 1));
  const std::string json = TrainStatsJson(m.stats);
  EXPECT_NE(json.find("readded_fraction_per_pass"), std::string::npos);
  EXPECT_NE(json.find("train_f1de_per_pass"), std::string::npos);
}

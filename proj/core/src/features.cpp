#include "hdseizure/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "hdseizure/errors.hpp"
#include "hdseizure/parallel.hpp"

namespace hdseizure {
namespace {

void RequireNonEmpty(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("feature window is empty");
}

// Probability mass of an equal-width histogram over [min, max]. A constant
// window puts all mass in one bin.
std::vector<double> Histogram(std::span<const double> x, int n_bins) {
  RequireNonEmpty(x);
  if (n_bins < 2) throw InvalidArgument("histogram needs at least 2 bins");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> p(static_cast<std::size_t>(n_bins), 0.0);
  if (!(hi > lo)) {
    p[0] = 1.0;
    return p;
  }
  const double scale = n_bins / (hi - lo);
  for (double v : x) {
    auto bin = static_cast<std::size_t>((v - lo) * scale);
    p[std::min(bin, p.size() - 1)] += 1.0;
  }
  for (auto& v : p) v /= static_cast<double>(x.size());
  return p;
}

double Finite(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

void ValidateRecording(const Recording& rec) {
  if (!(rec.fs > 0.0)) throw InvalidArgument("sampling frequency must be positive");
  if (rec.channels.size() != rec.samples.size()) {
    throw InvalidArgument("channel names and sample series differ in count");
  }
  for (const auto& s : rec.samples) {
    if (s.size() != rec.num_samples()) throw InvalidArgument("channels have unequal lengths");
  }
  const double duration = rec.duration_sec();
  std::vector<Interval> sorted = rec.annotations;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.start_sec < b.start_sec; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& iv = sorted[i];
    if (!(iv.start_sec < iv.end_sec)) throw InvalidArgument("annotation start must precede end");
    if (iv.start_sec < 0.0 || iv.end_sec > duration + 1e-9) {
      throw InvalidArgument("annotation outside recording bounds");
    }
    if (i > 0 && iv.start_sec < sorted[i - 1].end_sec) throw InvalidArgument("overlapping annotations");
  }
}

double MeanAmplitude(std::span<const double> x) {
  RequireNonEmpty(x);
  double sum = 0.0;
  for (double v : x) sum += std::abs(v);
  return sum / static_cast<double>(x.size());
}

double ShannonEntropy(std::span<const double> x, int n_bins) {
  double h = 0.0;
  for (double p : Histogram(x, n_bins)) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double RenyiEntropy(std::span<const double> x, double alpha, int n_bins) {
  if (!(alpha > 0.0) || alpha == 1.0) throw InvalidArgument("Renyi alpha must be positive and != 1");
  double s = 0.0;
  for (double p : Histogram(x, n_bins)) {
    if (p > 0.0) s += std::pow(p, alpha);
  }
  return std::log(s) / (1.0 - alpha);
}

double TsallisEntropy(std::span<const double> x, double q, int n_bins) {
  if (q == 1.0) throw InvalidArgument("Tsallis q must differ from 1");
  double s = 0.0;
  for (double p : Histogram(x, n_bins)) {
    if (p > 0.0) s += std::pow(p, q);
  }
  return (1.0 - s) / (q - 1.0);
}

double SampleEntropy(std::span<const double> x, int m, double r_factor, double cap) {
  const double r[1] = {r_factor};
  return SampleEntropySweep(x, m, r, cap).front();
}

std::vector<double> SampleEntropySweep(std::span<const double> x, int m, std::span<const double> r_factors,
                                       double cap) {
  if (m < 1) throw InvalidArgument("sample entropy template length must be >= 1");
  const std::size_t n = x.size();
  const auto mm = static_cast<std::size_t>(m);
  if (n <= mm + 1) throw InvalidArgument("window too short for sample entropy");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  std::vector<double> r(r_factors.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = r_factors[k] * sd;

  // Templates start at i in [0, n - m); both lengths use the same set.
  // Candidate pairs come from a value-sorted order: only templates whose
  // first samples lie within r_max of each other can match.
  const std::size_t templates = n - mm;
  const double r_max = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
  std::vector<std::size_t> order(templates);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return x[p] < x[q]; });
  std::vector<std::uint64_t> a(r.size(), 0);
  std::vector<std::uint64_t> b(r.size(), 0);
  for (std::size_t p = 0; p + 1 < templates; ++p) {
    const std::size_t i = order[p];
    for (std::size_t q = p + 1; q < templates && x[order[q]] - x[i] <= r_max; ++q) {
      const std::size_t j = order[q];
      double d = x[j] - x[i];
      for (std::size_t k = 1; k < mm && d <= r_max; ++k) d = std::max(d, std::abs(x[i + k] - x[j + k]));
      if (d > r_max) continue;
      const double d_next = std::max(d, std::abs(x[i + mm] - x[j + mm]));
      for (std::size_t t = 0; t < r.size(); ++t) {
        b[t] += d <= r[t];
        a[t] += d_next <= r[t];
      }
    }
  }
  std::vector<double> out(r.size(), cap);
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (a[t] > 0 && b[t] > 0) out[t] = -std::log(static_cast<double>(a[t]) / static_cast<double>(b[t]));
  }
  return out;
}

double PermutationEntropy(std::span<const double> x, int order, int delay) {
  if (order < 2 || delay < 1) throw InvalidArgument("permutation entropy needs order >= 2, delay >= 1");
  const auto ord = static_cast<std::size_t>(order);
  const auto del = static_cast<std::size_t>(delay);
  if (x.size() <= ord * del) throw InvalidArgument("window too short for permutation entropy");
  const std::size_t count = x.size() - (ord - 1) * del;

  // Each ordinal pattern (stable argsort) is identified by its Lehmer code.
  // Codes index a dense table for small orders.
  std::size_t codes = 1;
  for (std::size_t k = 2; k <= ord && codes <= 40320; ++k) codes *= k;
  const bool dense = codes <= 40320;
  std::vector<std::size_t> table(dense ? codes : 0, 0);
  std::unordered_map<std::uint64_t, std::size_t> patterns;
  std::vector<std::size_t> idx(ord);
  std::vector<double> val(ord);
  for (std::size_t i = 0; i < count; ++i) {
    // Stable insertion sort of positions by value.
    for (std::size_t p = 0; p < ord; ++p) {
      const double v = x[i + p * del];
      std::size_t q = p;
      for (; q > 0 && val[q - 1] > v; --q) {
        val[q] = val[q - 1];
        idx[q] = idx[q - 1];
      }
      val[q] = v;
      idx[q] = p;
    }
    std::uint64_t key = 0;
    for (std::size_t p = 0; p < ord; ++p) {
      std::size_t smaller = 0;
      for (std::size_t q = p + 1; q < ord; ++q) smaller += idx[q] < idx[p];
      key = key * (ord - p) + smaller;
    }
    if (dense) {
      ++table[key];
    } else {
      ++patterns[key];
    }
  }
  double h = 0.0;
  auto add = [&](std::size_t c) {
    const double p = static_cast<double>(c) / static_cast<double>(count);
    h -= p * std::log(p);
  };
  for (auto c : table) {
    if (c > 0) add(c);
  }
  for (const auto& [key, c] : patterns) add(c);
  return h / std::lgamma(static_cast<double>(ord) + 1.0);
}

std::vector<std::string> FeatureRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

std::size_t FeatureRegistry::MinWindowSamples(double fs) const {
  std::size_t need = 1;
  for (const auto& e : entries) {
    switch (e.kind) {
      case FeatureKind::kTotalPower:
      case FeatureKind::kRelPowerLow:
      case FeatureKind::kRelPowerDelta:
      case FeatureKind::kRelPowerTheta:
      case FeatureKind::kRelPowerAlpha:
      case FeatureKind::kRelPowerBeta:
      case FeatureKind::kRelPowerGamma:
      case FeatureKind::kPeakFrequency:
        need = std::max(need, static_cast<std::size_t>(std::lround(fs)));
        break;
      case FeatureKind::kSampleEntropy:
        need = std::max(need, static_cast<std::size_t>(e.a) + 2);
        break;
      case FeatureKind::kPermutationEntropy:
        need = std::max(need, static_cast<std::size_t>(e.a * e.b) + 1);
        break;
      default:
        break;
    }
  }
  return need;
}

FeatureRegistry CompactRegistry() {
  FeatureRegistry reg;
  reg.id = "compact";
  reg.entries = {
      {"mean_amp", FeatureKind::kMeanAmplitude},
      {"psd_total", FeatureKind::kTotalPower},
      {"rel_low", FeatureKind::kRelPowerLow},
      {"rel_delta", FeatureKind::kRelPowerDelta},
      {"rel_theta", FeatureKind::kRelPowerTheta},
      {"rel_alpha", FeatureKind::kRelPowerAlpha},
      {"rel_beta", FeatureKind::kRelPowerBeta},
      {"rel_gamma", FeatureKind::kRelPowerGamma},
      {"peak_freq", FeatureKind::kPeakFrequency},
  };
  return reg;
}

FeatureRegistry DefaultRegistry() {
  FeatureRegistry reg = CompactRegistry();
  reg.id = "default";
  auto& e = reg.entries;
  for (int order : {3, 5, 7}) {
    for (int delay : {1, 2}) {
      e.push_back({"perm_o" + std::to_string(order) + "_d" + std::to_string(delay),
                   FeatureKind::kPermutationEntropy, 0.0, order, delay});
    }
  }
  for (int m : {2, 3}) {
    for (int r : {10, 20, 30}) {
      e.push_back({"samp_m" + std::to_string(m) + "_r" + std::to_string(r), FeatureKind::kSampleEntropy,
                   r / 100.0, m, 0});
    }
  }
  for (int bins : {25, 50, 100}) {
    e.push_back({"shannon_b" + std::to_string(bins), FeatureKind::kShannonEntropy, 0.0, bins, 0});
  }
  for (int bins : {50, 100}) {
    for (int alpha : {2, 3, 4}) {
      e.push_back({"renyi_a" + std::to_string(alpha) + "_b" + std::to_string(bins),
                   FeatureKind::kRenyiEntropy, static_cast<double>(alpha), bins, 0});
    }
  }
  for (int bins : {50, 100}) {
    for (int q : {2, 3, 4}) {
      e.push_back({"tsallis_q" + std::to_string(q) + "_b" + std::to_string(bins),
                   FeatureKind::kTsallisEntropy, static_cast<double>(q), bins, 0});
    }
  }
  return reg;
}

FeatureRegistry RegistryById(const std::string& id) {
  if (id == "default") return DefaultRegistry();
  if (id == "compact") return CompactRegistry();
  throw InvalidArgument("unknown feature registry '" + id + "' (expected default or compact)");
}

std::vector<double> ComputeWindowFeatures(const Recording& rec, std::size_t first, std::size_t count,
                                          const FeatureRegistry& registry) {
  const std::size_t nf = registry.size();
  std::vector<double> values(rec.channels.size() * nf, 0.0);
  for (std::size_t c = 0; c < rec.channels.size(); ++c) {
    const std::span<const double> x(rec.samples[c].data() + first, count);
    std::optional<std::array<double, 8>> spectral;
    // Sample entropies sharing a template length come from one sweep.
    std::map<int, std::vector<double>> sampen;
    auto sample_entropy = [&](std::size_t f) {
      const int m = registry.entries[f].a;
      auto it = sampen.find(m);
      if (it == sampen.end()) {
        std::vector<double> rs;
        for (const auto& e : registry.entries) {
          if (e.kind == FeatureKind::kSampleEntropy && e.a == m) rs.push_back(e.real);
        }
        it = sampen.emplace(m, SampleEntropySweep(x, m, rs)).first;
      }
      std::size_t pos = 0;
      for (std::size_t g = 0; g < f; ++g) {
        pos += registry.entries[g].kind == FeatureKind::kSampleEntropy && registry.entries[g].a == m;
      }
      return it->second[pos];
    };
    auto band = [&](std::size_t k) {
      if (!spectral) spectral = ComputeSpectralFeatures(x, rec.fs).Flatten();
      return (*spectral)[k];
    };
    for (std::size_t f = 0; f < nf; ++f) {
      const FeatureSpec& s = registry.entries[f];
      double v = 0.0;
      switch (s.kind) {
        case FeatureKind::kMeanAmplitude: v = MeanAmplitude(x); break;
        case FeatureKind::kTotalPower: v = band(0); break;
        case FeatureKind::kRelPowerLow: v = band(1); break;
        case FeatureKind::kRelPowerDelta: v = band(2); break;
        case FeatureKind::kRelPowerTheta: v = band(3); break;
        case FeatureKind::kRelPowerAlpha: v = band(4); break;
        case FeatureKind::kRelPowerBeta: v = band(5); break;
        case FeatureKind::kRelPowerGamma: v = band(6); break;
        case FeatureKind::kPeakFrequency: v = band(7); break;
        case FeatureKind::kShannonEntropy: v = ShannonEntropy(x, s.a); break;
        case FeatureKind::kRenyiEntropy: v = RenyiEntropy(x, s.real, s.a); break;
        case FeatureKind::kTsallisEntropy: v = TsallisEntropy(x, s.real, s.a); break;
        case FeatureKind::kSampleEntropy: v = sample_entropy(f); break;
        case FeatureKind::kPermutationEntropy: v = PermutationEntropy(x, s.a, s.b); break;
      }
      values[c * nf + f] = Finite(v);
    }
  }
  return values;
}

std::vector<WindowSpan> EnumerateWindows(const Recording& rec, double window_sec, double step_sec) {
  if (!(window_sec > 0.0) || !(step_sec > 0.0)) throw InvalidArgument("window and step must be positive");
  const auto win = static_cast<std::size_t>(std::lround(window_sec * rec.fs));
  const double duration = rec.duration_sec();
  if (win == 0 || win > rec.num_samples()) {
    throw InvalidArgument("recording (" + std::to_string(duration) + " s) shorter than one window");
  }
  const auto count = static_cast<std::size_t>(std::floor((duration - window_sec) / step_sec + 1e-9)) + 1;
  std::vector<WindowSpan> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    WindowSpan w;
    w.t_start = static_cast<double>(k) * step_sec;
    w.t_end = w.t_start + window_sec;
    w.first_sample = static_cast<std::size_t>(std::lround(w.t_start * rec.fs));
    if (w.first_sample + win > rec.num_samples()) break;
    w.num_samples = win;
    const double mid = 0.5 * (w.t_start + w.t_end);
    w.label = std::any_of(rec.annotations.begin(), rec.annotations.end(),
                          [mid](const Interval& iv) { return iv.Contains(mid); })
                  ? 1
                  : 0;
    out.push_back(w);
  }
  return out;
}

std::vector<FeatureWindow> ExtractFeatures(const Recording& rec, double window_sec, double step_sec,
                                           const FeatureRegistry& registry, unsigned jobs) {
  ValidateRecording(rec);
  const auto spans = EnumerateWindows(rec, window_sec, step_sec);
  if (spans.front().num_samples < registry.MinWindowSamples(rec.fs)) {
    throw InvalidArgument("window too short for the feature registry");
  }
  std::vector<FeatureWindow> out(spans.size());
  ParallelFor(spans.size(), jobs, [&](std::size_t i) {
    const auto& s = spans[i];
    out[i] = FeatureWindow{s.t_start, s.t_end, s.label, registry.size(),
                           ComputeWindowFeatures(rec, s.first_sample, s.num_samples, registry)};
  });
  return out;
}

}  // namespace hdseizure

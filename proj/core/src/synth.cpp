#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hdseizure/dataio.hpp"
#include "hdseizure/errors.hpp"
#include "hdseizure/random.hpp"

namespace hdseizure {
namespace {

enum Stream : std::uint64_t { kLayout = 11, kChannelGain = 12, kSignal = 13 };

struct Segment {
  double start = 0.0;
  double end = 0.0;
  const SynthState* state = nullptr;
};

double Uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Places seizures on a jittered grid so they never overlap and keep the
// requested margin.
std::vector<Interval> PlaceSeizures(const SynthSpec& spec, std::mt19937_64& rng) {
  std::vector<Interval> out;
  if (spec.num_seizures == 0) return out;
  const auto n = static_cast<double>(spec.num_seizures);
  const double slot = (spec.duration_sec - spec.seizure_margin_sec) / n;
  if (slot < spec.seizure_max_sec + spec.seizure_margin_sec) {
    throw InvalidArgument("synthetic spec infeasible: " + std::to_string(spec.num_seizures) +
                          " seizures of up to " + std::to_string(spec.seizure_max_sec) + " s do not fit in " +
                          std::to_string(spec.duration_sec) + " s");
  }
  for (std::size_t k = 0; k < spec.num_seizures; ++k) {
    const double len = spec.seizure_min_sec + (spec.seizure_max_sec - spec.seizure_min_sec) * Uniform01(rng);
    const double lo = spec.seizure_margin_sec + static_cast<double>(k) * slot;
    const double room = slot - len - spec.seizure_margin_sec;
    const double start = std::floor(lo + room * Uniform01(rng));
    out.push_back({start, start + std::round(len)});
  }
  return out;
}

const SynthState* PickBackground(const SynthSpec& spec, std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& s : spec.background) total += s.weight;
  double u = Uniform01(rng) * total;
  for (const auto& s : spec.background) {
    if (u < s.weight) return &s;
    u -= s.weight;
  }
  return &spec.background.back();
}

std::vector<Segment> Layout(const SynthSpec& spec, const std::vector<Interval>& seizures, std::mt19937_64& rng) {
  std::vector<Segment> segs;
  double t = 0.0;
  std::size_t next = 0;
  while (t < spec.duration_sec) {
    if (next < seizures.size() && t >= seizures[next].start_sec) {
      segs.push_back({seizures[next].start_sec, seizures[next].end_sec, &spec.seizure});
      t = seizures[next].end_sec;
      ++next;
      continue;
    }
    const double dwell = std::max(10.0, -spec.background_dwell_sec * std::log(1.0 - Uniform01(rng)));
    double end = std::min(spec.duration_sec, t + dwell);
    if (next < seizures.size()) end = std::min(end, seizures[next].start_sec);
    segs.push_back({t, end, PickBackground(spec, rng)});
    t = end;
  }
  return segs;
}

}  // namespace

Recording SynthGenerate(const SynthSpec& spec, std::uint64_t seed) {
  if (!(spec.fs > 0.0) || !(spec.duration_sec > 0.0)) throw InvalidArgument("synthetic fs and duration must be positive");
  if (spec.background.empty()) throw InvalidArgument("synthetic spec needs at least one background state");
  if (spec.channels.empty()) throw InvalidArgument("synthetic spec needs at least one channel");
  if (spec.num_seizures > 0 && spec.seizure.components.empty() && spec.seizure.noise_amplitude <= 0.0) {
    throw InvalidArgument("synthetic seizure state is empty");
  }
  if (spec.seizure_min_sec > spec.seizure_max_sec || spec.seizure_min_sec <= 0.0) {
    throw InvalidArgument("synthetic seizure duration range invalid");
  }

  std::mt19937_64 layout_rng(DeriveSeed(seed, kLayout));
  const auto seizures = PlaceSeizures(spec, layout_rng);
  const auto segments = Layout(spec, seizures, layout_rng);

  Recording rec;
  rec.fs = spec.fs;
  rec.channels = spec.channels;
  rec.annotations = seizures;
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_sec * spec.fs));
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    std::mt19937_64 gain_rng(DeriveSeed(seed, kChannelGain, c));
    const double gain = 0.8 + 0.4 * Uniform01(gain_rng);
    std::mt19937_64 rng(DeriveSeed(seed, kSignal, c));
    std::vector<double> x(n, 0.0);
    double ar = 0.0;
    for (const auto& seg : segments) {
      const SynthState& st = *seg.state;
      std::vector<double> freq;
      std::vector<double> phase;
      for (const auto& comp : st.components) {
        freq.push_back(comp.frequency_hz + st.frequency_jitter_hz * (2.0 * Uniform01(rng) - 1.0));
        phase.push_back(2.0 * std::numbers::pi * Uniform01(rng));
      }
      const double innovation = std::sqrt(std::max(0.0, 1.0 - st.noise_ar * st.noise_ar));
      const auto first = static_cast<std::size_t>(std::llround(seg.start * spec.fs));
      const auto last = std::min(n, static_cast<std::size_t>(std::llround(seg.end * spec.fs)));
      for (std::size_t i = first; i < last; ++i) {
        const double t = static_cast<double>(i) / spec.fs;
        double v = 0.0;
        for (std::size_t k = 0; k < freq.size(); ++k) {
          v += st.components[k].amplitude * std::sin(2.0 * std::numbers::pi * freq[k] * t + phase[k]);
        }
        ar = st.noise_ar * ar + innovation * gauss(rng);
        x[i] = gain * (v + st.noise_amplitude * ar);
      }
    }
    rec.samples.push_back(std::move(x));
  }
  return rec;
}

SynthSpec MultimodalDemoSpec(std::size_t num_seizures, double duration_sec) {
  SynthSpec spec;
  spec.duration_sec = duration_sec;
  spec.fs = 128.0;
  spec.num_seizures = num_seizures;
  spec.seizure_min_sec = 30.0;
  spec.seizure_max_sec = 50.0;
  spec.background_dwell_sec = 60.0;

  SynthState awake{"awake", {{10.0, 12.0}, {20.0, 4.0}}, 6.0, 0.5, 0.5, 0.6};
  SynthState drowsy{"drowsy", {{6.0, 10.0}, {1.5, 14.0}}, 8.0, 0.8, 0.4, 0.3};
  SynthState slow{"slow", {{2.0, 30.0}, {4.5, 12.0}}, 12.0, 0.95, 0.3, 0.1};
  spec.background = {awake, drowsy, slow};
  spec.seizure = SynthState{"seizure", {{3.0, 40.0}, {6.0, 14.0}}, 8.0, 0.7, 0.2, 1.0};
  return spec;
}

}  // namespace hdseizure

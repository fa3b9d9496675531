#include "hdseizure/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "hdseizure/binary_io.hpp"
#include "hdseizure/errors.hpp"
#include "hdseizure/parallel.hpp"
#include "hdseizure/random.hpp"

namespace hdseizure {
namespace {

constexpr char kMagic[4] = {'H', 'D', 'I', 'M'};
constexpr std::uint32_t kVersion = 1;

enum Stream : std::uint64_t { kFeatureStream = 1, kChannelStream = 2, kLevelStream = 3, kTieStream = 4 };

// Linear-interpolated percentile of sorted data, q in [0, 1].
double Percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ItemMemory FitItemMemory(std::span<const FeatureWindow> train, const std::vector<std::string>& feature_names,
                         const std::vector<std::string>& channel_names, const ItemMemoryOptions& options) {
  if (train.empty()) throw InvalidArgument("cannot fit item memory on an empty training set");
  const std::size_t nf = feature_names.size();
  const std::size_t nc = channel_names.size();
  if (nf == 0 || nc == 0) throw InvalidArgument("item memory needs at least one feature and one channel");

  ItemMemory im;
  im.dim_ = options.dim;
  im.seed_ = options.seed;
  im.two_stage_ = options.two_stage;
  im.feature_names_ = feature_names;
  im.channel_names_ = channel_names;
  for (std::size_t f = 0; f < nf; ++f) {
    im.feature_vectors_.push_back(RandomHypervector(options.dim, DeriveSeed(options.seed, kFeatureStream, f)));
  }
  for (std::size_t c = 0; c < nc; ++c) {
    im.channel_vectors_.push_back(RandomHypervector(options.dim, DeriveSeed(options.seed, kChannelStream, c)));
  }
  im.levels_ = BuildLevelTable(options.dim, options.num_levels, DeriveSeed(options.seed, kLevelStream));
  im.tie_break_ = RandomHypervector(options.dim, DeriveSeed(options.seed, kTieStream));

  std::vector<double> column;
  column.reserve(train.size() * nc);
  for (std::size_t f = 0; f < nf; ++f) {
    column.clear();
    for (const auto& w : train) {
      if (w.num_features != nf || w.num_channels() != nc) {
        throw InvalidArgument("training window shape does not match registry/channels");
      }
      for (std::size_t c = 0; c < nc; ++c) column.push_back(w.at(c, f));
    }
    std::sort(column.begin(), column.end());
    Bounds b{Percentile(column, 0.01), Percentile(column, 0.99)};
    if (!(b.min < b.max)) b = Bounds{column.front(), column.back()};
    if (!(b.min < b.max)) b = Bounds{column.front() - 1.0, column.front() + 1.0};
    im.bounds_.push_back(b);
  }
  return im;
}

std::size_t Quantize(double value, const Bounds& bounds, std::size_t num_levels) {
  if (num_levels < 2) throw InvalidArgument("quantization needs at least 2 levels");
  if (!(bounds.min < bounds.max)) throw InvalidArgument("quantization bounds must satisfy min < max");
  const double v = std::clamp(value, bounds.min, bounds.max);
  const double frac = (v - bounds.min) / (bounds.max - bounds.min);
  const auto level = static_cast<std::size_t>(std::floor(frac * static_cast<double>(num_levels)));
  return std::min(level, num_levels - 1);
}

Hypervector EncodeWindow(const FeatureWindow& window, const ItemMemory& memory) {
  const std::size_t nf = memory.feature_names().size();
  const std::size_t nc = memory.channel_names().size();
  if (window.num_features != nf || window.num_channels() != nc) {
    throw InvalidArgument("feature window shape " + std::to_string(window.num_channels()) + "x" +
                          std::to_string(window.num_features) + " does not match item memory " +
                          std::to_string(nc) + "x" + std::to_string(nf));
  }
  const auto one = FixedWeight(1);
  auto term = [&](std::size_t c, std::size_t f) {
    const std::size_t level = Quantize(window.at(c, f), memory.bounds()[f], memory.num_levels());
    return Bind(memory.levels()[level], memory.feature_vectors()[f]);
  };

  Accumulator across_channels(memory.dim());
  if (memory.two_stage()) {
    for (std::size_t c = 0; c < nc; ++c) {
      Accumulator per_channel(memory.dim());
      for (std::size_t f = 0; f < nf; ++f) per_channel.Add(term(c, f), one);
      const Hypervector channel = Binarize(per_channel, memory.tie_break());
      across_channels.Add(Bind(channel, memory.channel_vectors()[c]), one);
    }
  } else {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t f = 0; f < nf; ++f) {
        across_channels.Add(Bind(term(c, f), memory.channel_vectors()[c]), one);
      }
    }
  }
  return Binarize(across_channels, memory.tie_break());
}

std::vector<Hypervector> EncodeWindows(std::span<const FeatureWindow> windows, const ItemMemory& memory,
                                       unsigned jobs) {
  std::vector<Hypervector> out(windows.size());
  ParallelFor(windows.size(), jobs, [&](std::size_t i) { out[i] = EncodeWindow(windows[i], memory); });
  return out;
}

void WriteItemMemory(std::ostream& out, const ItemMemory& memory) {
  out.write(kMagic, 4);
  binio::WriteU32(out, kVersion);
  binio::WriteU64(out, memory.dim());
  binio::WriteU64(out, memory.num_levels());
  binio::WriteU64(out, memory.feature_names().size());
  binio::WriteU64(out, memory.channel_names().size());
  binio::WriteU64(out, memory.seed());
  binio::WriteU8(out, memory.two_stage() ? 1 : 0);
  for (const auto& n : memory.feature_names()) binio::WriteString(out, n);
  for (const auto& n : memory.channel_names()) binio::WriteString(out, n);
  for (const auto& b : memory.bounds()) {
    binio::WriteF64(out, b.min);
    binio::WriteF64(out, b.max);
  }
  for (const auto& v : memory.feature_vectors()) WriteHypervector(out, v);
  for (const auto& v : memory.channel_vectors()) WriteHypervector(out, v);
  for (const auto& v : memory.levels().levels) WriteHypervector(out, v);
  WriteHypervector(out, memory.tie_break());
}

ItemMemory ReadItemMemory(std::istream& in) {
  char magic[4];
  binio::ReadBytes(in, magic, 4);
  if (!std::equal(magic, magic + 4, kMagic)) throw ParseError("not an item memory file", 0);
  const std::uint32_t version = binio::ReadU32(in);
  if (version != kVersion) throw ParseError("unsupported item memory version " + std::to_string(version), 4);

  ItemMemory im;
  im.dim_ = binio::ReadU64(in);
  const std::uint64_t levels = binio::ReadU64(in);
  const std::uint64_t nf = binio::ReadU64(in);
  const std::uint64_t nc = binio::ReadU64(in);
  im.seed_ = binio::ReadU64(in);
  im.two_stage_ = binio::ReadU8(in) != 0;
  if (im.dim_ == 0 || levels < 2 || nf == 0 || nc == 0 || nf > 100000 || nc > 100000 || levels > 100000) {
    throw ParseError("invalid item memory header", 8);
  }
  for (std::uint64_t i = 0; i < nf; ++i) im.feature_names_.push_back(binio::ReadString(in));
  for (std::uint64_t i = 0; i < nc; ++i) im.channel_names_.push_back(binio::ReadString(in));
  for (std::uint64_t i = 0; i < nf; ++i) {
    const double lo = binio::ReadF64(in);
    const double hi = binio::ReadF64(in);
    im.bounds_.push_back(Bounds{lo, hi});
  }
  auto read_vector = [&] {
    Hypervector v = ReadHypervector(in);
    if (v.dim() != im.dim_) throw ParseError("item vector dimension mismatch", static_cast<std::uint64_t>(in.tellg()));
    return v;
  };
  for (std::uint64_t i = 0; i < nf; ++i) im.feature_vectors_.push_back(read_vector());
  for (std::uint64_t i = 0; i < nc; ++i) im.channel_vectors_.push_back(read_vector());
  for (std::uint64_t i = 0; i < levels; ++i) im.levels_.levels.push_back(read_vector());
  im.tie_break_ = read_vector();
  return im;
}

}  // namespace hdseizure

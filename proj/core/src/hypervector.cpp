#include "hdseizure/hypervector.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

#include "hdseizure/binary_io.hpp"
#include "hdseizure/errors.hpp"
#include "hdseizure/random.hpp"

namespace hdseizure {
namespace {

void CheckSameDim(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionMismatch(a, b);
}

// Clears padding bits past dim in the final word.
void MaskTail(std::span<std::uint64_t> words, std::size_t dim) {
  const std::size_t rem = dim % Hypervector::kWordBits;
  if (rem != 0 && !words.empty()) {
    words.back() &= (std::uint64_t{1} << rem) - 1;
  }
}

}  // namespace

Hypervector::Hypervector(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("hypervector dimension must be positive");
  words_.assign((dim + kWordBits - 1) / kWordBits, 0);
}

std::size_t Hypervector::Popcount() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

Hypervector RandomHypervector(std::size_t dim, std::uint64_t seed) {
  Hypervector v(dim);
  std::mt19937_64 rng(seed);
  for (auto& w : v.mutable_words()) w = rng();
  MaskTail(v.mutable_words(), dim);
  return v;
}

Hypervector Bind(const Hypervector& a, const Hypervector& b) {
  CheckSameDim(a.dim(), b.dim());
  Hypervector out(a.dim());
  auto dst = out.mutable_words();
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = wa[i] ^ wb[i];
  return out;
}

Hypervector Complement(const Hypervector& a) {
  Hypervector out(a.dim());
  auto dst = out.mutable_words();
  auto src = a.words();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = ~src[i];
  MaskTail(dst, a.dim());
  return out;
}

std::size_t HammingDistance(const Hypervector& a, const Hypervector& b) {
  CheckSameDim(a.dim(), b.dim());
  auto wa = a.words();
  auto wb = b.words();
  std::size_t d = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

double Similarity(const Hypervector& a, const Hypervector& b) {
  return 1.0 - static_cast<double>(HammingDistance(a, b)) / static_cast<double>(a.dim());
}

FixedWeight FixedWeight::FromDouble(double value, std::int32_t scale) {
  if (!std::isfinite(value)) throw InvalidArgument("non-finite weight");
  return FixedWeight(std::llround(value * scale));
}

Accumulator::Accumulator(std::size_t dim, std::int32_t scale) : scale_(scale) {
  if (dim == 0) throw InvalidArgument("accumulator dimension must be positive");
  if (scale <= 0) throw InvalidArgument("fixed-point scale must be positive");
  counts_.assign(dim, 0);
}

void Accumulator::Add(const Hypervector& v, FixedWeight weight, int sign) {
  CheckSameDim(counts_.size(), v.dim());
  if (weight.raw() < 0) throw InvalidArgument("accumulate weight must be non-negative");
  if (sign != 1 && sign != -1) throw InvalidArgument("accumulate sign must be +1 or -1");
  if (magnitude_ + weight.raw() > std::numeric_limits<std::int32_t>::max()) {
    throw Error("accumulator counter overflow");
  }
  ++updates_;
  n_added_ += sign * weight.raw();
  magnitude_ += weight.raw();
  if (weight.raw() == 0) return;

  const auto delta = static_cast<std::int32_t>(sign * weight.raw());
  // Nibble lookup of +-delta patterns keeps the inner loop a plain vector add.
  std::int32_t lut[16][4];
  for (int n = 0; n < 16; ++n) {
    for (int k = 0; k < 4; ++k) lut[n][k] = ((n >> k) & 1) != 0 ? delta : -delta;
  }
  auto words = v.words();
  const std::size_t dim = counts_.size();
  const std::size_t full = dim / Hypervector::kWordBits;
  std::int32_t* counts = counts_.data();
  for (std::size_t w = 0; w < full; ++w) {
    const std::uint64_t bits = words[w];
    std::int32_t* dst = counts + w * Hypervector::kWordBits;
    for (std::size_t nib = 0; nib < 16; ++nib) {
      const std::int32_t* l = lut[(bits >> (4 * nib)) & 15U];
      for (std::size_t k = 0; k < 4; ++k) dst[4 * nib + k] += l[k];
    }
  }
  for (std::size_t i = full * Hypervector::kWordBits; i < dim; ++i) {
    const auto bit = static_cast<std::int32_t>((words[i / Hypervector::kWordBits] >> (i % Hypervector::kWordBits)) & 1U);
    counts[i] += (2 * bit - 1) * delta;
  }
}

void Accumulator::Merge(const Accumulator& other) {
  CheckSameDim(counts_.size(), other.counts_.size());
  if (scale_ != other.scale_) throw InvalidArgument("cannot merge accumulators with different scales");
  if (magnitude_ + other.magnitude_ > std::numeric_limits<std::int32_t>::max()) {
    throw Error("accumulator counter overflow");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  n_added_ += other.n_added_;
  magnitude_ += other.magnitude_;
  updates_ += std::max<std::uint64_t>(other.updates_, 1);
}

Hypervector Binarize(const Accumulator& acc, const Hypervector& tie_break) {
  if (acc.empty()) throw InvalidArgument("cannot binarize an empty accumulator");
  CheckSameDim(acc.dim(), tie_break.dim());
  Hypervector out(acc.dim());
  auto counts = acc.counts();
  auto ties = tie_break.words();
  auto dst = out.mutable_words();
  for (std::size_t w = 0; w < dst.size(); ++w) {
    const std::size_t base = w * Hypervector::kWordBits;
    const std::size_t n = std::min(Hypervector::kWordBits, counts.size() - base);
    std::uint64_t pos = 0;
    std::uint64_t zero = 0;
    std::size_t b = 0;
#if defined(__SSE2__)
    const __m128i z = _mm_setzero_si128();
    for (; b + 4 <= n; b += 4) {
      const __m128i c = _mm_loadu_si128(reinterpret_cast<const __m128i*>(counts.data() + base + b));
      const auto gt = static_cast<unsigned>(_mm_movemask_ps(_mm_castsi128_ps(_mm_cmpgt_epi32(c, z))));
      const auto eq = static_cast<unsigned>(_mm_movemask_ps(_mm_castsi128_ps(_mm_cmpeq_epi32(c, z))));
      pos |= static_cast<std::uint64_t>(gt) << b;
      zero |= static_cast<std::uint64_t>(eq) << b;
    }
#endif
    for (; b < n; ++b) {
      const std::int32_t c = counts[base + b];
      pos |= static_cast<std::uint64_t>(c > 0) << b;
      zero |= static_cast<std::uint64_t>(c == 0) << b;
    }
    dst[w] = pos | (zero & ties[w]);
  }
  return out;
}

LevelTable BuildLevelTable(std::size_t dim, std::size_t num_levels, std::uint64_t seed) {
  if (num_levels < 2) throw InvalidArgument("level table needs at least 2 levels");
  if (dim == 0) throw InvalidArgument("hypervector dimension must be positive");
  const std::size_t block = dim / (2 * (num_levels - 1));
  if (block == 0) {
    throw InvalidArgument("dimension " + std::to_string(dim) + " too small for " +
                          std::to_string(num_levels) + " disjoint level blocks");
  }
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(DeriveSeed(seed, 0x1e7e1));
  Shuffle(std::span<std::size_t>(order), rng);

  LevelTable table;
  table.levels.reserve(num_levels);
  table.levels.push_back(RandomHypervector(dim, DeriveSeed(seed, 0x1e7e0)));
  for (std::size_t k = 1; k < num_levels; ++k) {
    Hypervector next = table.levels.back();
    for (std::size_t i = (k - 1) * block; i < k * block; ++i) next.Flip(order[i]);
    table.levels.push_back(std::move(next));
  }
  return table;
}

void WriteHypervector(std::ostream& out, const Hypervector& v) {
  binio::WriteU64(out, v.dim());
  auto words = v.words();
  for (std::size_t byte = 0; byte < v.PackedBytes(); ++byte) {
    binio::WriteU8(out, static_cast<std::uint8_t>(words[byte / 8] >> (8 * (byte % 8))));
  }
}

Hypervector ReadHypervector(std::istream& in) {
  const auto offset = static_cast<std::uint64_t>(std::max<std::streamoff>(in.tellg(), 0));
  const std::uint64_t dim = binio::ReadU64(in);
  if (dim == 0 || dim > (std::uint64_t{1} << 32)) {
    throw ParseError("invalid hypervector dimension " + std::to_string(dim), offset);
  }
  Hypervector v(dim);
  std::vector<char> bytes(v.PackedBytes());
  binio::ReadBytes(in, bytes.data(), bytes.size());
  auto words = v.mutable_words();
  for (std::size_t byte = 0; byte < bytes.size(); ++byte) {
    words[byte / 8] |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[byte]))
                       << (8 * (byte % 8));
  }
  if (words.back() != (words.back() & ((dim % 64 == 0) ? ~0ULL : ((1ULL << (dim % 64)) - 1)))) {
    throw ParseError("hypervector has bits set past its dimension", offset);
  }
  return v;
}

void WriteAccumulator(std::ostream& out, const Accumulator& acc) {
  binio::WriteU64(out, acc.dim());
  binio::WriteI32(out, acc.scale());
  binio::WriteI64(out, acc.n_added().raw());
  for (auto c : acc.counts()) binio::WriteI32(out, c);
}

Accumulator ReadAccumulator(std::istream& in) {
  const auto offset = static_cast<std::uint64_t>(std::max<std::streamoff>(in.tellg(), 0));
  const std::uint64_t dim = binio::ReadU64(in);
  const std::int32_t scale = binio::ReadI32(in);
  if (dim == 0 || dim > (std::uint64_t{1} << 32) || scale <= 0) {
    throw ParseError("invalid accumulator header", offset);
  }
  Accumulator acc(dim, scale);
  acc.n_added_ = binio::ReadI64(in);
  bool any = acc.n_added_ != 0;
  for (auto& c : acc.counts_) {
    c = binio::ReadI32(in);
    acc.magnitude_ = std::max<std::int64_t>(acc.magnitude_, std::abs(static_cast<std::int64_t>(c)));
    any = any || c != 0;
  }
  acc.magnitude_ = std::max(acc.magnitude_, std::abs(acc.n_added_));
  acc.updates_ = any ? 1 : 0;
  return acc;
}

std::size_t SerializedSize(const Hypervector& v) noexcept { return 8 + v.PackedBytes(); }
std::size_t SerializedSize(const Accumulator& acc) noexcept { return 8 + 4 + 8 + 4 * acc.dim(); }

}  // namespace hdseizure

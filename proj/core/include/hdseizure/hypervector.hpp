#pragma once

// Binary hypervector algebra: bit-packed vectors, XOR binding, fixed-point
// accumulators with majority-vote binarization, and normalized Hamming
// similarity.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace hdseizure {

inline constexpr std::size_t kDefaultDim = 10000;
inline constexpr std::int32_t kFixedScale = 1000;

class Hypervector {
 public:
  static constexpr std::size_t kWordBits = 64;

  Hypervector() = default;
  // All-zero vector of `dim` bits. Throws InvalidArgument for dim == 0.
  explicit Hypervector(std::size_t dim);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] bool empty() const noexcept { return dim_ == 0; }

  [[nodiscard]] bool Get(std::size_t i) const noexcept {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
  }
  void Set(std::size_t i, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }
  void Flip(std::size_t i) noexcept { words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits); }

  [[nodiscard]] std::size_t Popcount() const noexcept;

  // Bits past dim() in the last word are always zero.
  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
  [[nodiscard]] std::span<std::uint64_t> mutable_words() noexcept { return words_; }

  // Number of bytes used by the packed payload (ceil(dim / 8)).
  [[nodiscard]] std::size_t PackedBytes() const noexcept { return (dim_ + 7) / 8; }

  friend bool operator==(const Hypervector&, const Hypervector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;
};

// Each bit independently 0/1 with probability 1/2, deterministic in seed.
Hypervector RandomHypervector(std::size_t dim, std::uint64_t seed);

Hypervector Bind(const Hypervector& a, const Hypervector& b);
Hypervector Complement(const Hypervector& a);
std::size_t HammingDistance(const Hypervector& a, const Hypervector& b);
// 1 - hamming / dim, in [0, 1].
double Similarity(const Hypervector& a, const Hypervector& b);

// Signed fixed-point weight. raw == value * scale (scale defaults to 1000).
class FixedWeight {
 public:
  constexpr FixedWeight() = default;
  constexpr explicit FixedWeight(std::int64_t raw) : raw_(raw) {}

  static FixedWeight FromDouble(double value, std::int32_t scale = kFixedScale);
  static constexpr FixedWeight One(std::int32_t scale = kFixedScale) { return FixedWeight(scale); }

  [[nodiscard]] constexpr std::int64_t raw() const noexcept { return raw_; }
  [[nodiscard]] double ToDouble(std::int32_t scale = kFixedScale) const noexcept {
    return static_cast<double>(raw_) / scale;
  }

  friend constexpr auto operator<=>(FixedWeight, FixedWeight) = default;

 private:
  std::int64_t raw_ = 0;
};

// Per-bit signed counters of an un-normalized bundle. Bit 1 contributes
// +weight and bit 0 contributes -weight.
class Accumulator {
 public:
  Accumulator() = default;
  explicit Accumulator(std::size_t dim, std::int32_t scale = kFixedScale);

  // counts[i] += sign * weight * (2 * v[i] - 1). sign must be +1 or -1 and
  // weight non-negative.
  void Add(const Hypervector& v, FixedWeight weight, int sign = +1);
  // Element-wise sum of another accumulator (used when merging centroids).
  void Merge(const Accumulator& other);

  [[nodiscard]] std::size_t dim() const noexcept { return counts_.size(); }
  [[nodiscard]] std::int32_t scale() const noexcept { return scale_; }
  [[nodiscard]] FixedWeight n_added() const noexcept { return FixedWeight(n_added_); }
  [[nodiscard]] std::span<const std::int32_t> counts() const noexcept { return counts_; }
  // True until the first Add/Merge (or, after deserialization, when every
  // counter and n_added are zero).
  [[nodiscard]] bool empty() const noexcept { return updates_ == 0; }

  friend bool operator==(const Accumulator& a, const Accumulator& b) {
    return a.scale_ == b.scale_ && a.n_added_ == b.n_added_ && a.counts_ == b.counts_;
  }

 private:
  friend Accumulator ReadAccumulator(std::istream& in);

  std::int32_t scale_ = kFixedScale;
  std::int64_t n_added_ = 0;
  // Sum of |weight| over all updates; bounds every |counts[i]|.
  std::int64_t magnitude_ = 0;
  std::uint64_t updates_ = 0;
  std::vector<std::int32_t> counts_;
};

// Majority vote: bit = counts > 0, zero counters take the tie-break bit.
// Throws InvalidArgument on an accumulator that never received an update.
Hypervector Binarize(const Accumulator& acc, const Hypervector& tie_break);

// Ordered magnitude vectors. levels[k] differs from levels[k-1] in one
// disjoint block of floor(dim / (2 * (num_levels - 1))) bits.
struct LevelTable {
  std::vector<Hypervector> levels;

  [[nodiscard]] std::size_t num_levels() const noexcept { return levels.size(); }
  [[nodiscard]] const Hypervector& operator[](std::size_t k) const { return levels.at(k); }
  friend bool operator==(const LevelTable&, const LevelTable&) = default;
};

inline constexpr std::size_t kDefaultNumLevels = 20;

LevelTable BuildLevelTable(std::size_t dim, std::size_t num_levels, std::uint64_t seed);

// Binary formats (little-endian):
//   hypervector: u64 dim, ceil(dim/8) bytes, LSB-first bit order.
//   accumulator: u64 dim, i32 scale, i64 n_added, dim x i32 counts.
void WriteHypervector(std::ostream& out, const Hypervector& v);
Hypervector ReadHypervector(std::istream& in);
void WriteAccumulator(std::ostream& out, const Accumulator& acc);
Accumulator ReadAccumulator(std::istream& in);

std::size_t SerializedSize(const Hypervector& v) noexcept;
std::size_t SerializedSize(const Accumulator& acc) noexcept;

}  // namespace hdseizure

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "hdseizure/dataio.hpp"
#include "hdseizure/errors.hpp"

namespace hdseizure {
namespace {

constexpr std::size_t kMainHeaderBytes = 256;
constexpr std::size_t kSignalHeaderBytes = 256;

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c) && c != '\0'; };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// Fixed-width ASCII field reader that tracks the byte offset for errors.
class FieldReader {
 public:
  FieldReader(std::string_view buf, std::uint64_t base) : buf_(buf), base_(base) {}

  std::string Text(std::size_t width) {
    if (pos_ + width > buf_.size()) throw ParseError("EDF header truncated", base_ + pos_);
    std::string s(buf_.substr(pos_, width));
    pos_ += width;
    return Trim(s);
  }
  double Real(std::size_t width, const char* what) {
    const std::uint64_t at = base_ + pos_;
    const std::string s = Text(width);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("EDF field '") + what + "' is not a number: '" + s + "'", at);
    }
  }
  std::int64_t Integer(std::size_t width, const char* what) {
    const std::uint64_t at = base_ + pos_;
    const std::string s = Text(width);
    std::int64_t v = 0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw ParseError(std::string("EDF field '") + what + "' is not an integer: '" + s + "'", at);
    }
    return v;
  }
  [[nodiscard]] std::uint64_t offset() const noexcept { return base_ + pos_; }

 private:
  std::string_view buf_;
  std::uint64_t base_;
  std::size_t pos_ = 0;
};

std::string ReadBlock(std::istream& in, std::size_t n, std::uint64_t offset) {
  std::string buf(n, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw ParseError("EDF header truncated: expected " + std::to_string(n) + " bytes", offset);
  }
  return buf;
}

std::string Upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

const std::vector<std::string>& DefaultBipolarMontage() {
  static const std::vector<std::string> kMontage{
      "FP1-F7", "F7-T7", "T7-P7", "P7-O1", "FP1-F3", "F3-C3", "C3-P3", "P3-O1", "FP2-F4",
      "F4-C4",  "C4-P4", "P4-O2", "FP2-F8", "F8-T8", "T8-P8", "P8-O2", "FZ-CZ", "CZ-PZ"};
  return kMontage;
}

EdfHeader ParseEdfHeader(std::istream& in) {
  const std::string main = ReadBlock(in, kMainHeaderBytes, 0);
  FieldReader f(main, 0);
  const std::string version = f.Text(8);
  if (version != "0") throw ParseError("not an EDF file (version field '" + version + "')", 0);
  f.Text(80);  // patient
  f.Text(80);  // recording
  f.Text(8);   // start date
  f.Text(8);   // start time
  EdfHeader h;
  h.header_bytes = f.Integer(8, "header bytes");
  f.Text(44);  // reserved
  h.num_records = f.Integer(8, "number of data records");
  h.record_duration_sec = f.Real(8, "record duration");
  const std::int64_t ns = f.Integer(4, "number of signals");
  if (ns <= 0 || ns > 4096) throw ParseError("invalid number of signals " + std::to_string(ns), 252);
  const auto n = static_cast<std::size_t>(ns);
  if (h.header_bytes != static_cast<std::int64_t>(kMainHeaderBytes + n * kSignalHeaderBytes)) {
    throw ParseError("header byte count " + std::to_string(h.header_bytes) + " inconsistent with " +
                         std::to_string(n) + " signals",
                     184);
  }
  if (!(h.record_duration_sec > 0.0)) throw ParseError("record duration must be positive", 244);

  const std::string sig = ReadBlock(in, n * kSignalHeaderBytes, kMainHeaderBytes);
  FieldReader s(sig, kMainHeaderBytes);
  h.signals.resize(n);
  for (auto& x : h.signals) x.label = s.Text(16);
  for (std::size_t i = 0; i < n; ++i) s.Text(80);  // transducer
  for (auto& x : h.signals) x.physical_dimension = s.Text(8);
  for (auto& x : h.signals) x.physical_min = s.Real(8, "physical minimum");
  for (auto& x : h.signals) x.physical_max = s.Real(8, "physical maximum");
  for (auto& x : h.signals) x.digital_min = s.Integer(8, "digital minimum");
  for (auto& x : h.signals) x.digital_max = s.Integer(8, "digital maximum");
  for (std::size_t i = 0; i < n; ++i) s.Text(80);  // prefiltering
  for (auto& x : h.signals) x.samples_per_record = s.Integer(8, "samples per record");
  for (std::size_t i = 0; i < n; ++i) s.Text(32);  // reserved
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = h.signals[i];
    if (x.digital_max <= x.digital_min) {
      throw ParseError("signal '" + x.label + "' has digital max <= digital min", kMainHeaderBytes);
    }
    if (x.samples_per_record <= 0) {
      throw ParseError("signal '" + x.label + "' has no samples per record", kMainHeaderBytes);
    }
  }
  return h;
}

Recording ReadEdf(std::istream& in, const std::vector<std::string>& channels) {
  const EdfHeader h = ParseEdfHeader(in);
  const std::size_t ns = h.signals.size();
  std::size_t record_samples = 0;
  for (const auto& s : h.signals) record_samples += static_cast<std::size_t>(s.samples_per_record);
  const std::size_t record_bytes = 2 * record_samples;

  // Number of records: from the header, or inferred when it says -1.
  std::int64_t records = h.num_records;
  const auto data_start = static_cast<std::uint64_t>(h.header_bytes);
  if (records < 0) {
    in.seekg(0, std::ios::end);
    const auto end = static_cast<std::uint64_t>(in.tellg());
    records = static_cast<std::int64_t>((end - data_start) / record_bytes);
    in.seekg(static_cast<std::streamoff>(data_start));
  }

  std::vector<std::vector<double>> raw(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    raw[i].reserve(static_cast<std::size_t>(records * h.signals[i].samples_per_record));
  }
  std::vector<unsigned char> buf(record_bytes);
  for (std::int64_t r = 0; r < records; ++r) {
    const std::uint64_t offset = data_start + static_cast<std::uint64_t>(r) * record_bytes;
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(record_bytes));
    if (static_cast<std::size_t>(in.gcount()) != record_bytes) {
      throw ParseError("EDF data record " + std::to_string(r) + " truncated (header declares " +
                           std::to_string(records) + " records of " + std::to_string(record_bytes) + " bytes)",
                       offset + static_cast<std::uint64_t>(in.gcount()));
    }
    std::size_t pos = 0;
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& sig = h.signals[i];
      const double gain = (sig.physical_max - sig.physical_min) /
                          static_cast<double>(sig.digital_max - sig.digital_min);
      for (std::int64_t k = 0; k < sig.samples_per_record; ++k, pos += 2) {
        const auto digital = static_cast<std::int16_t>(static_cast<std::uint16_t>(buf[pos] | (buf[pos + 1] << 8)));
        raw[i].push_back(sig.physical_min + (static_cast<double>(digital) - static_cast<double>(sig.digital_min)) * gain);
      }
    }
  }

  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    const std::string want = Upper(name);
    for (std::size_t i = 0; i < ns; ++i) {
      if (Upper(h.signals[i].label) == want) return i;
    }
    return std::nullopt;
  };

  Recording rec;
  std::vector<std::string> names = channels;
  if (names.empty()) {
    for (const auto& s : h.signals) names.push_back(s.label);
  }
  std::optional<std::int64_t> spr;
  for (const auto& name : names) {
    std::vector<double> series;
    std::int64_t this_spr = 0;
    if (auto idx = find(name)) {
      series = raw[*idx];
      this_spr = h.signals[*idx].samples_per_record;
    } else {
      const auto dash = name.find('-');
      std::optional<std::size_t> a;
      std::optional<std::size_t> b;
      if (dash != std::string::npos) {
        a = find(name.substr(0, dash));
        b = find(name.substr(dash + 1));
      }
      if (!a || !b || h.signals[*a].samples_per_record != h.signals[*b].samples_per_record) {
        throw ParseError("channel '" + name + "' not present in EDF and not derivable", kMainHeaderBytes);
      }
      series.resize(raw[*a].size());
      for (std::size_t k = 0; k < series.size(); ++k) series[k] = raw[*a][k] - raw[*b][k];
      this_spr = h.signals[*a].samples_per_record;
    }
    if (spr && *spr != this_spr) {
      throw ParseError("selected channels have different sampling rates", kMainHeaderBytes);
    }
    spr = this_spr;
    rec.channels.push_back(name);
    rec.samples.push_back(std::move(series));
  }
  rec.fs = static_cast<double>(spr.value_or(0)) / h.record_duration_sec;
  return rec;
}

Recording ReadEdf(const std::filesystem::path& path, const std::vector<std::string>& channels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open EDF file " + path.string());
  try {
    return ReadEdf(in, channels);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.offset());
  }
}

}  // namespace hdseizure

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hdseizure/dataio.hpp"
#include "hdseizure/errors.hpp"

namespace hdseizure {
namespace {

constexpr double kTimeJitterSec = 1e-6;

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseDouble(const std::string& s, std::uint64_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("expected a number, got '" + s + "'", line);
  }
  return v;
}

// Shortest representation that round-trips exactly.
void AppendDouble(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::ifstream OpenText(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

Recording ReadCsvRecording(const std::filesystem::path& path) {
  auto in = OpenText(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header row", 1);
  const auto header = SplitCsv(line);
  if (header.size() < 2) throw ParseError(path.string() + ": need a time column and at least one channel", 1);

  Recording rec;
  rec.channels.assign(header.begin() + 1, header.end());
  rec.samples.resize(rec.channels.size());
  std::vector<double> times;
  std::uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitCsv(line);
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ": expected " + std::to_string(header.size()) + " fields", line_no);
    }
    times.push_back(ParseDouble(fields[0], line_no));
    for (std::size_t c = 1; c < fields.size(); ++c) rec.samples[c - 1].push_back(ParseDouble(fields[c], line_no));
  }
  if (times.size() < 2) throw ParseError(path.string() + ": need at least two samples to infer fs", line_no);
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw ParseError(path.string() + ": time column must increase", 2);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = times.front() + static_cast<double>(i) * dt;
    if (std::abs(times[i] - expected) > kTimeJitterSec) {
      throw ParseError(path.string() + ": non-uniform sampling at t=" + std::to_string(times[i]), i + 2);
    }
  }
  rec.fs = 1.0 / dt;
  // Snap to the nearest 1e-6 Hz so 1/(1/fs) noise does not leak into fs.
  rec.fs = std::round(rec.fs * 1e6) / 1e6;
  return rec;
}

void WriteCsvRecording(const std::filesystem::path& path, const Recording& rec) {
  ValidateRecording(rec);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  std::string buf = "time";
  for (const auto& c : rec.channels) buf += "," + c;
  buf += '\n';
  for (std::size_t i = 0; i < rec.num_samples(); ++i) {
    AppendDouble(buf, static_cast<double>(i) / rec.fs);
    for (const auto& s : rec.samples) {
      buf += ',';
      AppendDouble(buf, s[i]);
    }
    buf += '\n';
    if (buf.size() > (1U << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

std::vector<AnnotationRow> ReadAnnotations(const std::filesystem::path& path) {
  auto in = OpenText(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header row", 1);
  const auto header = SplitCsv(line);
  const bool full = header.size() == 4;
  if (!full && header.size() != 2) {
    throw ParseError(path.string() + ": expected subject_id,file,start_sec,end_sec or start_sec,end_sec", 1);
  }
  std::vector<AnnotationRow> rows;
  std::uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = SplitCsv(line);
    if (f.size() != header.size()) throw ParseError(path.string() + ": wrong field count", line_no);
    AnnotationRow row;
    std::size_t k = 0;
    if (full) {
      row.subject_id = f[0];
      row.file = f[1];
      k = 2;
    }
    row.interval = Interval{ParseDouble(f[k], line_no), ParseDouble(f[k + 1], line_no)};
    if (!(row.interval.start_sec < row.interval.end_sec)) {
      throw ParseError(path.string() + ": annotation start must precede end", line_no);
    }
    rows.push_back(std::move(row));
  }
  std::map<std::pair<std::string, std::string>, std::vector<Interval>> groups;
  for (const auto& r : rows) groups[{r.subject_id, r.file}].push_back(r.interval);
  for (auto& [key, ivs] : groups) {
    std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) { return a.start_sec < b.start_sec; });
    for (std::size_t i = 1; i < ivs.size(); ++i) {
      if (ivs[i].start_sec < ivs[i - 1].end_sec) {
        throw InvalidArgument(path.string() + ": overlapping annotations in " + key.first + "/" + key.second);
      }
    }
  }
  return rows;
}

void WriteAnnotations(const std::filesystem::path& path, const std::vector<AnnotationRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  std::string buf = "subject_id,file,start_sec,end_sec\n";
  for (const auto& r : rows) {
    buf += r.subject_id + "," + r.file + ",";
    AppendDouble(buf, r.interval.start_sec);
    buf += ',';
    AppendDouble(buf, r.interval.end_sec);
    buf += '\n';
  }
  out << buf;
}

void WriteFeatureCsv(const std::filesystem::path& path, const std::vector<std::string>& channels,
                     const std::vector<std::string>& features, const std::vector<FeatureWindow>& windows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  std::string buf = "t_start,t_end,label";
  for (const auto& c : channels) {
    for (const auto& f : features) buf += "," + c + "." + f;
  }
  buf += '\n';
  for (const auto& w : windows) {
    if (w.num_features != features.size() || w.num_channels() != channels.size()) {
      throw InvalidArgument("feature window shape does not match CSV columns");
    }
    AppendDouble(buf, w.t_start);
    buf += ',';
    AppendDouble(buf, w.t_end);
    buf += ',';
    buf += std::to_string(w.label);
    for (double v : w.values) {
      buf += ',';
      AppendDouble(buf, v);
    }
    buf += '\n';
  }
  out << buf;
}

FeatureTable ReadFeatureCsv(const std::filesystem::path& path) {
  auto in = OpenText(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header row", 1);
  const auto header = SplitCsv(line);
  if (header.size() < 4 || header[0] != "t_start" || header[1] != "t_end" || header[2] != "label") {
    throw ParseError(path.string() + ": not a feature CSV", 1);
  }
  FeatureTable t;
  for (std::size_t i = 3; i < header.size(); ++i) {
    const auto dot = header[i].find('.');
    if (dot == std::string::npos) throw ParseError(path.string() + ": column '" + header[i] + "' lacks channel.", 1);
    const std::string ch = header[i].substr(0, dot);
    const std::string feat = header[i].substr(dot + 1);
    if (t.channels.empty() || t.channels.back() != ch) t.channels.push_back(ch);
    if (t.channels.size() == 1) t.features.push_back(feat);
  }
  if (t.channels.size() * t.features.size() != header.size() - 3) {
    throw ParseError(path.string() + ": columns are not a channel x feature grid", 1);
  }
  std::uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = SplitCsv(line);
    if (f.size() != header.size()) throw ParseError(path.string() + ": wrong field count", line_no);
    FeatureWindow w;
    w.t_start = ParseDouble(f[0], line_no);
    w.t_end = ParseDouble(f[1], line_no);
    const double label = ParseDouble(f[2], line_no);
    if (label != 0.0 && label != 1.0) throw ParseError(path.string() + ": label must be 0 or 1", line_no);
    w.label = static_cast<int>(label);
    w.num_features = t.features.size();
    w.values.reserve(f.size() - 3);
    for (std::size_t i = 3; i < f.size(); ++i) w.values.push_back(ParseDouble(f[i], line_no));
    t.windows.push_back(std::move(w));
  }
  return t;
}

}  // namespace hdseizure

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>

#include "hdseizure/dataio.hpp"
#include "hdseizure/errors.hpp"
#include "hdseizure/parallel.hpp"
#include "hdseizure/random.hpp"

namespace hdseizure {
namespace {

// FNV-1a; std::hash is not stable across standard libraries.
std::uint64_t StableHash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<SeizureSelection> SelectDatasetWindows(const std::vector<Recording>& recordings,
                                                   const std::string& subject_id, const DatasetOptions& options) {
  if (!(options.ratio >= 0.0)) throw InvalidArgument("non-seizure ratio must be non-negative");
  std::vector<std::vector<WindowSpan>> windows;
  windows.reserve(recordings.size());
  for (const auto& rec : recordings) {
    ValidateRecording(rec);
    windows.push_back(EnumerateWindows(rec, options.window_sec, options.step_sec));
  }

  std::vector<SelectedWindow> pool;
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    for (const auto& w : windows[r]) {
      const double mid = 0.5 * (w.t_start + w.t_end);
      const bool excluded = std::any_of(recordings[r].annotations.begin(), recordings[r].annotations.end(),
                                        [&](const Interval& iv) {
                                          return mid >= iv.start_sec - options.pre_exclusion_sec &&
                                                 mid < iv.end_sec + options.post_exclusion_sec;
                                        });
      if (!excluded) pool.push_back({r, w});
    }
  }

  std::vector<SeizureSelection> out;
  const std::uint64_t subject_seed = DeriveSeed(options.seed, StableHash(subject_id));
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    auto seizures = recordings[r].annotations;
    std::sort(seizures.begin(), seizures.end(),
              [](const Interval& a, const Interval& b) { return a.start_sec < b.start_sec; });
    for (const auto& sz : seizures) {
      SeizureSelection sel;
      sel.recording = r;
      sel.seizure = sz;
      for (const auto& w : windows[r]) {
        if (sz.Contains(0.5 * (w.t_start + w.t_end))) sel.windows.push_back({r, w});
      }
      sel.ictal = sel.windows.size();
      const auto need = static_cast<std::size_t>(std::llround(options.ratio * static_cast<double>(sel.ictal)));
      if (need > pool.size()) {
        throw InsufficientData("subject " + subject_id + ", seizure " + std::to_string(out.size()) + ": needs " +
                               std::to_string(need) + " non-seizure windows but only " +
                               std::to_string(pool.size()) + " remain after exclusion (deficit " +
                               std::to_string(need - pool.size()) + ")");
      }
      std::mt19937_64 rng(DeriveSeed(subject_seed, 0x5e1, out.size()));
      for (std::size_t i = 0; i < need; ++i) {
        std::swap(pool[i], pool[i + UniformBelow(rng, pool.size() - i)]);
      }
      sel.windows.insert(sel.windows.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(need));
      pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(need));
      std::sort(sel.windows.begin(), sel.windows.end(), [](const SelectedWindow& a, const SelectedWindow& b) {
        return a.recording != b.recording ? a.recording < b.recording : a.span.t_start < b.span.t_start;
      });
      out.push_back(std::move(sel));
    }
  }
  return out;
}

SubjectDataset BuildDataset(const std::vector<Recording>& recordings, const std::string& subject_id,
                            const FeatureRegistry& registry, const DatasetOptions& options, unsigned jobs) {
  if (recordings.empty()) throw InvalidArgument("subject " + subject_id + " has no recordings");
  const auto& channels = recordings.front().channels;
  for (const auto& rec : recordings) {
    if (rec.channels != channels) throw InvalidArgument("subject " + subject_id + ": recordings differ in channels");
    if (static_cast<std::size_t>(std::lround(options.window_sec * rec.fs)) < registry.MinWindowSamples(rec.fs)) {
      throw InvalidArgument("window too short for the feature registry");
    }
  }
  const auto selections = SelectDatasetWindows(recordings, subject_id, options);

  SubjectDataset ds;
  ds.subject_id = subject_id;
  ds.ratio = options.ratio;
  ds.step_sec = options.step_sec;
  ds.channels = channels;
  ds.features = registry.names();
  if (selections.empty()) throw InvalidArgument("subject " + subject_id + " has no annotated seizures");
  if (selections.size() == 1) {
    ds.warnings.push_back("subject " + subject_id + " has a single seizure; cross-validation degenerates");
  }

  std::vector<std::pair<std::size_t, std::size_t>> jobs_list;
  for (std::size_t f = 0; f < selections.size(); ++f) {
    SeizureFile file;
    file.seizure_index = f;
    file.source_recording = selections[f].recording;
    file.seizure = selections[f].seizure;
    file.ictal_windows = selections[f].ictal;
    file.non_ictal_windows = selections[f].windows.size() - selections[f].ictal;
    file.windows.resize(selections[f].windows.size());
    for (std::size_t i = 0; i < selections[f].windows.size(); ++i) {
      file.window_recordings.push_back(selections[f].windows[i].recording);
      jobs_list.emplace_back(f, i);
    }
    ds.files.push_back(std::move(file));
  }
  ParallelFor(jobs_list.size(), jobs, [&](std::size_t j) {
    const auto [f, i] = jobs_list[j];
    const SelectedWindow& sw = selections[f].windows[i];
    ds.files[f].windows[i] =
        FeatureWindow{sw.span.t_start, sw.span.t_end, sw.span.label, registry.size(),
                      ComputeWindowFeatures(recordings[sw.recording], sw.span.first_sample, sw.span.num_samples,
                                            registry)};
  });
  return ds;
}

std::vector<std::filesystem::path> WriteDataset(const std::filesystem::path& root, const SubjectDataset& dataset) {
  const auto dir = root / dataset.subject_id;
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (std::size_t k = 0; k < dataset.files.size(); ++k) {
    const auto path = dir / ("seiz" + std::to_string(k) + ".csv");
    WriteFeatureCsv(path, dataset.channels, dataset.features, dataset.files[k].windows);
    paths.push_back(path);
  }
  return paths;
}

SubjectDataset ReadDataset(const std::filesystem::path& root, const std::string& subject_id, double step_sec) {
  const auto dir = root / subject_id;
  if (!std::filesystem::is_directory(dir)) throw Error("dataset directory " + dir.string() + " not found");
  static const std::regex kName(R"(seiz(\d+)\.csv)");
  std::vector<std::pair<std::size_t, std::filesystem::path>> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, kName)) found.emplace_back(std::stoul(m[1].str()), entry.path());
  }
  std::sort(found.begin(), found.end());
  if (found.empty()) throw Error("no seiz<k>.csv files under " + dir.string());

  SubjectDataset ds;
  ds.subject_id = subject_id;
  ds.step_sec = step_sec;
  for (const auto& [k, path] : found) {
    FeatureTable t = ReadFeatureCsv(path);
    if (ds.files.empty()) {
      ds.channels = t.channels;
      ds.features = t.features;
    } else if (t.channels != ds.channels || t.features != ds.features) {
      throw ParseError(path.string() + ": columns differ from the first seizure file", 1);
    }
    SeizureFile file;
    file.seizure_index = k;
    for (const auto& w : t.windows) file.ictal_windows += static_cast<std::size_t>(w.label);
    file.non_ictal_windows = t.windows.size() - file.ictal_windows;
    file.windows = std::move(t.windows);
    ds.files.push_back(std::move(file));
  }
  if (ds.files.size() == 1) ds.warnings.push_back("subject " + subject_id + " has a single seizure file");
  return ds;
}

}  // namespace hdseizure

#pragma once

// Recording ingestion (EDF, CSV), annotation sidecars, the synthetic
// recording generator and the per-seizure dataset builder.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hdseizure/features.hpp"

namespace hdseizure {

// ---------------------------------------------------------------- EDF

struct EdfSignalHeader {
  std::string label;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  std::int64_t digital_min = 0;
  std::int64_t digital_max = 0;
  std::int64_t samples_per_record = 0;
};

struct EdfHeader {
  std::int64_t header_bytes = 0;
  std::int64_t num_records = 0;
  double record_duration_sec = 0.0;
  std::vector<EdfSignalHeader> signals;
};

// The 18 bipolar channels of the 10-20 montage common to all CHB-MIT subjects.
const std::vector<std::string>& DefaultBipolarMontage();

EdfHeader ParseEdfHeader(std::istream& in);

// Reads a plain EDF file. When `channels` is non-empty, each requested name
// is taken from the matching signal label (first match) or derived as A - B
// from referential signals "A" and "B"; anything else is a ParseError.
Recording ReadEdf(const std::filesystem::path& path, const std::vector<std::string>& channels = {});
Recording ReadEdf(std::istream& in, const std::vector<std::string>& channels = {});

// ---------------------------------------------------------------- CSV

// Header "time,<ch1>,<ch2>,..."; fs is inferred from the time column and
// every step must agree within 1e-6 s.
Recording ReadCsvRecording(const std::filesystem::path& path);
void WriteCsvRecording(const std::filesystem::path& path, const Recording& rec);

struct AnnotationRow {
  std::string subject_id;
  std::string file;
  Interval interval;
};

// Accepts "subject_id,file,start_sec,end_sec" or bare "start_sec,end_sec"
// files (header row required). Overlapping intervals within one
// (subject, file) are rejected.
std::vector<AnnotationRow> ReadAnnotations(const std::filesystem::path& path);
void WriteAnnotations(const std::filesystem::path& path, const std::vector<AnnotationRow>& rows);

// Feature CSV: t_start, t_end, label, then <channel>.<feature> columns.
void WriteFeatureCsv(const std::filesystem::path& path, const std::vector<std::string>& channels,
                     const std::vector<std::string>& features, const std::vector<FeatureWindow>& windows);

struct FeatureTable {
  std::vector<std::string> channels;
  std::vector<std::string> features;
  std::vector<FeatureWindow> windows;
};
FeatureTable ReadFeatureCsv(const std::filesystem::path& path);

// ---------------------------------------------------------------- synthetic

struct SpectralComponent {
  double frequency_hz = 10.0;
  double amplitude = 10.0;
};

// Piecewise-stationary signal state: sinusoids with per-segment random
// phase and jitter on top of AR(1) colored noise.
struct SynthState {
  std::string name;
  std::vector<SpectralComponent> components;
  double noise_amplitude = 5.0;
  double noise_ar = 0.9;  // AR(1) coefficient of the colored noise
  double frequency_jitter_hz = 0.3;
  // Relative share of background time (ignored for the seizure state).
  double weight = 1.0;
};

struct SynthSpec {
  double duration_sec = 600.0;
  double fs = 128.0;
  std::vector<std::string> channels{"C1", "C2", "C3", "C4"};
  std::vector<SynthState> background;  // at least one
  SynthState seizure;
  std::size_t num_seizures = 0;
  double seizure_min_sec = 20.0;
  double seizure_max_sec = 40.0;
  // Mean dwell time of a background state before switching.
  double background_dwell_sec = 60.0;
  // Seizures are placed at least this far from the ends and each other.
  double seizure_margin_sec = 30.0;
};

// Deterministic given seed. Throws InvalidArgument when the seizures do not
// fit into the duration.
Recording SynthGenerate(const SynthSpec& spec, std::uint64_t seed);

// Background of three spectral modes (one dominant, one minor and one rare
// high-amplitude slow mode) and a rhythmic 3 Hz seizure state.
SynthSpec MultimodalDemoSpec(std::size_t num_seizures = 1, double duration_sec = 2400.0);

// ---------------------------------------------------------------- dataset

struct DatasetOptions {
  double window_sec = 4.0;
  double step_sec = 0.5;
  double ratio = 10.0;
  double pre_exclusion_sec = 60.0;
  double post_exclusion_sec = 900.0;
  std::uint64_t seed = 0;
};

struct SeizureFile {
  std::size_t seizure_index = 0;
  std::size_t source_recording = 0;
  Interval seizure;
  std::vector<FeatureWindow> windows;  // chronological within the file
  std::vector<std::size_t> window_recordings;  // source recording per window
  std::size_t ictal_windows = 0;
  std::size_t non_ictal_windows = 0;
};

struct SubjectDataset {
  std::string subject_id;
  double ratio = 10.0;
  double step_sec = 0.5;
  std::vector<std::string> channels;
  std::vector<std::string> features;
  std::vector<SeizureFile> files;
  std::vector<std::string> warnings;
};

// Window-level selection without feature extraction; exposed so exclusion
// rules can be tested cheaply.
struct SelectedWindow {
  std::size_t recording = 0;
  WindowSpan span;
};
struct SeizureSelection {
  std::size_t recording = 0;
  Interval seizure;
  std::vector<SelectedWindow> windows;  // chronological
  std::size_t ictal = 0;
};
std::vector<SeizureSelection> SelectDatasetWindows(const std::vector<Recording>& recordings,
                                                   const std::string& subject_id, const DatasetOptions& options);

// Per seizure: all its ictal windows plus ratio x as many non-seizure windows
// drawn without replacement from outside [start - pre, end + post) of every
// seizure. Draws are disjoint across files. Throws InsufficientData when the
// pool cannot supply the requested count.
SubjectDataset BuildDataset(const std::vector<Recording>& recordings, const std::string& subject_id,
                            const FeatureRegistry& registry, const DatasetOptions& options, unsigned jobs = 1);

// Writes data_out/<subject>/seiz<k>.csv; returns the written paths.
std::vector<std::filesystem::path> WriteDataset(const std::filesystem::path& root, const SubjectDataset& dataset);
// Reads every seiz<k>.csv under root/<subject>, ordered by k.
SubjectDataset ReadDataset(const std::filesystem::path& root, const std::string& subject_id, double step_sec);

}  // namespace hdseizure

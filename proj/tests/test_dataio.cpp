#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "edf_fixture.hpp"
#include "hdseizure/dataio.hpp"
#include "hdseizure/errors.hpp"

using namespace hdseizure;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / ("hdseizure_" + std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void WriteText(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

Recording ReadEdfString(const std::string& bytes, const std::vector<std::string>& channels = {}) {
  std::istringstream in(bytes, std::ios::binary);
  return ReadEdf(in, channels);
}

// Flat recording of `seconds` at 128 Hz with the given seizures.
Recording Blank(double seconds, std::vector<Interval> seizures) {
  Recording r;
  r.fs = 128;
  r.channels = {"A"};
  r.samples = {std::vector<double>(static_cast<std::size_t>(seconds * 128), 0.0)};
  r.annotations = std::move(seizures);
  return r;
}

double Mid(const WindowSpan& w) { return 0.5 * (w.t_start + w.t_end); }

}  // namespace

TEST(Edf, IdentityCalibrationRoundTrips) {
  for (int channels : {1, 2, 18}) {
    for (double record_sec : {1.0, 10.0}) {
      const int spr = static_cast<int>(256 * record_sec);
      std::mt19937 rng(static_cast<unsigned>(channels * 100 + record_sec));
      std::vector<fixture::EdfSignal> sigs;
      for (int c = 0; c < channels; ++c) {
        fixture::EdfSignal s;
        s.label = "CH" + std::to_string(c);
        s.physical_min = -32768;
        s.physical_max = 32767;
        for (int i = 0; i < 3 * spr; ++i) s.digital.push_back(static_cast<std::int16_t>(rng() % 65536 - 32768));
        sigs.push_back(std::move(s));
      }
      const Recording rec = ReadEdfString(fixture::BuildEdf(sigs, spr, record_sec));
      ASSERT_EQ(rec.channels.size(), static_cast<std::size_t>(channels));
      EXPECT_DOUBLE_EQ(rec.fs, 256.0);
      for (int c = 0; c < channels; ++c) {
        EXPECT_EQ(rec.channels[c], sigs[c].label);
        ASSERT_EQ(rec.samples[c].size(), sigs[c].digital.size());
        for (std::size_t i = 0; i < sigs[c].digital.size(); ++i) {
          ASSERT_EQ(rec.samples[c][i], static_cast<double>(sigs[c].digital[i]));
        }
      }
    }
  }
}

TEST(Edf, LinearCalibration) {
  fixture::EdfSignal s;
  s.label = "X";
  s.physical_min = -3277;
  s.physical_max = 3277;
  s.digital = {-32768, 32767, 0, 100};
  const Recording rec = ReadEdfString(fixture::BuildEdf({s}, 4, 1.0));
  const double gain = 6554.0 / 65535.0;
  EXPECT_NEAR(rec.samples[0][0], -3277.0, 1e-9);
  EXPECT_NEAR(rec.samples[0][1], 3277.0, 1e-9);
  EXPECT_NEAR(rec.samples[0][2], -3277.0 + 32768.0 * gain, 1e-9);
  EXPECT_NEAR(rec.samples[0][3], -3277.0 + 32868.0 * gain, 1e-9);
}

TEST(Edf, ChannelSelectionAndDerivation) {
  fixture::EdfSignal a{"FP1", -32768, 32767, -32768, 32767, {10, 20, 30, 40}};
  fixture::EdfSignal b{"F7", -32768, 32767, -32768, 32767, {1, 2, 3, 4}};
  fixture::EdfSignal bip{"T7-P7", -32768, 32767, -32768, 32767, {5, 5, 5, 5}};
  const std::string bytes = fixture::BuildEdf({a, b, bip}, 2, 1.0);
  const Recording rec = ReadEdfString(bytes, {"t7-p7", "FP1-F7"});
  ASSERT_EQ(rec.channels, (std::vector<std::string>{"t7-p7", "FP1-F7"}));
  EXPECT_EQ(rec.samples[0], (std::vector<double>{5, 5, 5, 5}));
  EXPECT_EQ(rec.samples[1], (std::vector<double>{9, 18, 27, 36}));
  EXPECT_THROW(ReadEdfString(bytes, {"C3-P3"}), ParseError);
}

TEST(Edf, RecordCountFromFileSize) {
  fixture::EdfSignal s{"X", -32768, 32767, -32768, 32767, {1, 2, 3, 4, 5, 6}};
  const Recording rec = ReadEdfString(fixture::BuildEdf({s}, 2, 1.0, "-1"));
  EXPECT_EQ(rec.samples[0].size(), 6U);
}

TEST(Edf, TruncationReportsOffset) {
  fixture::EdfSignal s{"X", -32768, 32767, -32768, 32767, {1, 2, 3, 4, 5, 6}};
  const std::string bytes = fixture::BuildEdf({s}, 2, 1.0);
  // Header: 256 + 256 bytes; records of 4 bytes. Cut inside the third record.
  const std::string cut = bytes.substr(0, 512 + 8 + 1);
  try {
    ReadEdfString(cut);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 512U + 8U + 1U);
  }
  // More records declared than present.
  EXPECT_THROW(ReadEdfString(fixture::BuildEdf({s}, 2, 1.0, "5")), ParseError);
}

TEST(Edf, SignalCountInconsistentWithHeaderSize) {
  fixture::EdfSignal s{"X", -32768, 32767, -32768, 32767, {1, 2}};
  std::string bytes = fixture::BuildEdf({s}, 2, 1.0);
  bytes.replace(252, 4, "2   ");
  EXPECT_THROW(ReadEdfString(bytes), ParseError);
  bytes = fixture::BuildEdf({s}, 2, 1.0);
  EXPECT_THROW(ReadEdfString(bytes.substr(0, 300)), ParseError);
  bytes[0] = '9';
  EXPECT_THROW(ReadEdfString(bytes), ParseError);
}

TEST(Edf, MontageHasEighteenChannels) {
  const auto& m = DefaultBipolarMontage();
  EXPECT_EQ(m.size(), 18U);
  EXPECT_EQ(std::set<std::string>(m.begin(), m.end()).size(), 18U);
}

TEST(Csv, ThreeRowFixture) {
  TempDir dir;
  WriteText(dir.path() / "r.csv", "time,A,B\n0,1,2\n0.5,3,4\n1.0,5,6\n");
  const Recording rec = ReadCsvRecording(dir.path() / "r.csv");
  EXPECT_EQ(rec.num_samples(), 3U);
  EXPECT_DOUBLE_EQ(rec.fs, 2.0);
  EXPECT_EQ(rec.channels, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(rec.samples[1], (std::vector<double>{2, 4, 6}));
}

TEST(Csv, JitterLimit) {
  TempDir dir;
  WriteText(dir.path() / "ok.csv", "time,A\n0,1\n0.0100005,1\n0.02,1\n");
  EXPECT_NO_THROW(ReadCsvRecording(dir.path() / "ok.csv"));
  WriteText(dir.path() / "bad.csv", "time,A\n0,1\n0.0101,1\n0.02,1\n");
  EXPECT_THROW(ReadCsvRecording(dir.path() / "bad.csv"), ParseError);
  WriteText(dir.path() / "short.csv", "time,A\n0,1,2\n");
  EXPECT_THROW(ReadCsvRecording(dir.path() / "short.csv"), ParseError);
  EXPECT_THROW(ReadCsvRecording(dir.path() / "missing.csv"), Error);
}

TEST(Csv, RoundTripIsExact) {
  TempDir dir;
  SynthSpec spec = MultimodalDemoSpec(1, 120.0);
  const Recording rec = SynthGenerate(spec, 3);
  WriteCsvRecording(dir.path() / "x.csv", rec);
  const Recording back = ReadCsvRecording(dir.path() / "x.csv");
  EXPECT_EQ(back.fs, rec.fs);
  EXPECT_EQ(back.channels, rec.channels);
  EXPECT_EQ(back.samples, rec.samples);
}

TEST(Annotations, OverlapRejectedAndRoundTrip) {
  TempDir dir;
  WriteText(dir.path() / "a.csv", "start_sec,end_sec\n5,10\n8,12\n");
  EXPECT_THROW(ReadAnnotations(dir.path() / "a.csv"), InvalidArgument);
  // Same interval in different files is fine.
  const std::vector<AnnotationRow> rows{{"S1", "a.edf", {5, 10}}, {"S1", "b.edf", {8, 12}}, {"S2", "a.edf", {1.25, 2}}};
  WriteAnnotations(dir.path() / "b.csv", rows);
  const auto back = ReadAnnotations(dir.path() / "b.csv");
  ASSERT_EQ(back.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].subject_id, rows[i].subject_id);
    EXPECT_EQ(back[i].file, rows[i].file);
    EXPECT_EQ(back[i].interval, rows[i].interval);
  }
  WriteText(dir.path() / "c.csv", "start_sec,end_sec\n10,5\n");
  EXPECT_THROW(ReadAnnotations(dir.path() / "c.csv"), ParseError);
}

TEST(FeatureCsv, RoundTrip) {
  TempDir dir;
  std::vector<FeatureWindow> w{{0.0, 4.0, 0, 2, {1.5, -2.0, 1e-300, 3.25}}, {0.5, 4.5, 1, 2, {0.1, 0.2, 0.3, 0.4}}};
  WriteFeatureCsv(dir.path() / "f.csv", {"A", "B"}, {"x", "y"}, w);
  const auto t = ReadFeatureCsv(dir.path() / "f.csv");
  EXPECT_EQ(t.channels, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(t.features, (std::vector<std::string>{"x", "y"}));
  ASSERT_EQ(t.windows.size(), 2U);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(t.windows[i].values, w[i].values);
    EXPECT_EQ(t.windows[i].label, w[i].label);
    EXPECT_EQ(t.windows[i].t_start, w[i].t_start);
  }
}

TEST(Synth, DeterministicAndSeedSensitive) {
  const SynthSpec spec = MultimodalDemoSpec(2, 600.0);
  const Recording a = SynthGenerate(spec, 42);
  const Recording b = SynthGenerate(spec, 42);
  const Recording c = SynthGenerate(spec, 43);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.annotations, b.annotations);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_EQ(a.annotations.size(), 2U);
  EXPECT_NO_THROW(ValidateRecording(a));
  for (const auto& iv : a.annotations) {
    EXPECT_GE(iv.end_sec - iv.start_sec, spec.seizure_min_sec);
    EXPECT_LE(iv.end_sec - iv.start_sec, spec.seizure_max_sec);
  }
}

TEST(Synth, ZeroSeizuresAndInfeasible) {
  EXPECT_TRUE(SynthGenerate(MultimodalDemoSpec(0, 120.0), 1).annotations.empty());
  EXPECT_THROW(SynthGenerate(MultimodalDemoSpec(10, 120.0), 1), InvalidArgument);
  SynthSpec spec = MultimodalDemoSpec(1, 120.0);
  spec.background.clear();
  EXPECT_THROW(SynthGenerate(spec, 1), InvalidArgument);
}

TEST(Synth, SeizureStateRaisesDeltaPower) {
  const Recording rec = SynthGenerate(MultimodalDemoSpec(2, 900.0), 5);
  double in = 0.0, out = 0.0;
  std::size_t n_in = 0, n_out = 0;
  for (const auto& w : EnumerateWindows(rec, 4.0, 2.0)) {
    const auto s = ComputeSpectralFeatures(std::span(rec.samples[0]).subspan(w.first_sample, w.num_samples), rec.fs);
    if (w.label) {
      in += s.relative_power[1];
      ++n_in;
    } else {
      out += s.relative_power[1];
      ++n_out;
    }
  }
  ASSERT_GT(n_in, 0U);
  EXPECT_GT(in / static_cast<double>(n_in), out / static_cast<double>(n_out));
}

TEST(Dataset, ExclusionZoneArithmetic) {
  std::vector<Recording> recs{Blank(10000, {{100, 160}})};
  DatasetOptions opt;
  const auto sel = SelectDatasetWindows(recs, "S", opt);
  ASSERT_EQ(sel.size(), 1U);
  EXPECT_EQ(sel[0].ictal, 120U);
  std::size_t non = 0;
  for (const auto& w : sel[0].windows) {
    const double mid = Mid(w.span);
    if (w.span.label == 1) {
      EXPECT_TRUE(mid >= 100 && mid < 160);
    } else {
      ++non;
      EXPECT_FALSE(mid >= 40 && mid < 1060) << mid;
    }
  }
  // 60 s of seizure at ratio 10: 600 s worth of windows.
  EXPECT_EQ(non, 1200U);
}

TEST(Dataset, ExhaustiveExclusionAndDisjointDraws) {
  std::vector<Recording> recs{Blank(3000, {{400, 440}, {2000, 2030}}), Blank(2500, {{1200, 1250}})};
  DatasetOptions opt;
  opt.seed = 9;
  const auto sel = SelectDatasetWindows(recs, "S", opt);
  ASSERT_EQ(sel.size(), 3U);
  std::set<std::pair<std::size_t, double>> seen;
  for (const auto& s : sel) {
    const std::size_t non = s.windows.size() - s.ictal;
    EXPECT_LE(std::abs(static_cast<double>(non) - 10.0 * static_cast<double>(s.ictal)), 1.0);
    for (std::size_t i = 0; i < s.windows.size(); ++i) {
      const auto& w = s.windows[i];
      if (i > 0) {
        const auto& p = s.windows[i - 1];
        EXPECT_TRUE(p.recording < w.recording || (p.recording == w.recording && p.span.t_start < w.span.t_start));
      }
      if (w.span.label == 1) {
        EXPECT_EQ(w.recording, s.recording);
        EXPECT_TRUE(s.seizure.Contains(Mid(w.span)));
        continue;
      }
      EXPECT_TRUE(seen.insert({w.recording, w.span.t_start}).second) << "window drawn twice";
      for (const auto& iv : recs[w.recording].annotations) {
        EXPECT_FALSE(Mid(w.span) >= iv.start_sec - 60 && Mid(w.span) < iv.end_sec + 900);
      }
    }
  }
}

TEST(Dataset, SeedChangesOnlyNonSeizureDraws) {
  std::vector<Recording> recs{Blank(4000, {{300, 330}})};
  DatasetOptions a;
  a.seed = 1;
  DatasetOptions b = a;
  b.seed = 2;
  const auto sa = SelectDatasetWindows(recs, "S", a);
  const auto sb = SelectDatasetWindows(recs, "S", b);
  std::vector<double> ia, ib, na, nb;
  for (const auto& w : sa[0].windows) (w.span.label ? ia : na).push_back(w.span.t_start);
  for (const auto& w : sb[0].windows) (w.span.label ? ib : nb).push_back(w.span.t_start);
  EXPECT_EQ(ia, ib);
  EXPECT_NE(na, nb);
  EXPECT_EQ(na.size(), nb.size());
  // The subject id also feeds the seed.
  const auto sc = SelectDatasetWindows(recs, "T", a);
  std::vector<double> nc;
  for (const auto& w : sc[0].windows) {
    if (!w.span.label) nc.push_back(w.span.t_start);
  }
  EXPECT_NE(na, nc);
}

TEST(Dataset, InsufficientPoolReportsDeficit) {
  std::vector<Recording> recs{Blank(1200, {{100, 160}})};
  try {
    SelectDatasetWindows(recs, "S", DatasetOptions{});
    FAIL() << "expected InsufficientData";
  } catch (const InsufficientData& e) {
    EXPECT_NE(std::string(e.what()).find("deficit"), std::string::npos);
  }
}

TEST(Dataset, BuildWriteReadRoundTrip) {
  TempDir dir;
  SynthSpec spec = MultimodalDemoSpec(1, 1500.0);
  std::vector<Recording> recs{SynthGenerate(spec, 1), SynthGenerate(spec, 2)};
  DatasetOptions opt;
  opt.seed = 4;
  const auto reg = CompactRegistry();
  const SubjectDataset ds = BuildDataset(recs, "S07", reg, opt, 2);
  ASSERT_EQ(ds.files.size(), 2U);
  EXPECT_TRUE(ds.warnings.empty());
  for (const auto& f : ds.files) {
    EXPECT_EQ(f.windows.size(), f.ictal_windows + f.non_ictal_windows);
    std::size_t ictal = 0;
    for (const auto& w : f.windows) ictal += static_cast<std::size_t>(w.label);
    EXPECT_EQ(ictal, f.ictal_windows);
  }
  const auto paths = WriteDataset(dir.path(), ds);
  EXPECT_EQ(paths.size(), 2U);
  const SubjectDataset back = ReadDataset(dir.path(), "S07", 0.5);
  EXPECT_EQ(back.channels, ds.channels);
  EXPECT_EQ(back.features, ds.features);
  ASSERT_EQ(back.files.size(), 2U);
  for (std::size_t k = 0; k < 2; ++k) {
    ASSERT_EQ(back.files[k].windows.size(), ds.files[k].windows.size());
    for (std::size_t i = 0; i < ds.files[k].windows.size(); ++i) {
      EXPECT_EQ(back.files[k].windows[i].values, ds.files[k].windows[i].values);
    }
  }
  // Same inputs, one worker: identical features.
  const SubjectDataset again = BuildDataset(recs, "S07", reg, opt, 1);
  EXPECT_EQ(again.files[1].windows[5].values, ds.files[1].windows[5].values);
}

TEST(Dataset, SingleSeizureWarns) {
  SynthSpec spec = MultimodalDemoSpec(1, 1500.0);
  const SubjectDataset ds = BuildDataset({SynthGenerate(spec, 1)}, "S", CompactRegistry(), DatasetOptions{});
  EXPECT_EQ(ds.files.size(), 1U);
  EXPECT_EQ(ds.warnings.size(), 1U);
  EXPECT_THROW(BuildDataset({SynthGenerate(MultimodalDemoSpec(0, 600.0), 1)}, "S", CompactRegistry(), DatasetOptions{}),
               InvalidArgument);
}

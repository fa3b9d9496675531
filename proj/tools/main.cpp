// hdseizure: ingest, featurize, synth, train, evaluate, compare, bench and
// report stages of the seizure detection experiments.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdseizure/config.hpp"
#include "hdseizure/dataio.hpp"
#include "hdseizure/errors.hpp"
#include "hdseizure/harness.hpp"
#include "hdseizure/learning.hpp"
#include "hdseizure/parallel.hpp"

namespace fs = std::filesystem;
using namespace hdseizure;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  unsigned jobs = DefaultJobs();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> strategies;
  bool force = false;
  std::string out;
  // stage-specific
  std::string input;
  std::string annotations;
  std::string predictions;
  std::string name;
  std::string baseline = "2C";
  std::vector<std::string> subjects;
};

ExperimentConfig ResolveConfig(const Options& o) {
  auto overrides = o.overrides;
  if (o.seed) overrides.push_back("experiment.seed=" + std::to_string(*o.seed));
  if (!o.strategies.empty()) {
    std::string list;
    for (const auto& s : o.strategies) list += (list.empty() ? "" : ",") + s;
    overrides.push_back("run.strategies=" + list);
  }
  ExperimentConfig c = o.config_path.empty() ? ParseConfig("", overrides) : LoadConfig(o.config_path, overrides);
  c.raw_dir = ResolveDataPath(c.raw_dir);
  c.dataset_dir = ResolveDataPath(c.dataset_dir);
  return c;
}

fs::path ResultsRoot(const Options& o, const ExperimentConfig& c) {
  return (o.out.empty() ? c.results_dir : fs::path(o.out)) / c.name;
}

std::vector<std::string> ListSubjects(const fs::path& dataset_dir, const std::vector<std::string>& only) {
  std::vector<std::string> out;
  if (!fs::is_directory(dataset_dir)) throw Error("dataset directory " + dataset_dir.string() + " does not exist");
  for (const auto& e : fs::directory_iterator(dataset_dir)) {
    if (e.is_directory() && fs::exists(e.path() / "seiz0.csv")) out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  if (!only.empty()) {
    for (const auto& s : only) {
      if (std::find(out.begin(), out.end(), s) == out.end()) throw Error("subject " + s + " has no dataset files");
    }
    out = only;
  }
  if (out.empty()) throw Error("no subject datasets under " + dataset_dir.string() + "; run featurize first");
  return out;
}

std::vector<SubjectDataset> LoadDatasets(const ExperimentConfig& c, const std::vector<std::string>& only) {
  std::vector<SubjectDataset> out;
  for (const auto& s : ListSubjects(c.dataset_dir, only)) out.push_back(ReadDataset(c.dataset_dir, s, c.dataset.step_sec));
  return out;
}

// Raw tree: <raw>/<subject>/<file>.{csv,edf} plus <raw>/annotations.csv.
struct RawFile {
  std::string subject;
  fs::path path;
};

std::vector<RawFile> ScanRawTree(const fs::path& root) {
  std::vector<RawFile> out;
  if (!fs::is_directory(root)) throw Error("raw directory " + root.string() + " does not exist");
  for (const auto& sub : fs::directory_iterator(root)) {
    if (!sub.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(sub.path())) {
      auto ext = f.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (f.is_regular_file() && (ext == ".csv" || ext == ".edf")) {
        out.push_back({sub.path().filename().string(), f.path()});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const RawFile& a, const RawFile& b) {
    return std::tie(a.subject, a.path) < std::tie(b.subject, b.path);
  });
  return out;
}

Recording LoadRaw(const fs::path& path, const std::vector<std::string>& channels) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == ".edf") return ReadEdf(path, channels.empty() ? DefaultBipolarMontage() : channels);
  return ReadCsvRecording(path);
}

std::map<std::pair<std::string, std::string>, std::vector<Interval>> LoadAnnotationMap(const fs::path& path) {
  std::map<std::pair<std::string, std::string>, std::vector<Interval>> out;
  if (!fs::exists(path)) return out;
  for (const auto& row : ReadAnnotations(path)) out[{row.subject_id, row.file}].push_back(row.interval);
  return out;
}

int RunSynth(const Options& o) {
  auto c = ResolveConfig(o);
  const fs::path root = o.out.empty() ? c.raw_dir : fs::path(o.out);
  std::vector<AnnotationRow> rows;
  for (const auto& subj : GenerateSynthCorpus(c)) {
    fs::create_directories(root / subj.subject_id);
    for (std::size_t r = 0; r < subj.recordings.size(); ++r) {
      WriteCsvRecording(root / subj.subject_id / subj.files[r], subj.recordings[r]);
      for (const auto& iv : subj.recordings[r].annotations) rows.push_back({subj.subject_id, subj.files[r], iv});
    }
    std::cout << "synth: " << subj.subject_id << " (" << subj.recordings.size() << " recordings)\n";
  }
  WriteAnnotations(root / "annotations.csv", rows);
  WriteManifest(root, "synth", c, {{"output", root.string()}});
  return 0;
}

int RunIngest(const Options& o) {
  auto c = ResolveConfig(o);
  const fs::path root = o.input.empty() ? c.raw_dir : ResolveDataPath(o.input);
  const fs::path ann = o.annotations.empty() ? root / "annotations.csv" : fs::path(o.annotations);
  const auto annotations = LoadAnnotationMap(ann);
  const fs::path out_dir = o.out.empty() ? c.dataset_dir : fs::path(o.out);
  fs::create_directories(out_dir);
  std::ofstream index(out_dir / "ingest_index.csv");
  index << "subject,file,fs,channels,duration_sec,seizures\n";
  std::size_t seizures = 0;
  const auto files = ScanRawTree(root);
  for (const auto& f : files) {
    Recording rec = LoadRaw(f.path, c.channels);
    const auto it = annotations.find({f.subject, f.path.filename().string()});
    if (it != annotations.end()) rec.annotations = it->second;
    ValidateRecording(rec);
    seizures += rec.annotations.size();
    index << f.subject << ',' << f.path.filename().string() << ',' << rec.fs << ',' << rec.channels.size() << ','
          << rec.duration_sec() << ',' << rec.annotations.size() << '\n';
  }
  WriteManifest(out_dir, "ingest", c, {{"input", root.string()}, {"annotations", ann.string()}});
  std::cout << "ingest: " << files.size() << " recordings, " << seizures << " seizures\n";
  return 0;
}

int RunFeaturize(const Options& o) {
  auto c = ResolveConfig(o);
  const fs::path out_dir = o.out.empty() ? c.dataset_dir : fs::path(o.out);
  const auto annotations = LoadAnnotationMap(c.raw_dir / "annotations.csv");
  const auto registry = RegistryById(c.registry);
  std::map<std::string, std::vector<fs::path>> by_subject;
  for (const auto& f : ScanRawTree(c.raw_dir)) by_subject[f.subject].push_back(f.path);
  for (const auto& [subject, paths] : by_subject) {
    if (!o.subjects.empty() && std::find(o.subjects.begin(), o.subjects.end(), subject) == o.subjects.end()) continue;
    const fs::path marker = out_dir / subject / ".complete";
    if (!o.force && fs::exists(marker)) {
      std::cout << "featurize: " << subject << " up to date (use --force to rebuild)\n";
      continue;
    }
    std::vector<Recording> recs;
    for (const auto& p : paths) {
      Recording rec = LoadRaw(p, c.channels);
      const auto it = annotations.find({subject, p.filename().string()});
      if (it != annotations.end()) rec.annotations = it->second;
      recs.push_back(std::move(rec));
    }
    const auto ds = BuildDataset(recs, subject, registry, c.dataset, o.jobs);
    if (fs::exists(out_dir / subject)) {
      for (const auto& e : fs::directory_iterator(out_dir / subject)) {
        if (e.path().filename().string().rfind("seiz", 0) == 0) fs::remove(e.path());
      }
    }
    const auto written = WriteDataset(out_dir, ds);
    for (const auto& w : ds.warnings) std::cerr << "featurize: " << subject << ": warning: " << w << '\n';
    std::vector<std::pair<std::string, std::string>> extra{{"subject", subject},
                                                           {"seizure_files", std::to_string(written.size())}};
    for (std::size_t k = 0; k < paths.size(); ++k) extra.emplace_back("recording_" + std::to_string(k), paths[k].string());
    WriteManifest(out_dir / subject, "featurize", c, extra);
    std::ofstream(marker) << written.size() << '\n';
    std::cout << "featurize: " << subject << ": " << written.size() << " seizure files\n";
  }
  return 0;
}

int RunTrain(const Options& o) {
  auto c = ResolveConfig(o);
  const auto datasets = LoadDatasets(c, o.subjects);
  const auto strategies = c.strategies;
  const fs::path root = ResultsRoot(o, c);
  std::map<std::string, std::vector<FoldResult>> folds;
  std::map<std::string, std::vector<SubjectSummary>> summaries;
  for (const auto& ds : datasets) {
    const auto r = LosoCv(ds, strategies, c, o.jobs);
    for (const auto& f : r.folds) folds[f.strategy].push_back(f);
    for (const auto& s : r.summary) summaries[s.strategy].push_back(s);
    if (r.single_split) std::cerr << "train: " << ds.subject_id << ": warning: single seizure file, single split\n";
    std::cout << "train: " << ds.subject_id << ":";
    for (const auto& s : r.summary) std::cout << ' ' << s.strategy << '=' << s.mean.f1_de_mean;
    std::cout << '\n';
  }
  for (const auto s : strategies) {
    const std::string tag(StrategyTag(s));
    const fs::path dir = root / tag;
    WriteFoldCsv(dir / "per_fold.csv", folds[tag]);
    WriteSubjectCsv(dir / "per_subject.csv", summaries[tag]);
    WritePredictionsCsv(dir / "predictions.csv", folds[tag]);
    fs::create_directories(dir / "stats");
    for (const auto& f : folds[tag]) {
      if (f.ok) std::ofstream(dir / "stats" / (f.subject + "_fold" + std::to_string(f.fold) + ".json")) << TrainStatsJson(f.stats) << '\n';
    }
    // Deployment model per subject, trained on every seizure file.
    fs::create_directories(dir / "models");
    for (const auto& ds : datasets) {
      std::vector<FeatureWindow> all;
      std::vector<std::size_t> starts;
      for (const auto& file : ds.files) {
        starts.push_back(all.size());
        all.insert(all.end(), file.windows.begin(), file.windows.end());
      }
      const auto memory = FitItemMemory(all, ds.features, ds.channels, c.hd);
      const auto encoded = EncodeWindows(all, memory, o.jobs);
      std::vector<int> labels;
      for (const auto& w : all) labels.push_back(w.label);
      TrainingSet t{encoded, labels, starts, ds.step_sec};
      try {
        const Model model = Train(s, t, c.learning, memory.tie_break());
        std::ofstream mf(dir / "models" / (ds.subject_id + ".hdmd"), std::ios::binary);
        WriteModel(mf, model);
        std::ofstream imf(dir / "models" / (ds.subject_id + ".hdim"), std::ios::binary);
        WriteItemMemory(imf, memory);
        std::ofstream(dir / "models" / (ds.subject_id + ".stats.json")) << TrainStatsJson(model.stats) << '\n';
      } catch (const Error& e) {
        std::cerr << "train: " << ds.subject_id << ": " << tag << ": no deployment model: " << e.what() << '\n';
      }
    }
    if (summaries.contains(o.baseline) && tag != o.baseline) {
      const auto row = CompareStrategies(summaries[tag], summaries[o.baseline]);
      WriteComparisonCsv(dir / "comparison.csv", std::vector{row});
    }
    WriteManifest(dir, "train", c, {{"strategy", tag}, {"subjects", std::to_string(datasets.size())}});
  }
  return 0;
}

int RunEvaluate(const Options& o) {
  if (o.predictions.empty() || o.name.empty()) throw CLI::ValidationError("evaluate needs --predictions and --name");
  auto c = ResolveConfig(o);
  const auto folds = EvaluatePredictions(ReadPredictionsCsv(o.predictions), o.name, c.dataset.step_sec, c.learning.post);
  std::vector<std::string> subjects;
  for (const auto& f : folds) {
    if (std::find(subjects.begin(), subjects.end(), f.subject) == subjects.end()) subjects.push_back(f.subject);
  }
  std::vector<SubjectSummary> summary;
  for (const auto& s : subjects) summary.push_back(Summarize(folds, s, o.name));
  const fs::path dir = ResultsRoot(o, c) / o.name;
  WriteFoldCsv(dir / "per_fold.csv", folds);
  WriteSubjectCsv(dir / "per_subject.csv", summary);
  WriteManifest(dir, "evaluate", c, {{"predictions", o.predictions}});
  std::cout << "evaluate: " << o.name << ": " << folds.size() << " folds, " << subjects.size() << " subjects\n";
  return 0;
}

int RunCompare(const Options& o) {
  // Here --strategy names result sets, which may include external ones.
  Options co = o;
  co.strategies.clear();
  auto c = ResolveConfig(co);
  if (!o.predictions.empty()) RunEvaluate(co);
  const fs::path root = ResultsRoot(o, c);
  std::vector<std::string> names = o.strategies;
  if (!o.name.empty()) names.push_back(o.name);
  if (names.empty()) {
    for (auto s : c.strategies) names.emplace_back(StrategyTag(s));
  }
  const auto base_path = root / o.baseline / "per_subject.csv";
  if (!fs::exists(base_path)) throw Error("baseline results " + base_path.string() + " not found");
  const auto base = ReadSubjectCsv(base_path);
  std::vector<ComparisonRow> rows;
  for (const auto& n : names) {
    if (n == o.baseline) continue;
    const auto path = root / n / "per_subject.csv";
    if (!fs::exists(path)) throw Error("results " + path.string() + " not found");
    rows.push_back(CompareStrategies(ReadSubjectCsv(path), base));
    WriteComparisonCsv(root / n / "comparison.csv", std::vector{rows.back()});
    std::cout << "compare: " << n << " vs " << o.baseline << ": diff=" << rows.back().mean_diff
              << " p=" << rows.back().p_value << (rows.back().insufficient ? " (insufficient data)" : "") << '\n';
  }
  WriteComparisonCsv(root / "comparison.csv", rows);
  WriteManifest(root, "compare", c, {{"baseline", o.baseline}});
  return 0;
}

int RunBench(const Options& o) {
  auto c = ResolveConfig(o);
  const auto datasets = LoadDatasets(c, o.subjects);
  const auto rows = Bench(datasets, c.strategies, c);
  const fs::path root = ResultsRoot(o, c);
  WriteBenchCsv(root / "bench.csv", rows);
  for (const auto& r : rows) {
    WriteBenchCsv(root / r.strategy / "bench.csv", std::vector{r});
    std::printf("bench: %-5s time %.4fs (x%.2f)  memory %.0f B (x%.2f)\n", r.strategy.c_str(), r.train_seconds,
                r.train_relative, r.model_bytes, r.bytes_relative);
  }
  WriteManifest(root, "bench", c, {{"lanes", "1"}, {"repeats", std::to_string(c.bench_repeats)}});
  return 0;
}

int RunReport(const Options& o) {
  auto c = ResolveConfig(o);
  const fs::path root = ResultsRoot(o, c);
  const auto names = WriteReport(root);
  WriteManifest(root, "report", c, {});
  std::cout << "report: " << names.size() << " result sets -> " << (root / "report.csv").string() << ", "
            << (root / "report.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperdimensional seizure detection experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer("Configuration keys and defaults:\n" + RenderConfig(ExperimentConfig{}) +
             "\nRelative data paths resolve against $HDC_SEIZURE_DATA when set.");
  Options o;
  app.add_option("-c,--config", o.config_path, "Experiment config file")->check(CLI::ExistingFile);
  app.add_option("--set", o.overrides, "Override a config value: section.key=value (repeatable)");
  app.add_option("-j,--jobs", o.jobs, "Worker lanes (default: processor cores)")->check(CLI::Range(1U, 1024U));
  app.add_option("--seed", o.seed, "Experiment seed (overrides experiment.seed)");
  app.add_option("-s,--strategy", o.strategies, "Strategy tag (repeatable): " + ValidStrategyTags());
  app.add_flag("-f,--force", o.force, "Recompute outputs that already exist");
  app.add_option("-o,--out", o.out, "Output directory for the stage");
  app.add_option("--subject", o.subjects, "Restrict to these subjects (repeatable)");

  auto* ingest = app.add_subcommand("ingest", "Validate and index EDF/CSV recordings and annotations");
  ingest->add_option("-i,--input", o.input, "Recording tree <dir>/<subject>/<file>");
  ingest->add_option("-a,--annotations", o.annotations, "Annotation CSV (subject_id,file,start_sec,end_sec)");
  app.add_subcommand("featurize", "Build per-seizure feature files (resumable)");
  app.add_subcommand("synth", "Generate the synthetic multimodal corpus");
  auto* train = app.add_subcommand("train", "Leave-one-seizure-out training and testing");
  train->add_option("--baseline", o.baseline, "Reference strategy for comparison.csv");
  auto* evaluate = app.add_subcommand("evaluate", "Score an external predictions CSV");
  evaluate->add_option("-p,--predictions", o.predictions, "CSV subject,fold,index,truth,pred")->required();
  evaluate->add_option("-n,--name", o.name, "Result set name")->required();
  auto* compare = app.add_subcommand("compare", "Wilcoxon comparison against a baseline");
  compare->add_option("--baseline", o.baseline, "Reference result set (default 2C)");
  compare->add_option("-p,--predictions", o.predictions, "Also score this external predictions CSV");
  compare->add_option("-n,--name", o.name, "Name of the external result set");
  app.add_subcommand("bench", "Single-lane training time and model size");
  app.add_subcommand("report", "Aggregate per-subject results into report.csv and report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  // Strategy tags from the command line (compare also accepts external names).
  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd != "compare") {
    for (const auto& s : o.strategies) {
      if (!ParseStrategy(s)) {
        std::cerr << "error: unknown strategy '" << s << "'; valid tags: " << ValidStrategyTags() << '\n';
        return kExitUsage;
      }
    }
  }

  try {
    if (cmd == "synth") return RunSynth(o);
    if (cmd == "ingest") return RunIngest(o);
    if (cmd == "featurize") return RunFeaturize(o);
    if (cmd == "train") return RunTrain(o);
    if (cmd == "evaluate") return RunEvaluate(o);
    if (cmd == "compare") return RunCompare(o);
    if (cmd == "bench") return RunBench(o);
    if (cmd == "report") return RunReport(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

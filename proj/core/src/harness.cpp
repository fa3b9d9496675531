#include "hdseizure/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hdseizure/errors.hpp"
#include "hdseizure/parallel.hpp"
#include "hdseizure/random.hpp"

#ifndef HDSEIZURE_VERSION
#define HDSEIZURE_VERSION "unknown"
#endif

namespace hdseizure {
namespace {

std::string Num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string Clean(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ' ');
  return s;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseNum(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'", line);
  }
  return v;
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

void AppendWindows(const SeizureFile& file, std::vector<FeatureWindow>& out, std::size_t parity_mod,
                   std::size_t parity) {
  for (std::size_t i = 0; i < file.windows.size(); ++i) {
    if (parity_mod == 0 || i % parity_mod == parity) out.push_back(file.windows[i]);
  }
}

std::vector<int> Labels(const std::vector<FeatureWindow>& windows) {
  std::vector<int> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(w.label);
  return out;
}

}  // namespace

std::string_view CodeVersion() noexcept { return HDSEIZURE_VERSION; }

std::vector<SubjectRecordings> GenerateSynthCorpus(const ExperimentConfig& config) {
  const auto& o = config.synth;
  if (o.channels == 0) throw InvalidArgument("synth.channels must be positive");
  SynthSpec spec = MultimodalDemoSpec(o.seizures_per_recording, o.recording_sec);
  spec.channels.clear();
  for (std::size_t c = 0; c < o.channels; ++c) spec.channels.push_back("C" + std::to_string(c + 1));
  std::vector<SubjectRecordings> out;
  for (std::size_t s = 0; s < o.subjects; ++s) {
    SubjectRecordings subj;
    char id[16];
    std::snprintf(id, sizeof(id), "S%02zu", s + 1);
    subj.subject_id = id;
    for (std::size_t r = 0; r < o.recordings_per_subject; ++r) {
      subj.files.push_back("rec" + std::to_string(r) + ".csv");
      subj.recordings.push_back(SynthGenerate(spec, DeriveSeed(config.seed, 0x53594e54, s * 1024 + r)));
    }
    out.push_back(std::move(subj));
  }
  return out;
}

std::vector<FoldPlan> PlanFolds(const SubjectDataset& dataset) {
  const auto n = dataset.files.size();
  if (n == 0) throw InsufficientData("subject " + dataset.subject_id + " has no seizure files");
  if (n == 1) return {FoldPlan{0, {0}, 0, true}};
  std::vector<FoldPlan> plans;
  for (std::size_t k = 0; k < n; ++k) {
    FoldPlan p;
    p.index = k;
    p.test_file = k;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) p.train_files.push_back(j);
    }
    plans.push_back(std::move(p));
  }
  return plans;
}

TrainingSet EncodedFold::training_set(double step_sec) const {
  TrainingSet t;
  t.samples = train;
  t.labels = train_labels;
  t.file_starts = train_file_starts;
  t.step_sec = step_sec;
  return t;
}

EncodedFold EncodeFold(const SubjectDataset& dataset, const FoldPlan& plan, const ExperimentConfig& config,
                       unsigned jobs) {
  std::vector<FeatureWindow> train;
  std::vector<FeatureWindow> test;
  EncodedFold fold;
  if (plan.single_split) {
    AppendWindows(dataset.files.at(plan.test_file), train, 2, 0);
    AppendWindows(dataset.files.at(plan.test_file), test, 2, 1);
    fold.train_file_starts = {0};
  } else {
    for (auto f : plan.train_files) {
      fold.train_file_starts.push_back(train.size());
      AppendWindows(dataset.files.at(f), train, 0, 0);
    }
    AppendWindows(dataset.files.at(plan.test_file), test, 0, 0);
  }
  if (train.empty() || test.empty()) throw InsufficientData("fold has no training or test windows");
  fold.memory = FitItemMemory(train, dataset.features, dataset.channels, config.hd);
  fold.train = EncodeWindows(train, fold.memory, jobs);
  fold.test = EncodeWindows(test, fold.memory, jobs);
  fold.train_labels = Labels(train);
  fold.test_labels = Labels(test);
  return fold;
}

FoldResult ScoreFold(std::string subject, std::size_t fold, std::string strategy, std::vector<std::uint8_t> truth,
                     std::vector<std::uint8_t> raw_pred, double step_sec, const PostProcessing& post) {
  if (truth.size() != raw_pred.size()) throw DimensionMismatch(truth.size(), raw_pred.size());
  FoldResult r;
  r.subject = std::move(subject);
  r.fold = fold;
  r.strategy = std::move(strategy);
  const LabelSequence pred = PostProcess(LabelSequence{raw_pred, step_sec}, post);
  r.metrics = ScoreSequences(pred, LabelSequence{truth, step_sec});
  r.truth = std::move(truth);
  r.raw_pred = std::move(raw_pred);
  return r;
}

std::string SubjectSummary::flag() const {
  std::string f;
  if (!ok()) f = "failed";
  if (single_split) f += f.empty() ? "single_split" : ";single_split";
  return f.empty() ? "ok" : f;
}

SubjectSummary Summarize(std::span<const FoldResult> folds, const std::string& subject, const std::string& strategy) {
  SubjectSummary s;
  s.subject = subject;
  s.strategy = strategy;
  std::size_t used = 0;
  MetricsReport sum;
  for (const auto& f : folds) {
    if (f.subject != subject || f.strategy != strategy) continue;
    ++s.folds;
    if (!f.ok) {
      ++s.failed_folds;
      continue;
    }
    ++used;
    for (auto [acc, val] : {std::pair{&sum.episode, &f.metrics.episode}, std::pair{&sum.duration, &f.metrics.duration}}) {
      acc->tpr += val->tpr;
      acc->ppv += val->ppv;
      acc->f1 += val->f1;
      acc->tp += val->tp;
      acc->fp += val->fp;
      acc->fn += val->fn;
    }
    sum.f1_de_mean += f.metrics.f1_de_mean;
  }
  if (used > 0) {
    const double n = static_cast<double>(used);
    for (auto* d : {&sum.episode, &sum.duration}) {
      d->tpr /= n;
      d->ppv /= n;
      d->f1 /= n;
    }
    sum.f1_de_mean /= n;
  }
  s.mean = sum;
  return s;
}

LosoResult LosoCv(const SubjectDataset& dataset, std::span<const Strategy> strategies, const ExperimentConfig& config,
                  unsigned jobs) {
  const auto plans = PlanFolds(dataset);
  LosoResult result;
  result.subject = dataset.subject_id;
  result.single_split = plans.front().single_split;
  std::vector<std::vector<FoldResult>> per_fold(plans.size());
  const unsigned inner_jobs = plans.size() == 1 ? jobs : 1;

  ParallelFor(plans.size(), jobs, [&](std::size_t k) {
    const auto& plan = plans[k];
    const EncodedFold enc = EncodeFold(dataset, plan, config, inner_jobs);
    const TrainingSet train = enc.training_set(dataset.step_sec);
    std::vector<std::uint8_t> truth(enc.test_labels.begin(), enc.test_labels.end());
    for (const auto s : strategies) {
      const std::string tag(StrategyTag(s));
      try {
        const Model model = Train(s, train, config.learning, enc.memory.tie_break());
        std::vector<std::uint8_t> pred;
        pred.reserve(enc.test.size());
        for (const auto& x : enc.test) pred.push_back(static_cast<std::uint8_t>(Predict(model, x).label));
        FoldResult r = ScoreFold(dataset.subject_id, plan.index, tag, truth, std::move(pred), dataset.step_sec,
                                 config.learning.post);
        r.stats = model.stats;
        r.centroids = model.CentroidCounts();
        r.model_bytes = SerializedSize(model);
        per_fold[k].push_back(std::move(r));
      } catch (const Error& e) {
        FoldResult r;
        r.subject = dataset.subject_id;
        r.fold = plan.index;
        r.strategy = tag;
        r.ok = false;
        r.error = e.what();
        r.truth = truth;
        per_fold[k].push_back(std::move(r));
      }
    }
  });

  for (auto& v : per_fold) {
    for (auto& r : v) result.folds.push_back(std::move(r));
  }
  for (const auto s : strategies) {
    auto summary = Summarize(result.folds, dataset.subject_id, std::string(StrategyTag(s)));
    summary.single_split = result.single_split;
    result.summary.push_back(std::move(summary));
  }
  return result;
}

ComparisonRow CompareStrategies(std::span<const SubjectSummary> a, std::span<const SubjectSummary> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("comparison needs per-subject results on both sides");
  std::map<std::string, const SubjectSummary*> ma;
  std::map<std::string, const SubjectSummary*> mb;
  for (const auto& s : a) ma[s.subject] = &s;
  for (const auto& s : b) mb[s.subject] = &s;
  bool same = ma.size() == mb.size();
  for (auto it = ma.begin(); same && it != ma.end(); ++it) same = mb.contains(it->first);
  if (!same) {
    throw InvalidArgument("subject sets differ between " + a.front().strategy + " and " + b.front().strategy);
  }
  ComparisonRow row;
  row.strategy_a = a.front().strategy;
  row.strategy_b = b.front().strategy;
  std::vector<double> va;
  std::vector<double> vb;
  for (const auto& [subject, sa] : ma) {
    const auto* sb = mb.at(subject);
    if (!sa->ok() || !sb->ok()) {
      row.excluded.push_back(subject);
      continue;
    }
    va.push_back(sa->mean.f1_de_mean);
    vb.push_back(sb->mean.f1_de_mean);
  }
  row.subjects = va.size();
  if (!va.empty()) {
    const double n = static_cast<double>(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) {
      row.mean_a += va[i] / n;
      row.mean_b += vb[i] / n;
      row.mean_diff += (va[i] - vb[i]) / n;
    }
  }
  try {
    const auto w = WilcoxonSignedRank(va, vb);
    row.p_value = w.p_value;
    row.w_plus = w.w_plus;
    row.exact = w.exact;
  } catch (const InsufficientData&) {
    row.insufficient = true;
    row.p_value = 1.0;
  }
  return row;
}

std::vector<BenchRow> Bench(std::span<const SubjectDataset> datasets, std::span<const Strategy> strategies,
                            const ExperimentConfig& config) {
  std::vector<Strategy> order{Strategy::k2C};
  for (auto s : strategies) {
    if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);
  }
  std::vector<double> seconds(order.size(), 0.0);
  std::vector<double> bytes(order.size(), 0.0);
  std::size_t folds = 0;
  using Clock = std::chrono::steady_clock;

  for (const auto& ds : datasets) {
    for (const auto& plan : PlanFolds(ds)) {
      const EncodedFold enc = EncodeFold(ds, plan, config, 1);
      const TrainingSet train = enc.training_set(ds.step_sec);
      std::vector<double> fold_sec(order.size());
      std::vector<double> fold_bytes(order.size());
      bool failed = false;
      for (std::size_t i = 0; i < order.size() && !failed; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < config.bench_repeats; ++r) {
          try {
            const auto t0 = Clock::now();
            const Model model = Train(order[i], train, config.learning, enc.memory.tie_break());
            const auto t1 = Clock::now();
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
            fold_bytes[i] = static_cast<double>(SerializedSize(model));
          } catch (const Error&) {
            failed = true;
            break;
          }
        }
        fold_sec[i] = best;
      }
      if (failed) continue;
      ++folds;
      for (std::size_t i = 0; i < order.size(); ++i) {
        seconds[i] += fold_sec[i];
        bytes[i] += fold_bytes[i];
      }
    }
  }
  if (folds == 0) throw InsufficientData("no fold could be benchmarked");

  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < order.size(); ++i) {
    BenchRow row;
    row.strategy = std::string(StrategyTag(order[i]));
    row.folds = folds;
    row.train_seconds = seconds[i] / static_cast<double>(folds);
    row.model_bytes = bytes[i] / static_cast<double>(folds);
    row.train_relative = row.train_seconds / (seconds[0] / static_cast<double>(folds));
    row.bytes_relative = row.model_bytes / (bytes[0] / static_cast<double>(folds));
    rows.push_back(row);
  }
  return rows;
}

void WriteFoldCsv(const std::filesystem::path& path, std::span<const FoldResult> folds) {
  auto out = OpenOut(path);
  out << "subject,fold,strategy,status,f1_de_mean,episode_tpr,episode_ppv,episode_f1,episode_tp,episode_fp,"
         "episode_fn,duration_tpr,duration_ppv,duration_f1,duration_tp,duration_fp,duration_fn,"
         "centroids_nonseizure,centroids_seizure,passes,best_pass,model_bytes,error\n";
  for (const auto& f : folds) {
    const auto& m = f.metrics;
    out << f.subject << ',' << f.fold << ',' << f.strategy << ',' << (f.ok ? "ok" : "failed") << ','
        << Num(m.f1_de_mean);
    for (const auto* d : {&m.episode, &m.duration}) {
      out << ',' << Num(d->tpr) << ',' << Num(d->ppv) << ',' << Num(d->f1) << ',' << d->tp << ',' << d->fp << ','
          << d->fn;
    }
    out << ',' << f.centroids[0] << ',' << f.centroids[1] << ',' << f.stats.passes << ',' << f.stats.best_pass << ','
        << f.model_bytes << ',' << Clean(f.error) << '\n';
  }
}

void WriteSubjectCsv(const std::filesystem::path& path, std::span<const SubjectSummary> rows) {
  auto out = OpenOut(path);
  out << "subject,strategy,folds,failed_folds,flag,f1_de_mean,episode_tpr,episode_ppv,episode_f1,duration_tpr,"
         "duration_ppv,duration_f1\n";
  for (const auto& s : rows) {
    const auto& m = s.mean;
    out << s.subject << ',' << s.strategy << ',' << s.folds << ',' << s.failed_folds << ',' << s.flag() << ','
        << Num(m.f1_de_mean) << ',' << Num(m.episode.tpr) << ',' << Num(m.episode.ppv) << ',' << Num(m.episode.f1)
        << ',' << Num(m.duration.tpr) << ',' << Num(m.duration.ppv) << ',' << Num(m.duration.f1) << '\n';
  }
}

std::vector<SubjectSummary> ReadSubjectCsv(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("subject,strategy,", 0) != 0) {
    throw ParseError(path.string() + ": missing per-subject header", 0);
  }
  std::vector<SubjectSummary> rows;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    const auto c = SplitCsv(line);
    if (c.size() != 12) throw ParseError(path.string() + ":" + std::to_string(n) + ": expected 12 columns", n);
    SubjectSummary s;
    s.subject = c[0];
    s.strategy = c[1];
    s.folds = static_cast<std::size_t>(ParseNum(c[2], path, n));
    s.failed_folds = static_cast<std::size_t>(ParseNum(c[3], path, n));
    s.single_split = c[4].find("single_split") != std::string::npos;
    s.mean.f1_de_mean = ParseNum(c[5], path, n);
    s.mean.episode.tpr = ParseNum(c[6], path, n);
    s.mean.episode.ppv = ParseNum(c[7], path, n);
    s.mean.episode.f1 = ParseNum(c[8], path, n);
    s.mean.duration.tpr = ParseNum(c[9], path, n);
    s.mean.duration.ppv = ParseNum(c[10], path, n);
    s.mean.duration.f1 = ParseNum(c[11], path, n);
    rows.push_back(std::move(s));
  }
  return rows;
}

void WriteComparisonCsv(const std::filesystem::path& path, std::span<const ComparisonRow> rows) {
  auto out = OpenOut(path);
  out << "strategy_a,strategy_b,subjects,mean_a,mean_b,mean_diff,p_value,w_plus,exact,flag,excluded\n";
  for (const auto& r : rows) {
    std::string excluded;
    for (const auto& s : r.excluded) excluded += (excluded.empty() ? "" : ";") + s;
    std::string flag = r.insufficient ? "insufficient_data" : "ok";
    if (!r.excluded.empty()) flag += ";excluded_subjects";
    out << r.strategy_a << ',' << r.strategy_b << ',' << r.subjects << ',' << Num(r.mean_a) << ',' << Num(r.mean_b)
        << ',' << Num(r.mean_diff) << ',' << Num(r.p_value) << ',' << Num(r.w_plus) << ',' << (r.exact ? 1 : 0)
        << ',' << flag << ',' << excluded << '\n';
  }
}

void WriteBenchCsv(const std::filesystem::path& path, std::span<const BenchRow> rows) {
  auto out = OpenOut(path);
  out << "strategy,folds,train_seconds,train_relative,model_bytes,bytes_relative\n";
  for (const auto& r : rows) {
    out << r.strategy << ',' << r.folds << ',' << Num(r.train_seconds) << ',' << Num(r.train_relative) << ','
        << Num(r.model_bytes) << ',' << Num(r.bytes_relative) << '\n';
  }
}

void WritePredictionsCsv(const std::filesystem::path& path, std::span<const FoldResult> folds) {
  auto out = OpenOut(path);
  out << "subject,fold,index,truth,pred\n";
  for (const auto& f : folds) {
    if (!f.ok) continue;
    for (std::size_t i = 0; i < f.truth.size(); ++i) {
      out << f.subject << ',' << f.fold << ',' << i << ',' << int{f.truth[i]} << ',' << int{f.raw_pred[i]} << '\n';
    }
  }
}

std::vector<PredictionFold> ReadPredictionsCsv(const std::filesystem::path& path) {
  auto in = OpenIn(path);
  std::string line;
  if (!std::getline(in, line) || line != "subject,fold,index,truth,pred") {
    throw ParseError(path.string() + ": expected header subject,fold,index,truth,pred", 0);
  }
  std::vector<PredictionFold> folds;
  std::map<std::pair<std::string, std::size_t>, std::size_t> where;
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c = SplitCsv(line);
    const auto at = path.string() + ":" + std::to_string(n);
    if (c.size() != 5) throw ParseError(at + ": expected 5 columns", n);
    const auto fold = static_cast<std::size_t>(ParseNum(c[1], path, n));
    const auto index = static_cast<std::size_t>(ParseNum(c[2], path, n));
    const double truth = ParseNum(c[3], path, n);
    const double pred = ParseNum(c[4], path, n);
    if ((truth != 0.0 && truth != 1.0) || (pred != 0.0 && pred != 1.0)) {
      throw ParseError(at + ": labels must be 0 or 1", n);
    }
    auto [it, inserted] = where.try_emplace({c[0], fold}, folds.size());
    if (inserted) folds.push_back(PredictionFold{c[0], fold, {}, {}});
    auto& f = folds[it->second];
    if (index != f.truth.size()) throw ParseError(at + ": window indices must be consecutive from 0", n);
    f.truth.push_back(static_cast<std::uint8_t>(truth));
    f.pred.push_back(static_cast<std::uint8_t>(pred));
  }
  return folds;
}

std::vector<FoldResult> EvaluatePredictions(std::span<const PredictionFold> folds, const std::string& name,
                                            double step_sec, const PostProcessing& post) {
  std::vector<FoldResult> out;
  for (const auto& f : folds) out.push_back(ScoreFold(f.subject, f.fold, name, f.truth, f.pred, step_sec, post));
  return out;
}

void WriteManifest(const std::filesystem::path& dir, const std::string& stage, const ExperimentConfig& config,
                   const std::vector<std::pair<std::string, std::string>>& extra) {
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["experiment"] = config.name;
  j["code_version"] = std::string(CodeVersion());
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
  j["created_utc"] = stamp;
  char host[256] = {};
  gethostname(host, sizeof(host) - 1);
  j["machine"] = {{"hostname", host},
                  {"hardware_threads", std::thread::hardware_concurrency()},
                  {"compiler", __VERSION__}};
  j["seeds"] = {{"experiment", config.seed}, {"item_memory", config.hd.seed}, {"dataset", config.dataset.seed}};
  j["config"] = nlohmann::ordered_json::parse(ConfigJson(config));
  j["config_text"] = RenderConfig(config);
  for (const auto& [k, v] : extra) j["extra"][k] = v;
  auto out = OpenOut(dir / ("manifest_" + stage + ".json"));
  out << j.dump(2) << '\n';
}

std::vector<std::string> WriteReport(const std::filesystem::path& exp_dir) {
  std::vector<std::string> names;
  if (std::filesystem::is_directory(exp_dir)) {
    for (const auto& e : std::filesystem::directory_iterator(exp_dir)) {
      if (e.is_directory() && std::filesystem::exists(e.path() / "per_subject.csv")) {
        names.push_back(e.path().filename().string());
      }
    }
  }
  if (names.empty()) throw Error("no per_subject.csv found under " + exp_dir.string());
  std::sort(names.begin(), names.end());

  std::map<std::string, std::vector<SubjectSummary>> by_strategy;
  for (const auto& n : names) by_strategy[n] = ReadSubjectCsv(exp_dir / n / "per_subject.csv");

  std::vector<SubjectSummary> all;
  for (const auto& n : names) all.insert(all.end(), by_strategy[n].begin(), by_strategy[n].end());
  WriteSubjectCsv(exp_dir / "report.csv", all);

  nlohmann::ordered_json j;
  j["experiment_dir"] = exp_dir.filename().string();
  for (const auto& n : names) {
    nlohmann::ordered_json s;
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& row : by_strategy[n]) {
      s["subjects"][row.subject] = {{"f1_de_mean", row.mean.f1_de_mean}, {"flag", row.flag()}};
      if (row.ok()) {
        sum += row.mean.f1_de_mean;
        ++used;
      }
    }
    s["mean_f1_de_mean"] = used > 0 ? sum / static_cast<double>(used) : 0.0;
    s["subjects_used"] = used;
    j["strategies"][n] = s;
  }
  j["comparisons"] = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      nlohmann::ordered_json c{{"strategy_a", names[a]}, {"strategy_b", names[b]}};
      try {
        const auto r = CompareStrategies(by_strategy[names[a]], by_strategy[names[b]]);
        c["subjects"] = r.subjects;
        c["mean_diff"] = r.mean_diff;
        c["p_value"] = r.p_value;
        c["exact"] = r.exact;
        c["insufficient_data"] = r.insufficient;
        c["excluded"] = r.excluded;
      } catch (const InvalidArgument& e) {
        c["error"] = e.what();
      }
      j["comparisons"].push_back(c);
    }
  }
  auto out = OpenOut(exp_dir / "report.json");
  out << j.dump(2) << '\n';
  return names;
}

}  // namespace hdseizure

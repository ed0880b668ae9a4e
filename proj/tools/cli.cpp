/*
 * Copyright 2026 The erpvis Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <Eigen/Core>
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "erpvis/checkpoint.hpp"
#include "erpvis/dataset_io.hpp"
#include "erpvis/eeg_data.hpp"
#include "erpvis/erp.hpp"
#include "erpvis/error.hpp"
#include "erpvis/log.hpp"
#include "erpvis/parallel.hpp"
#include "erpvis/protocol.hpp"
#include "erpvis/report.hpp"
#include "erpvis/trainer.hpp"

#ifndef ERPVIS_VERSION
#define ERPVIS_VERSION "0.0.0"
#endif

namespace erpvis::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string in;
  std::string out;
  std::string model;
  std::string split = "test";
  std::uint64_t seed = 1;
  int n = 12;
  std::string labels = "category";
  std::string protocol = "cross";
  std::string input_kind = "erp";
  int epochs = 50;
  int batch = 32;
  double lr = 1e-3;
  int hidden = 128;
  int layers = 1;
  int repr = 128;
  double clip = 5.0;
  std::string loss = "categorical";
  int threads = DefaultThreads();
  std::string format = "json";

  // Generator.
  bool synthetic = false;
  int subjects = 10;
  int categories = 6;
  int exemplars_per_category = 12;
  int trials = 72;
  int channels = 124;
  int samples = 31;
  double snr_db = -10.0;
  bool noiseless = false;
  int jitter = 1;
  std::string noise = "background";
};

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void RequireExisting(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::exists(path)) throw UsageError(std::string(flag) + " path does not exist: " + path);
}

json Versions() {
  return {{"erpvis", ERPVIS_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__},
          {"container_format", kContainerVersion},
          {"checkpoint_format", kCheckpointVersion}};
}

// Written next to every output; holds no timestamps or host details so that
// identical runs produce identical bytes.
void WriteManifest(const fs::path& path, const std::string& command, const json& config) {
  const json doc = {{"tool", "erpvis"}, {"command", command}, {"config", config}, {"versions", Versions()}};
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write manifest " + path.string());
  f << doc.dump(2) << '\n';
}

fs::path ManifestBeside(const fs::path& out) {
  if (fs::is_directory(out)) return out / "run_manifest.json";
  return fs::path(out.string() + ".manifest.json");
}

void Emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  if (out_path.find_last_of("/\\") != std::string::npos) {
    const fs::path parent = fs::path(out_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write " + out_path);
  f << text;
}

SynthConfig GeneratorConfig(const Options& o) {
  SynthConfig c;
  c.n_subjects = o.subjects;
  c.n_categories = o.categories;
  c.n_exemplars_per_category = o.exemplars_per_category;
  c.trials_per_image = o.trials;
  c.channels = o.channels;
  c.samples_per_trial = o.samples;
  c.single_trial_snr_db = o.snr_db;
  c.disable_noise = o.noiseless;
  c.latency_jitter_samples = o.jitter;
  c.noise_model = o.noise == "white" ? NoiseModel::kWhite : NoiseModel::kBackground;
  c.seed = o.seed;
  return c;
}

json GeneratorJson(const SynthConfig& c) {
  return {{"n_subjects", c.n_subjects},
          {"n_categories", c.n_categories},
          {"n_exemplars_per_category", c.n_exemplars_per_category},
          {"trials_per_image", c.trials_per_image},
          {"channels", c.channels},
          {"samples_per_trial", c.samples_per_trial},
          {"single_trial_snr_db", c.disable_noise ? json("inf") : json(c.single_trial_snr_db)},
          {"latency_jitter_samples", c.latency_jitter_samples},
          {"noise_model", ToString(c.noise_model)},
          {"seed", c.seed}};
}

PipelineConfig Pipeline(const Options& o) {
  PipelineConfig p;
  p.n_average = o.n;
  p.hidden_size = o.hidden;
  p.num_layers = o.layers;
  p.repr_dim = o.repr;
  p.train.epochs = o.epochs;
  p.train.batch_size = o.batch;
  p.train.learning_rate = o.lr;
  p.train.grad_clip_norm = o.clip > 0.0 ? std::optional<double>(o.clip) : std::nullopt;
  p.train.loss = ParseLossVariant(o.loss);
  p.seed = o.seed;
  p.threads = o.threads;
  return p;
}

// Training and evaluation must rebuild exactly the same split, so both go
// through here.
PreparedSplit LoadSplit(const std::string& path, InputKind input_kind, int n, int train_parts,
                        int test_parts, std::uint64_t seed, int threads) {
  if (ContainerKind(path) == "erp") {
    ERPSpace space = LoadErpSpace(path);
    const int stored = space.provenance.n_averaged;
    if (input_kind == InputKind::kRawTrial && stored != 1) {
      throw UsageError("--input-kind raw conflicts with an ERP container averaged over n = " +
                       std::to_string(stored));
    }
    PreparedSplit split;
    split.averaging = stored;
    split.train_per_image = TrainPerImage(UniformGroupSize(space), train_parts, test_parts);
    auto [train, test] = SplitErpSpace(space, split.train_per_image, seed);
    AssertNoLeakage(train, test);
    split.train = std::move(train);
    split.test = std::move(test);
    return split;
  }
  PipelineConfig cfg;
  cfg.n_average = n;
  cfg.train_parts = train_parts;
  cfg.test_parts = test_parts;
  return PrepareSplit(LoadDataset(path), input_kind, cfg, seed, threads);
}

void AddTrainingFlags(CLI::App* app, Options& o) {
  app->add_option("--epochs", o.epochs, "Training epochs")->check(CLI::PositiveNumber);
  app->add_option("--batch", o.batch, "Mini-batch size")->check(CLI::PositiveNumber);
  app->add_option("--lr", o.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  app->add_option("--hidden", o.hidden, "LSTM hidden size")->check(CLI::PositiveNumber);
  app->add_option("--layers", o.layers, "Stacked LSTM layers")->check(CLI::PositiveNumber);
  app->add_option("--repr", o.repr, "Representation (ReLU projection) size")->check(CLI::PositiveNumber);
  app->add_option("--clip", o.clip, "Global gradient-norm clip, 0 disables")->check(CLI::NonNegativeNumber);
  app->add_option("--loss", o.loss, "Loss variant")->check(CLI::IsMember({"categorical", "eq2"}));
}

void AddGeneratorFlags(CLI::App* app, Options& o) {
  app->add_option("--subjects", o.subjects, "Number of subjects")->check(CLI::PositiveNumber);
  app->add_option("--categories", o.categories, "Number of categories")->check(CLI::PositiveNumber);
  app->add_option("--exemplars-per-category", o.exemplars_per_category, "Exemplars per category")
      ->check(CLI::PositiveNumber);
  app->add_option("--trials", o.trials, "Trials per image")->check(CLI::PositiveNumber);
  app->add_option("--channels", o.channels, "Channels")->check(CLI::PositiveNumber);
  app->add_option("--samples", o.samples, "Samples per trial")->check(CLI::PositiveNumber);
  app->add_option("--snr-db", o.snr_db, "Single-trial SNR in dB");
  app->add_flag("--noiseless", o.noiseless, "Disable noise");
  app->add_option("--jitter", o.jitter, "Latency jitter in samples")->check(CLI::NonNegativeNumber);
  app->add_option("--noise", o.noise, "Noise model")->check(CLI::IsMember({"background", "white"}));
}

void AddThreads(CLI::App* app, Options& o) {
  app->add_option("--threads", o.threads, "Worker threads (default: available cores)")
      ->check(CLI::PositiveNumber);
}

int Generate(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  const SynthConfig cfg = GeneratorConfig(o);
  const Dataset ds = GenerateSyntheticDataset(cfg, o.threads);
  SaveDataset(ds, o.out);
  log::Info("wrote " + std::to_string(ds.trials.size()) + " trials to " + o.out);
  WriteManifest(ManifestBeside(o.out), "generate", {{"generator", GeneratorJson(cfg)}, {"out", o.out}});
  return kOk;
}

int Extract(const Options& o) {
  RequireExisting(o.in, "--in");
  if (o.out.empty()) throw UsageError("--out is required");
  if (ContainerKind(o.in) != "eeg") throw UsageError("--in must be a trial dataset, not an ERP container");
  const ERPSpace space = BuildErpSpace(LoadDataset(o.in), o.n, o.seed, o.threads);
  SaveErpSpace(space, o.out);
  log::Info("wrote " + std::to_string(space.sequences.size()) + " ERP sequences to " + o.out);
  WriteManifest(ManifestBeside(o.out), "extract",
                {{"in", o.in}, {"out", o.out}, {"n", o.n}, {"seed", o.seed},
                 {"n_sequences", space.sequences.size()}});
  return kOk;
}

int TrainCommand(const Options& o, bool n_given, bool input_kind_given) {
  RequireExisting(o.in, "--in");
  if (o.out.empty()) throw UsageError("--out is required");
  const PipelineConfig cfg = Pipeline(o);
  cfg.Validate();
  const LabelKind label_kind = ParseLabelKind(o.labels);
  const InputKind input_kind = ParseInputKind(o.input_kind);
  const bool erp_container = ContainerKind(o.in) == "erp";
  if (erp_container && n_given) throw UsageError("--n applies to trial datasets; the ERP container is already averaged");
  if (!erp_container && input_kind_given && n_given && input_kind == InputKind::kRawTrial && o.n != 1) {
    throw UsageError("--input-kind raw conflicts with --n " + std::to_string(o.n));
  }

  const PreparedSplit split =
      LoadSplit(o.in, input_kind, o.n, cfg.train_parts, cfg.test_parts, o.seed, o.threads);
  const int averaging = erp_container ? split.averaging : (input_kind == InputKind::kRawTrial ? 1 : o.n);

  LstmHyper hyper;
  hyper.input_size = split.train.channel_count;
  hyper.hidden_size = cfg.hidden_size;
  hyper.num_layers = cfg.num_layers;
  hyper.repr_dim = cfg.repr_dim;
  hyper.num_classes = NumClasses(split.train, label_kind);
  TrainConfig tc = cfg.train;
  tc.label_kind = label_kind;
  tc.input_kind = input_kind;
  tc.seed = o.seed;
  tc.threads = o.threads;
  TrainResult trained = Train(LstmModel::Initialize(hyper, o.seed), split.train, tc);

  Checkpoint ckpt{std::move(trained.model), {}};
  ckpt.info = {{"label_kind", ToString(label_kind)},
               {"input_kind", ToString(input_kind)},
               {"seed", std::to_string(o.seed)},
               {"n_average", std::to_string(averaging)},
               {"split_ratio", std::to_string(cfg.train_parts) + ":" + std::to_string(cfg.test_parts)},
               {"train_per_image", std::to_string(split.train_per_image)},
               {"container", erp_container ? "erp" : "eeg"},
               {"source_id", split.train.provenance.source_id},
               {"loss", ToString(tc.loss)},
               {"epochs", std::to_string(tc.epochs)},
               {"batch_size", std::to_string(tc.batch_size)},
               {"learning_rate", Num(tc.learning_rate)},
               {"grad_clip_norm", tc.grad_clip_norm ? Num(*tc.grad_clip_norm) : "none"},
               {"n_train", std::to_string(split.train.sequences.size())},
               {"final_train_loss", Num(trained.loss_curve.back())}};
  const fs::path out(o.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  SaveCheckpoint(ckpt, out);
  log::Info("final training loss " + Num(trained.loss_curve.back()) + "; checkpoint " + o.out);

  json config = tc.ToJson();
  config["hidden_size"] = hyper.hidden_size;
  config["num_layers"] = hyper.num_layers;
  config["repr_dim"] = hyper.repr_dim;
  config["num_classes"] = hyper.num_classes;
  config["n_average"] = averaging;
  config["split_ratio"] = {cfg.train_parts, cfg.test_parts};
  config["in"] = o.in;
  WriteManifest(ManifestBeside(out), "train", {{"config", config}, {"loss_curve", trained.loss_curve}});
  return kOk;
}

int Info(const std::map<std::string, std::string>& info, const char* key) {
  auto it = info.find(key);
  if (it == info.end()) throw FormatError(std::string("checkpoint: header missing ") + key);
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw FormatError(std::string("checkpoint: header field ") + key + " is not an integer");
  }
}

std::string InfoText(const std::map<std::string, std::string>& info, const char* key) {
  auto it = info.find(key);
  if (it == info.end()) throw FormatError(std::string("checkpoint: header missing ") + key);
  return it->second;
}

int Eval(const Options& o, std::ostream& out) {
  RequireExisting(o.model, "--model");
  RequireExisting(o.in, "--in");
  const ReportFormat format = ParseReportFormat(o.format);
  const Checkpoint ckpt = LoadCheckpoint(o.model);
  const LabelKind label_kind = ParseLabelKind(InfoText(ckpt.info, "label_kind"));
  const InputKind input_kind = ParseInputKind(InfoText(ckpt.info, "input_kind"));
  const std::uint64_t seed = std::stoull(InfoText(ckpt.info, "seed"));
  const std::string ratio = InfoText(ckpt.info, "split_ratio");
  const auto colon = ratio.find(':');
  if (colon == std::string::npos) throw FormatError("checkpoint: malformed split_ratio '" + ratio + "'");
  const int train_parts = std::stoi(ratio.substr(0, colon));
  const int test_parts = std::stoi(ratio.substr(colon + 1));

  const PreparedSplit split = LoadSplit(o.in, input_kind, Info(ckpt.info, "n_average"), train_parts,
                                        test_parts, seed, o.threads);
  if (split.averaging != Info(ckpt.info, "n_average")) {
    throw UsageError("--in was averaged over n = " + std::to_string(split.averaging) +
                     " but the model was trained on n = " + InfoText(ckpt.info, "n_average"));
  }
  ERPSpace data;
  if (o.split == "train") {
    data = split.train;
  } else if (o.split == "test") {
    data = split.test;
  } else {
    data = split.train;
    data.sequences.insert(data.sequences.end(), split.test.sequences.begin(), split.test.sequences.end());
  }

  EvalReport report = Evaluate(ckpt.model, data, label_kind, o.threads);
  report.input_kind = input_kind;
  const auto subjects = data.Subjects();
  if (subjects.size() == 1) {
    report.protocol = ToString(Protocol::kWithinSubject);
    report.subject_id = subjects.front();
  }
  report.n_train = static_cast<int>(split.train.sequences.size());
  report.config = json(ckpt.info);
  report.config["split"] = o.split;

  std::string text;
  switch (format) {
    case ReportFormat::kJson: text = ToJson(report).dump(2) + '\n'; break;
    case ReportFormat::kCsv: text = RenderCsv(report); break;
    case ReportFormat::kText: text = RenderText(report); break;
  }
  Emit(text, o.out, out);
  if (!o.out.empty()) {
    WriteManifest(ManifestBeside(o.out), "eval",
                  {{"model", o.model}, {"in", o.in}, {"split", o.split}, {"format", o.format},
                   {"checkpoint_info", ckpt.info}});
  }
  return kOk;
}

int Compare(const Options& o, std::ostream& out) {
  if (o.synthetic == !o.in.empty()) {
    throw UsageError(o.synthetic ? "--in and --synthetic are mutually exclusive"
                                 : "one of --in or --synthetic is required");
  }
  if (!o.in.empty()) RequireExisting(o.in, "--in");
  const ReportFormat format = ParseReportFormat(o.format);
  const PipelineConfig cfg = Pipeline(o);
  cfg.Validate();

  std::vector<Protocol> protocols;
  if (o.protocol == "both") {
    protocols = {Protocol::kCrossSubject, Protocol::kWithinSubject};
  } else {
    protocols = {ParseProtocol(o.protocol)};
  }
  std::vector<LabelKind> label_kinds;
  if (o.labels == "both") {
    label_kinds = {LabelKind::kCategory, LabelKind::kExemplar};
  } else {
    label_kinds = {ParseLabelKind(o.labels)};
  }

  json source;
  Dataset ds;
  if (o.synthetic) {
    const SynthConfig gen = GeneratorConfig(o);
    ds = GenerateSyntheticDataset(gen, o.threads);
    source = {{"synthetic", GeneratorJson(gen)}};
  } else {
    if (ContainerKind(o.in) != "eeg") throw UsageError("compare needs a trial dataset, not an ERP container");
    ds = LoadDataset(o.in);
    source = {{"in", o.in}};
  }

  ComparisonTable table = CompareFrameworks(ds, protocols, label_kinds, cfg);
  table.config["source"] = source;
  Emit(Render(table, format), o.out, out);
  if (!o.out.empty()) {
    WriteManifest(ManifestBeside(o.out), "compare",
                  {{"pipeline", cfg.ToJson()}, {"source", source}, {"protocol", o.protocol},
                   {"labels", o.labels}, {"format", o.format}});
  }
  return kOk;
}

EvalReport EvalReportFromJson(const json& doc) {
  EvalReport r;
  r.protocol = doc.at("protocol").get<std::string>();
  if (doc.contains("subject_id")) r.subject_id = doc.at("subject_id").get<int>();
  r.label_kind = ParseLabelKind(doc.at("label_kind").get<std::string>());
  r.input_kind = ParseInputKind(doc.at("input_kind").get<std::string>());
  r.accuracy = doc.at("accuracy").get<double>();
  r.n_train = doc.at("n_train").get<int>();
  r.n_test = doc.at("n_test").get<int>();
  const auto& conf = doc.at("confusion");
  const auto k = static_cast<Eigen::Index>(conf.size());
  r.confusion = Eigen::MatrixXi::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& row = conf.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != k) throw FormatError("report: confusion matrix is not square");
    for (Eigen::Index j = 0; j < k; ++j) r.confusion(i, j) = row.at(static_cast<std::size_t>(j)).get<int>();
  }
  if (doc.contains("config")) r.config = doc.at("config");
  return r;
}

int Report(const Options& o, std::ostream& out) {
  RequireExisting(o.in, "--in");
  const ReportFormat format = ParseReportFormat(o.format);
  std::ifstream f(o.in, std::ios::binary);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError("report: " + o.in + " is not valid JSON (" + e.what() + ")");
  }

  std::string text;
  if (doc.is_object() && doc.contains("rows")) {
    text = Render(ComparisonFromJson(doc), format);
  } else if (doc.is_object() && doc.contains("confusion")) {
    EvalReport r;
    try {
      r = EvalReportFromJson(doc);
    } catch (const json::exception& e) {
      throw FormatError(std::string("report: malformed evaluation report (") + e.what() + ")");
    }
    switch (format) {
      case ReportFormat::kJson: text = ToJson(r).dump(2) + '\n'; break;
      case ReportFormat::kCsv: text = RenderCsv(r); break;
      case ReportFormat::kText: text = RenderText(r); break;
    }
  } else {
    throw FormatError("report: " + o.in + " is neither a comparison table nor an evaluation report");
  }
  Emit(text, o.out, out);
  if (!o.out.empty()) {
    WriteManifest(ManifestBeside(o.out), "report", {{"in", o.in}, {"format", o.format}});
  }
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  log::SetLevel(log::LevelFromEnv());
  Options o;
  CLI::App app{"ERP extraction and LSTM classification of visual-stimulus EEG", "erpvis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ERPVIS_VERSION);

  auto* gen = app.add_subcommand("generate", "Write a seeded synthetic trial dataset");
  gen->add_option("--out", o.out, "Output dataset directory");
  gen->add_option("--seed", o.seed, "Generator seed");
  AddGeneratorFlags(gen, o);
  AddThreads(gen, o);

  auto* ext = app.add_subcommand("extract", "Average trial subsets into ERP sequences");
  ext->add_option("--in", o.in, "Trial dataset directory");
  ext->add_option("--out", o.out, "Output ERP container directory");
  ext->add_option("--n", o.n, "Averaging factor")->check(CLI::PositiveNumber);
  ext->add_option("--seed", o.seed, "Partition seed");
  AddThreads(ext, o);

  auto* train = app.add_subcommand("train", "Train an LSTM classifier and write a checkpoint");
  train->add_option("--in", o.in, "ERP container or trial dataset directory");
  train->add_option("--out", o.out, "Checkpoint path");
  train->add_option("--seed", o.seed, "Split, initialisation and shuffle seed");
  train->add_option("--labels", o.labels, "Label granularity")->check(CLI::IsMember({"category", "exemplar"}));
  auto* train_n = train->add_option("--n", o.n, "Averaging factor for trial datasets")->check(CLI::PositiveNumber);
  auto* train_kind =
      train->add_option("--input-kind", o.input_kind, "ERP or single raw trials")->check(CLI::IsMember({"erp", "raw"}));
  AddTrainingFlags(train, o);
  AddThreads(train, o);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the train or test split");
  eval->add_option("--model", o.model, "Checkpoint path");
  eval->add_option("--in", o.in, "ERP container or trial dataset the model was trained from");
  eval->add_option("--split", o.split, "Which side of the split")->check(CLI::IsMember({"train", "test", "all"}));
  eval->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  eval->add_option("--out", o.out, "Report path (default: standard output)");
  AddThreads(eval, o);

  auto* cmp = app.add_subcommand("compare", "Raw-trial baseline versus ERP pipeline");
  cmp->add_option("--in", o.in, "Trial dataset directory");
  cmp->add_flag("--synthetic", o.synthetic, "Generate the synthetic dataset in memory instead of --in");
  cmp->add_option("--seed", o.seed, "Run seed (and generator seed with --synthetic)");
  cmp->add_option("--n", o.n, "Averaging factor")->check(CLI::PositiveNumber);
  cmp->add_option("--protocol", o.protocol, "Evaluation protocol")->check(CLI::IsMember({"cross", "within", "both"}));
  cmp->add_option("--labels", o.labels, "Label granularity")->check(CLI::IsMember({"category", "exemplar", "both"}));
  cmp->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  cmp->add_option("--out", o.out, "Table path (default: standard output)");
  AddTrainingFlags(cmp, o);
  AddGeneratorFlags(cmp, o);
  AddThreads(cmp, o);

  auto* rep = app.add_subcommand("report", "Re-render a comparison table or evaluation report");
  rep->add_option("--in", o.in, "JSON document from compare or eval");
  rep->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  rep->add_option("--out", o.out, "Output path (default: standard output)");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("erpvis");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << ERPVIS_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "erpvis: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) err << "run 'erpvis " << app.get_subcommands().front()->get_name() << " --help' for usage\n";
    return kUsageError;
  }

  try {
    if (gen->parsed()) return Generate(o);
    if (ext->parsed()) return Extract(o);
    if (train->parsed()) return TrainCommand(o, train_n->count() > 0, train_kind->count() > 0);
    if (eval->parsed()) return Eval(o, out);
    if (cmp->parsed()) return Compare(o, out);
    if (rep->parsed()) return Report(o, out);
  } catch (const UsageError& e) {
    err << "erpvis: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "erpvis: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParameterError& e) {
    err << "erpvis: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "erpvis: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "erpvis: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "erpvis: " << e.what() << "\n";
    return kDataError;
  }
  err << "erpvis: no subcommand given\n";
  return kUsageError;
}

}  // namespace erpvis::cli

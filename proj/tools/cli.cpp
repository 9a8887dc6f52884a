#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "burnsight/backbone.hpp"
#include "burnsight/checkpoint.hpp"
#include "burnsight/error.hpp"
#include "burnsight/fvec.hpp"
#include "burnsight/image_io.hpp"
#include "burnsight/lime.hpp"
#include "burnsight/manifest.hpp"
#include "burnsight/pipeline.hpp"
#include "burnsight/render.hpp"
#include "burnsight/report.hpp"
#include "burnsight/saliency.hpp"
#include "burnsight/synth.hpp"
#include "burnsight/train.hpp"
#include "burnsight/tukey.hpp"

namespace burnsight::cli {
namespace fs = std::filesystem;

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  int per_class = 0;
  int size = 224;
  std::uint64_t seed = 0;
  int val_per_class = 0;
  int test_per_class = 0;
};

void add_synth(CLI::App& app, SynthArgs& a) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic speckle dataset and manifest");
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--per-class", a.per_class, "Images per class")->required()->check(CLI::Range(1, INT_MAX));
  cmd->add_option("--size", a.size, "Image side in pixels")->check(CLI::Range(32, 4096));
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->add_option("--val-per-class", a.val_per_class, "Images per class assigned to the val split")
      ->check(CLI::Range(0, INT_MAX));
  cmd->add_option("--test-per-class", a.test_per_class, "Images per class assigned to the test split")
      ->check(CLI::Range(0, INT_MAX));
}

void run_synth(const SynthArgs& a, std::ostream& out) {
  imaging::SynthConfig config;
  config.per_class_count = a.per_class;
  config.image_size = a.size;
  config.seed = a.seed;
  config.val_per_class = a.val_per_class;
  config.test_per_class = a.test_per_class;
  config.validate();
  imaging::generate_synthetic_dataset(config, a.out);
  out << (fs::path(a.out) / "manifest.csv").string() << "\n";
}

// ---- features ---------------------------------------------------------------

struct FeaturesArgs {
  std::string manifest;
  std::string out;
};

void add_features(CLI::App& app, FeaturesArgs& a) {
  auto* cmd = app.add_subcommand("features", "Write builtin backbone vectors for a manifest as FVEC");
  cmd->add_option("--manifest", a.manifest, "Dataset manifest CSV")->required();
  cmd->add_option("--out", a.out, "Output .fvec path")->required();
}

void run_features(const FeaturesArgs& a, std::ostream& out) {
  const auto manifest = imaging::load_manifest(a.manifest);
  const auto table = pipeline::extract_features(manifest, model::BackboneSource{});
  model::FeatureMatrix matrix;
  matrix.dim = static_cast<std::uint32_t>(table.raw_dim);
  matrix.values.assign(table.v1.begin(), table.v1.end());
  ensure_parent(a.out);
  model::save_fvec(matrix, a.out, {{"backbone", "builtin-pool"}, {"manifest", a.manifest}});
  out << a.out << "\n";
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string backbone = "builtin";
  std::string glcm = "none";
  int epochs = 30;
  double lr = 1e-5;
  int batch = 8;
  std::uint64_t seed = 0;
  int per_class_limit = 0;
  bool raw_v2 = false;
  std::string out;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train", "Train a fusion model on the train split");
  cmd->add_option("--manifest", a.manifest, "Dataset manifest CSV")->required();
  cmd->add_option("--backbone", a.backbone, "builtin or fvec:PATH");
  cmd->add_option("--glcm", a.glcm, "none, all, or comma-separated Haralick features");
  cmd->add_option("--epochs", a.epochs, "Training epochs")->check(CLI::Range(1, INT_MAX));
  cmd->add_option("--lr", a.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--batch", a.batch, "Mini-batch size")->check(CLI::Range(1, INT_MAX));
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->add_option("--per-class-limit", a.per_class_limit, "Train rows sampled per class (0 = all)")
      ->check(CLI::Range(0, INT_MAX));
  cmd->add_flag("--raw-texture", a.raw_v2, "Feed texture features without standardization");
  cmd->add_option("--out", a.out, "Checkpoint path")->required();
}

void run_train(const TrainArgs& a, std::ostream& out) {
  const auto selection = texture::FeatureSelection::parse(a.glcm);
  const auto backbone = model::BackboneSource::parse(a.backbone);
  model::TrainConfig config;
  config.epochs = a.epochs;
  config.learning_rate = a.lr;
  config.batch_size = a.batch;
  config.seed = a.seed;
  config.per_class_limit = a.per_class_limit;
  config.standardize_v2 = !a.raw_v2;
  config.validate();

  const auto manifest = imaging::load_manifest(a.manifest);
  imaging::require_all_labels_in_train(manifest);
  const auto table = pipeline::extract_features(manifest, backbone);
  const auto rows = table.indices(imaging::Split::kTrain);
  const auto data = pipeline::make_training_set(table, rows, selection);
  out << "epoch,loss\n";
  const auto result = model::train(data, pipeline::make_metadata(table, selection), config,
                                   [&](int epoch, double loss) { out << epoch << "," << exact(loss) << "\n"; });
  ensure_parent(a.out);
  model::save_checkpoint(result.model, a.out);
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string manifest;
  std::string split = "test";
  std::string report;
  std::string fvec;
  std::uint64_t seed = 0;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* cmd = app.add_subcommand("eval", "Evaluate a checkpoint on one manifest split");
  cmd->add_option("--model", a.model, "Checkpoint path")->required();
  cmd->add_option("--manifest", a.manifest, "Dataset manifest CSV")->required();
  cmd->add_option("--split", a.split, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
  cmd->add_option("--report", a.report, "Report JSON to write")->required();
  cmd->add_option("--fvec", a.fvec, "Feature file for feature-file models");
  cmd->add_option("--seed", a.seed, "Seed recorded with the run");
}

void run_eval(const EvalArgs& a, std::ostream& out) {
  const auto model = model::load_checkpoint(a.model);
  const auto manifest = imaging::load_manifest(a.manifest);
  const auto split = *imaging::parse_split(a.split);
  if (manifest.indices(split).empty()) throw UsageError("split '" + a.split + "' has no entries");

  model::BackboneSource backbone;
  if (model.metadata().backbone == model::BackboneKind::kFeatureFile) {
    if (a.fvec.empty()) throw UsageError("feature-file model needs --fvec");
    backbone = model::BackboneSource::parse("fvec:" + a.fvec);
  } else if (!a.fvec.empty()) {
    throw UsageError("--fvec given but the model uses the builtin backbone");
  }
  const auto table = pipeline::extract_features(manifest, backbone, model.metadata().glcm_levels);
  const auto metrics = pipeline::evaluate(model, table, table.indices(split));

  evalstats::MetricsReport report;
  report.group = model.metadata().selection.name();
  report.class_names = model.metadata().class_names;
  report.runs.push_back({a.seed, metrics});
  ensure_parent(a.report);
  evalstats::save_reports(a.report, std::span(&report, 1));
  out << "accuracy," << exact(metrics.accuracy) << "\n";
  out << "precision," << exact(metrics.precision) << "\n";
  out << "recall," << exact(metrics.recall) << "\n";
  out << "f1," << exact(metrics.f1) << "\n";
}

// ---- runs -------------------------------------------------------------------

struct RunsArgs {
  std::string spec;
  std::string out;
};

void add_runs(CLI::App& app, RunsArgs& a) {
  auto* cmd = app.add_subcommand("runs", "Train and evaluate a grid of feature selections and seeds");
  cmd->add_option("--spec", a.spec, "Run spec JSON")->required();
  cmd->add_option("--out", a.out, "Output directory for report.json and table1.csv")->required();
}

void run_runs(const RunsArgs& a, std::ostream& out) {
  const fs::path spec_path(a.spec);
  const auto spec = pipeline::RunSpec::parse(read_text(spec_path), spec_path.parent_path());
  const auto manifest = imaging::load_manifest(spec.manifest);
  const auto table = pipeline::extract_features(manifest, model::BackboneSource::parse(spec.backbone));
  const auto reports = pipeline::run_grid(spec, table);

  ensure_dir(a.out);
  evalstats::save_reports(fs::path(a.out) / "report.json", reports);
  write_text(fs::path(a.out) / "table1.csv", evalstats::table1_csv(reports));
  out << "group,seed,accuracy\n";
  for (const auto& r : reports) {
    for (const auto& run : r.runs) out << r.group << "," << run.seed << "," << exact(run.metrics.accuracy) << "\n";
  }
}

// ---- explain ----------------------------------------------------------------

struct ExplainArgs {
  std::string model;
  std::string image;
  std::string segmenter = "quickshift";
  int samples = 10000;
  int topk = 5;
  std::uint64_t seed = 0;
  double kernel_width = 0.25;
  double ridge = 1.0;
  int target_class = -1;
  std::string fvec_row;
  std::string out;
};

void add_explain(CLI::App& app, ExplainArgs& a) {
  auto* cmd = app.add_subcommand("explain", "Explain one prediction with LIME and gradient saliency");
  cmd->add_option("--model", a.model, "Checkpoint path")->required();
  cmd->add_option("--image", a.image, "Image to explain")->required();
  cmd->add_option("--segmenter", a.segmenter, "quickshift, felzenszwalb or grid:RxC");
  cmd->add_option("--samples", a.samples, "Perturbation samples")->check(CLI::Range(1, INT_MAX));
  cmd->add_option("--topk", a.topk, "Segments kept by the surrogate")->check(CLI::Range(1, INT_MAX));
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->add_option("--kernel-width", a.kernel_width, "Kernel width sigma")->check(CLI::PositiveNumber);
  cmd->add_option("--ridge", a.ridge, "Ridge penalty")->check(CLI::NonNegativeNumber);
  cmd->add_option("--class", a.target_class, "Class to explain (default: predicted)")->check(CLI::Range(0, 2));
  cmd->add_option("--fvec-row", a.fvec_row, "PATH:INDEX backbone row for feature-file models");
  cmd->add_option("--out", a.out, "Artifact directory")->required();
}

std::vector<double> load_fvec_row(const std::string& spec) {
  const auto colon = spec.rfind(':');
  if (colon == std::string::npos) throw UsageError("--fvec-row expects PATH:INDEX");
  std::size_t index = 0;
  const char* first = spec.data() + colon + 1;
  const char* last = spec.data() + spec.size();
  const auto [ptr, ec] = std::from_chars(first, last, index);
  if (ec != std::errc() || ptr != last || first == last) throw UsageError("--fvec-row index is not a number");
  const auto matrix = model::load_fvec(spec.substr(0, colon));
  if (index >= matrix.count()) throw UsageError("--fvec-row index out of range");
  const auto row = matrix.row(index);
  return {row.begin(), row.end()};
}

void run_explain(const ExplainArgs& a, std::ostream& out, std::ostream& err) {
  pipeline::validate_segmenter_spec(a.segmenter);
  explain::LimeConfig config;
  config.num_samples = a.samples;
  config.top_k = a.topk;
  config.seed = a.seed;
  config.kernel_width = a.kernel_width;
  config.ridge_lambda = a.ridge;
  if (a.target_class >= 0) config.target_class = a.target_class;
  config.validate();

  const auto model = model::load_checkpoint(a.model);
  const bool feature_file = model.metadata().backbone == model::BackboneKind::kFeatureFile;
  std::optional<std::vector<double>> fixed_v1;
  if (feature_file) {
    if (a.fvec_row.empty()) throw UsageError("feature-file model needs --fvec-row PATH:INDEX");
    fixed_v1 = load_fvec_row(a.fvec_row);
  } else if (!a.fvec_row.empty()) {
    throw UsageError("--fvec-row given but the model uses the builtin backbone");
  }

  const auto img = pipeline::load_model_input(a.image);
  const auto segments = pipeline::run_segmenter(img, a.segmenter);
  const auto classifier = pipeline::model_classifier(model, fixed_v1);
  const auto explanation = explain::explain(classifier, img, segments, config);

  const fs::path dir(a.out);
  ensure_dir(dir);
  write_text(dir / "scores.json", explain::scores_json(explanation));
  imaging::save_png_rgb(explain::render_heatmap(explanation, segments), dir / "heatmap.png");
  imaging::save_png_rgb(explain::render_overlay(explanation, segments, img, a.topk), dir / "overlay.png");
  segmentation::save_segment_png(segments, dir / "segments.png");
  if (feature_file) {
    err << "warning: saliency needs the builtin backbone; saliency.png skipped\n";
  } else {
    const auto saliency = explain::gradient_saliency(model, img, explanation.target_class);
    imaging::save_png8(explain::saliency_image(saliency), dir / "saliency.png");
  }
  out << "target_class," << explanation.target_class << "\n";
  out << "segments," << segments.count() << "\n";
  out << "r2," << exact(explanation.r2) << "\n";
}

// ---- compare ----------------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> reports;
  std::string metric = "accuracy";
  double alpha = 0.05;
  std::string out;
};

void add_compare(CLI::App& app, CompareArgs& a) {
  auto* cmd = app.add_subcommand("compare", "Tukey HSD across report groups");
  cmd->add_option("--reports", a.reports, "Report JSON files")->required();
  cmd->add_option("--metric", a.metric, "accuracy, precision, recall or f1")
      ->check(CLI::IsMember({"accuracy", "precision", "recall", "f1"}));
  cmd->add_option("--alpha", a.alpha, "Significance level")->check(CLI::Range(1e-9, 0.5));
  cmd->add_option("--out", a.out, "Tukey CSV path")->required();
}

void run_compare(const CompareArgs& a, std::ostream& out) {
  const auto metric = evalstats::parse_metric(a.metric);
  std::vector<evalstats::TukeyGroup> groups;
  for (const auto& path : a.reports) {
    for (const auto& r : evalstats::load_reports(path)) groups.push_back({r.group, r.values(metric)});
  }
  if (groups.size() < 2) throw UsageError("compare needs at least 2 groups across the given reports");
  const auto pairs = evalstats::tukey_hsd(groups, a.alpha);
  ensure_parent(a.out);
  write_text(a.out, evalstats::tukey_csv(pairs));
  out << a.out << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"burnsight: texture-augmented burn-depth classification with LIME explanations", "burnsight"};
  app.require_subcommand(1);
  SynthArgs synth;
  FeaturesArgs features;
  TrainArgs train;
  EvalArgs eval;
  RunsArgs runs;
  ExplainArgs explain_args;
  CompareArgs compare;
  add_synth(app, synth);
  add_features(app, features);
  add_train(app, train);
  add_eval(app, eval);
  add_runs(app, runs);
  add_explain(app, explain_args);
  add_compare(app, compare);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("synth")) run_synth(synth, out);
    else if (app.got_subcommand("features")) run_features(features, out);
    else if (app.got_subcommand("train")) run_train(train, out);
    else if (app.got_subcommand("eval")) run_eval(eval, out);
    else if (app.got_subcommand("runs")) run_runs(runs, out);
    else if (app.got_subcommand("explain")) run_explain(explain_args, out, err);
    else if (app.got_subcommand("compare")) run_compare(compare, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace burnsight::cli

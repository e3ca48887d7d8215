#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uood/error.hpp"
#include "uood/experiment.hpp"
#include "uood/feature_store.hpp"
#include "uood/gaussian_model.hpp"
#include "uood/invariant_engine.hpp"
#include "uood/maha_scorer.hpp"
#include "uood/manifest.hpp"
#include "uood/report.hpp"
#include "uood/synthetic.hpp"

namespace uood::cli {

namespace {

namespace fs = std::filesystem;

const std::map<std::string, Shrinkage> kShrinkageNames{{"ledoit_wolf", Shrinkage::LedoitWolf},
                                                       {"none", Shrinkage::None}};
const std::map<std::string, SweepDirection> kDirectionNames{{"invariant", SweepDirection::FromMostInvariant},
                                                            {"variant", SweepDirection::FromMostVariant}};

const std::vector<double> kDefaultGrid{0.01, 0.02, 0.03, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5,
                                       0.6,  0.7,  0.8,  0.9,  0.95, 0.99, 1.0};

struct Options {
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string out;
  Shrinkage shrinkage = Shrinkage::LedoitWolf;
  std::optional<Shrinkage> shrinkage_override;
  double epsilon_floor = kDefaultEpsilonFloor;

  std::string train, test, test_in, test_out, model, manifest;
  SweepDirection direction = SweepDirection::FromMostInvariant;
  std::vector<double> grid = kDefaultGrid;
  bool gnuplot = false;

  std::string scenario = "orientation";
  std::string out_dir = ".";
};

// Writes to --out when given, otherwise to `fallback`.
void emit(const Options& opt, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (opt.out.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(opt.out, std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot open " + opt.out + " for writing");
  body(file);
  if (!file) throw Error(ErrorCode::Io, "write failed for " + opt.out);
}

void cmd_fit(const Options& opt, std::ostream& err) {
  const FeatureSet train = load_features(opt.train);
  const GaussianModel model = fit_gaussian(train, opt.shrinkage, opt.threads);
  save_model(model, opt.out);
  err << "fitted " << model.layer_count() << " layer(s) on " << train.sample_count() << " samples -> " << opt.out
      << '\n';
}

void cmd_score(const Options& opt, std::ostream& out) {
  const GaussianModel model = load_model(opt.model);
  const FeatureSet test = load_features(opt.test);
  const ScoreReport report = score(model, test, opt.threads);
  emit(opt, out, [&](std::ostream& os) { write_scores_csv(os, report); });
}

void cmd_eval(const Options& opt, std::ostream& out) {
  auto manifests = load_manifests(opt.manifest);
  if (opt.shrinkage_override) {
    for (auto& m : manifests) m.shrinkage = *opt.shrinkage_override;
  }
  const auto results = run_experiments(manifests, opt.threads);
  emit(opt, out, [&](std::ostream& os) { write_eval_csv(os, results); });
}

void cmd_sweep(const Options& opt, std::ostream& out) {
  const FeatureSet train = load_features(opt.train);
  const FeatureSet test_in = load_features(opt.test_in);
  const FeatureSet test_out = load_features(opt.test_out);
  require_same_layout(train, test_in, "test_in");
  require_same_layout(train, test_out, "test_out");
  const auto bases = fit_invariants(train, opt.threads);
  const auto rows = component_sweep(bases, test_in, test_out, opt.direction, opt.grid, opt.epsilon_floor, opt.threads);
  emit(opt, out, [&](std::ostream& os) { write_sweep_csv(os, rows, opt.gnuplot); });
}

void cmd_sweep_classes(const Options& opt, std::ostream& out) {
  const ClassSweepManifest manifest = load_class_sweep_manifest(opt.manifest);
  std::vector<ClassPool> pools;
  for (const auto& p : manifest.pools) pools.push_back({load_features(p.train), load_features(p.test)});
  ClassSweepOptions sweep;
  sweep.train_size = manifest.train_size;
  sweep.test_size = manifest.test_size;
  sweep.shrinkage = opt.shrinkage_override.value_or(manifest.shrinkage);
  sweep.seed = opt.seed;
  sweep.threads = opt.threads;
  const auto rows = class_count_sweep(pools, load_features(manifest.ood_near), load_features(manifest.ood_far),
                                      manifest.k_values, sweep);
  emit(opt, out, [&](std::ostream& os) { write_class_sweep_csv(os, rows); });
}

void write_split(const SyntheticSplit& split, const fs::path& dir, const std::string& name, Shrinkage shrinkage,
                 std::ostream& err) {
  save_features(split.train, dir / "train.uof");
  save_features(split.test_in, dir / "test_in.uof");
  save_features(split.test_out, dir / "test_out.uof");
  // Paths are stored relative to the manifest so the directory can move.
  save_manifest({name, "train.uof", "test_in.uof", "test_out.uof", shrinkage}, dir / "experiment.json");
  err << "wrote " << (dir / "experiment.json").string() << '\n';
}

void cmd_synth(const Options& opt, std::ostream& err) {
  const fs::path dir = opt.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  if (opt.scenario == "orientation") {
    write_split(gen_synthetic(broken_orientation_scenario(opt.seed)), dir, "pentagon:rotated_pentagon", opt.shrinkage,
                err);
  } else if (opt.scenario == "shapes") {
    write_split(gen_synthetic(varying_shapes_scenario(opt.seed)), dir, "shapes:pentagon", opt.shrinkage, err);
  } else if (opt.scenario == "planted") {
    PlantedInvariantConfig cfg;
    cfg.seed = opt.seed;
    write_split(gen_planted_invariant(cfg), dir, "planted:broken_invariant", opt.shrinkage, err);
  } else {
    ClassPoolConfig cfg;
    cfg.seed = opt.seed;
    const ClassPoolData data = gen_class_pools(cfg);
    ClassSweepManifest manifest;
    manifest.name = "classes";
    for (std::size_t c = 0; c < data.pools.size(); ++c) {
      const std::string train = "class" + std::to_string(c) + "_train.uof";
      const std::string test = "class" + std::to_string(c) + "_test.uof";
      save_features(data.pools[c].train, dir / train);
      save_features(data.pools[c].test, dir / test);
      manifest.pools.push_back({train, test});
      manifest.k_values.push_back(c + 1);
    }
    save_features(data.ood_near, dir / "ood_near.uof");
    save_features(data.ood_far, dir / "ood_far.uof");
    manifest.ood_near = "ood_near.uof";
    manifest.ood_far = "ood_far.uof";
    manifest.shrinkage = opt.shrinkage;
    save_class_sweep_manifest(manifest, dir / "classes.json");
    err << "wrote " << (dir / "classes.json").string() << '\n';
  }
}

void add_threads(CLI::App* app, Options& opt) {
  app->add_option("--threads", opt.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised OOD detection from pre-extracted multi-layer features"};
  app.require_subcommand(1);
  Options opt;

  auto* fit = app.add_subcommand("fit", "Fit per-layer Gaussians and write a .uom model");
  fit->add_option("--train", opt.train, "Training features (.uof)")->required();
  fit->add_option("--out", opt.out, "Model output path (.uom)")->required();
  fit->add_option("--shrinkage", opt.shrinkage, "ledoit_wolf or none")
      ->transform(CLI::CheckedTransformer(kShrinkageNames, CLI::ignore_case));
  add_threads(fit, opt);

  auto* score_cmd = app.add_subcommand("score", "Score features against a fitted model (CSV)");
  score_cmd->add_option("--model", opt.model, "Model file (.uom)")->required();
  score_cmd->add_option("--test", opt.test, "Features to score (.uof)")->required();
  score_cmd->add_option("--out", opt.out, "CSV output path (default stdout)");
  add_threads(score_cmd, opt);

  auto* eval = app.add_subcommand("eval", "Run the experiments listed in a manifest (CSV)");
  eval->add_option("--manifest", opt.manifest, "Experiment manifest (.json)")->required();
  eval->add_option("--out", opt.out, "CSV output path (default stdout)");
  eval->add_option("--shrinkage", opt.shrinkage_override, "Override the manifest's shrinkage")
      ->transform(CLI::CheckedTransformer(kShrinkageNames, CLI::ignore_case));
  add_threads(eval, opt);

  auto* sweep = app.add_subcommand("sweep", "AUROC over principal-component subsets (CSV)");
  sweep->add_option("--train", opt.train)->required();
  sweep->add_option("--test-in", opt.test_in)->required();
  sweep->add_option("--test-out", opt.test_out)->required();
  sweep->add_option("--direction", opt.direction, "invariant (smallest variance first) or variant")
      ->transform(CLI::CheckedTransformer(kDirectionNames, CLI::ignore_case));
  sweep->add_option("--grid", opt.grid, "Ascending variance shares in (0,1]")->delimiter(',');
  sweep->add_option("--epsilon-floor", opt.epsilon_floor, "Relative floor on training errors")
      ->check(CLI::NonNegativeNumber);
  sweep->add_flag("--gnuplot", opt.gnuplot, "Two-column whitespace output");
  sweep->add_option("--out", opt.out, "Output path (default stdout)");
  add_threads(sweep, opt);

  auto* classes = app.add_subcommand("sweep-classes", "AUROC as the number of training classes grows (CSV)");
  classes->add_option("--manifest", opt.manifest, "Class-pool manifest (.json)")->required();
  classes->add_option("--seed", opt.seed, "Subsampling seed");
  classes->add_option("--shrinkage", opt.shrinkage_override, "Override the manifest's shrinkage")
      ->transform(CLI::CheckedTransformer(kShrinkageNames, CLI::ignore_case));
  classes->add_option("--out", opt.out, "CSV output path (default stdout)");
  add_threads(classes, opt);

  auto* synth = app.add_subcommand("synth", "Write a synthetic geometric-feature experiment");
  synth->add_option("--scenario", opt.scenario, "orientation, shapes, planted or classes")
      ->check(CLI::IsMember({"orientation", "shapes", "planted", "classes"}));
  synth->add_option("--out-dir", opt.out_dir, "Directory for the generated files");
  synth->add_option("--seed", opt.seed, "Generator seed");
  synth->add_option("--shrinkage", opt.shrinkage, "Shrinkage recorded in the manifest")
      ->transform(CLI::CheckedTransformer(kShrinkageNames, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (fit->parsed()) cmd_fit(opt, err);
    else if (score_cmd->parsed()) cmd_score(opt, out);
    else if (eval->parsed()) cmd_eval(opt, out);
    else if (sweep->parsed()) cmd_sweep(opt, out);
    else if (classes->parsed()) cmd_sweep_classes(opt, out);
    else if (synth->parsed()) cmd_synth(opt, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace uood::cli

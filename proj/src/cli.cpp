#include "softwrap/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "softwrap/calibration.hpp"
#include "softwrap/csv.hpp"
#include "softwrap/evaluation.hpp"
#include "softwrap/fuzzy_trees.hpp"
#include "softwrap/hard_trees.hpp"
#include "softwrap/model_io.hpp"
#include "softwrap/soft_trees.hpp"
#include "softwrap/study.hpp"
#include "softwrap/synth.hpp"

namespace softwrap {

namespace {

std::vector<std::pair<std::string, std::string>> parse_kv_list(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::BadArguments, "expected k=v, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  if (out.empty()) throw Error(ErrorKind::BadArguments, "empty k=v list");
  return out;
}

double parse_double_arg(const std::string& key, const std::string& text) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
    throw Error(ErrorKind::BadArguments, key + ": cannot parse '" + text + "'");
  return v;
}

long parse_int_arg(const std::string& key, const std::string& text) {
  char* end = nullptr;
  long v = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0')
    throw Error(ErrorKind::BadArguments, key + ": cannot parse '" + text + "'");
  return v;
}

void apply_hyper(TreeHyperparams& hp, const std::vector<std::string>& settings) {
  for (const std::string& setting : settings) {
    auto eq = setting.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::BadArguments, "--hyper expects k=v, got '" + setting + "'");
    std::string key = setting.substr(0, eq);
    std::string val = setting.substr(eq + 1);
    if (key == "max_depth")
      hp.max_depth = static_cast<int>(parse_int_arg(key, val));
    else if (key == "min_leaf_weight")
      hp.min_leaf_weight = parse_double_arg(key, val);
    else if (key == "min_gain")
      hp.min_gain = parse_double_arg(key, val);
    else if (key == "n_trees")
      hp.n_trees = static_cast<int>(parse_int_arg(key, val));
    else if (key == "feature_subset")
      hp.feature_subset = static_cast<int>(parse_int_arg(key, val));
    else if (key == "bootstrap")
      hp.bootstrap = val == "1" || val == "true";
    else if (key == "n_bins")
      hp.n_bins = static_cast<int>(parse_int_arg(key, val));
    else if (key == "learning_rate")
      hp.gd.learning_rate = parse_double_arg(key, val);
    else if (key == "max_iters")
      hp.gd.max_iters = static_cast<int>(parse_int_arg(key, val));
    else if (key == "tol")
      hp.gd.tol = parse_double_arg(key, val);
    else if (key == "init_steepness")
      hp.gd.init_steepness = parse_double_arg(key, val);
    else
      throw Error(ErrorKind::BadArguments, "unknown hyperparameter '" + key + "'");
  }
  hp.validate();
}

Binning parse_bins(const std::string& text) {
  Binning binning;
  if (text.empty()) return binning;
  if (text == "unique") {
    binning.mode = BinningMode::Unique;
  } else {
    binning.mode = BinningMode::Fixed;
    long k = parse_int_arg("--bins", text);
    if (k < 1) throw Error(ErrorKind::BadArguments, "--bins must be >= 1 or 'unique'");
    binning.bins = static_cast<int>(k);
  }
  return binning;
}

bool is_usage_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadArguments:
    case ErrorKind::BadFractions:
    case ErrorKind::BadRange:
    case ErrorKind::BadConfig:
    case ErrorKind::NotContinuousFeature:
      return true;
    default:
      return false;
  }
}

struct GenArgs {
  std::string mode, out, schema_out;
  std::size_t n = 0;
  uint64_t seed = 0;
  bool emit_truth = false;
};

struct TrainArgs {
  std::string approach, data, schema, out;
  std::vector<std::string> hyper;
  uint64_t seed = 0;
};

struct CalibrateArgs {
  std::string model, data, out;
  double cl = 0.9999;
};

struct PredictArgs {
  std::string model, point;
  bool explain = false;
};

struct EvaluateArgs {
  std::string model, data, out_report, bins;
};

struct SweepArgs {
  std::string model, base, feature, out, svg;
  double lo = 0, hi = 0;
  int steps = 1000;
};

struct SelectArgs {
  std::string reports;
  double eps = 1e-3;
};

struct StudyArgs {
  std::size_t train_n = 50000, cal_n = 20000, eval_n = 20000;
  uint64_t seed = 1;
  double cl = 0.9999;
  std::string out_dir;
  bool grid = false;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"quality impact models with softened decision boundaries"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("softwrap model-format ") + kModelFormatVersion);

  GenArgs gen;
  auto* cmd_gen = app.add_subcommand("gen-data", "generate a synthetic scenario dataset");
  cmd_gen->add_option("--mode", gen.mode, "uniform | representative")
      ->required()
      ->check(CLI::IsMember({"uniform", "representative"}));
  cmd_gen->add_option("--n", gen.n, "number of points")->required()->check(CLI::PositiveNumber);
  cmd_gen->add_option("--seed", gen.seed, "generator seed");
  cmd_gen->add_option("--out", gen.out, "output CSV path")->required();
  cmd_gen->add_option("--schema-out", gen.schema_out, "output schema JSON path")->required();
  cmd_gen->add_flag("--emit-truth", gen.emit_truth, "append the true_p column");

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train", "train a quality impact model");
  cmd_train->add_option("--approach", train.approach, "dt|rf|fuzzy-dt|fuzzy-rf|soft-dt|bagged-soft-dt")
      ->required()
      ->check(CLI::IsMember({"dt", "rf", "fuzzy-dt", "fuzzy-rf", "soft-dt", "bagged-soft-dt"}));
  cmd_train->add_option("--data", train.data, "training CSV")->required();
  cmd_train->add_option("--schema", train.schema, "schema JSON")->required();
  cmd_train->add_option("--out", train.out, "output model path")->required();
  cmd_train->add_option("--hyper", train.hyper, "hyperparameter k=v (repeatable)");
  cmd_train->add_option("--seed", train.seed, "training seed");

  CalibrateArgs cal;
  auto* cmd_cal = app.add_subcommand("calibrate", "calibrate leaf uncertainties to upper bounds");
  cmd_cal->add_option("--model", cal.model, "model path")->required();
  cmd_cal->add_option("--data", cal.data, "calibration CSV")->required();
  cmd_cal->add_option("--cl", cal.cl, "confidence level in (0,1)")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  cmd_cal->add_option("--out", cal.out, "output model path")->required();

  PredictArgs pred;
  auto* cmd_pred = app.add_subcommand("predict", "predict uncertainty for one point");
  cmd_pred->add_option("--model", pred.model, "model path")->required();
  cmd_pred->add_option("--point", pred.point, "feature values k=v,...")->required();
  cmd_pred->add_flag("--explain", pred.explain, "print the per-leaf explanation");

  EvaluateArgs eval;
  auto* cmd_eval = app.add_subcommand("evaluate", "Brier score and decomposition on a dataset");
  cmd_eval->add_option("--model", eval.model, "model path")->required();
  cmd_eval->add_option("--data", eval.data, "evaluation CSV")->required();
  cmd_eval->add_option("--out-report", eval.out_report, "report CSV path")->required();
  cmd_eval->add_option("--bins", eval.bins, "'unique' or bin count (default: auto)");

  SweepArgs swp;
  auto* cmd_sweep = app.add_subcommand("sweep", "uncertainty profile over one feature");
  cmd_sweep->add_option("--model", swp.model, "model path")->required();
  cmd_sweep->add_option("--base", swp.base, "base point k=v,...")->required();
  cmd_sweep->add_option("--feature", swp.feature, "continuous feature to vary")->required();
  cmd_sweep->add_option("--lo", swp.lo, "sweep start")->required();
  cmd_sweep->add_option("--hi", swp.hi, "sweep end")->required();
  cmd_sweep->add_option("--steps", swp.steps, "grid size (>= 2)");
  cmd_sweep->add_option("--out", swp.out, "output CSV path")->required();
  cmd_sweep->add_option("--svg", swp.svg, "optional SVG chart path");

  SelectArgs sel;
  auto* cmd_sel = app.add_subcommand("select", "pick the best model from report files");
  cmd_sel->add_option("--reports", sel.reports, "comma-separated report CSV paths")->required();
  cmd_sel->add_option("--eps", sel.eps, "bs tie tolerance");

  StudyArgs study;
  auto* cmd_study = app.add_subcommand("study", "run the end-to-end six-approach comparison");
  cmd_study->add_option("--train-n", study.train_n, "training points");
  cmd_study->add_option("--cal-n", study.cal_n, "calibration points");
  cmd_study->add_option("--eval-n", study.eval_n, "evaluation points");
  cmd_study->add_option("--seed", study.seed, "study seed");
  cmd_study->add_option("--cl", study.cl, "confidence level")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  cmd_study->add_option("--out-dir", study.out_dir, "artifact directory")->required();
  cmd_study->add_flag("--grid", study.grid, "sweep a small hyperparameter grid per approach");

  try {
    std::vector<std::string> argv_storage(args);
    std::vector<const char*> argv;
    argv.push_back("softwrap");
    for (const std::string& a : argv_storage) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      std::ostringstream msg;
      int rc = app.exit(e, out, msg);
      if (rc == 0) return 0;  // --help / --version
      err << "softwrap: usage: " << (msg.str().empty() ? e.what() : msg.str());
      if (msg.str().empty()) err << "\n";
      return 1;
    }

    if (cmd_gen->parsed()) {
      GeneratorConfig cfg;
      cfg.mode = gen.mode == "uniform" ? GenMode::Uniform : GenMode::Representative;
      cfg.n = gen.n;
      cfg.seed = gen.seed;
      std::vector<double> truth;
      Dataset ds = generate(cfg, gen.emit_truth ? &truth : nullptr);
      save_dataset(ds, gen.out, gen.emit_truth ? &truth : nullptr);
      save_schema(ds.schema, gen.schema_out);
      out << "wrote " << ds.size() << " points to " << gen.out << "\n";
      return 0;
    }

    if (cmd_train->parsed()) {
      FeatureSchema schema = load_schema(train.schema);
      Dataset ds = load_dataset(train.data, schema);
      if (ds.points.empty()) throw Error(ErrorKind::EmptyFile, train.data + " has no data rows");
      EncodedDataset enc = one_hot_encode(ds);
      TreeHyperparams hp;
      apply_hyper(hp, train.hyper);
      QualityImpactModel model;
      Approach a = approach_from_name(train.approach);
      switch (a) {
        case Approach::Dt: model = train_dt(enc, hp); break;
        case Approach::Rf: model = train_rf(enc, hp, train.seed); break;
        case Approach::FuzzyDt: model = train_fuzzy_dt(enc, hp, train.seed); break;
        case Approach::FuzzyRf: model = train_fuzzy_rf(enc, hp, train.seed); break;
        case Approach::SoftDt: model = train_soft_dt(enc, hp, train.seed); break;
        case Approach::BaggedSoftDt: model = train_bagged_soft_dt(enc, hp, train.seed); break;
      }
      save_model(model, train.out);
      out << "trained " << train.approach << " on " << ds.size() << " points -> " << train.out
          << "\n";
      return 0;
    }

    if (cmd_cal->parsed()) {
      QualityImpactModel model = load_model(cal.model);
      Dataset ds = load_dataset(cal.data, model.schema);
      CalibrationConfig cfg;
      cfg.confidence_level = cal.cl;
      QualityImpactModel calibrated = calibrate_model(model, ds, cfg);
      save_model(calibrated, cal.out);
      out << "calibrated at CL=" << format_double(cal.cl) << " on " << ds.size()
          << " points -> " << cal.out << "\n";
      return 0;
    }

    if (cmd_pred->parsed()) {
      QualityImpactModel model = load_model(pred.model);
      DataPoint p = parse_point(model.schema, parse_kv_list(pred.point));
      UncertaintyEstimate est = predict_point(model, p);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", est.value);
      out << buf << "\n";
      if (pred.explain) {
        out << "calibrated: " << (est.calibrated ? "yes" : "no") << "\n";
        double printed_weight = 0.0;
        for (const TraceEntry& t : est.trace) {
          if (t.weight <= 1e-6) continue;
          printed_weight += t.weight;
          std::snprintf(buf, sizeof(buf), "w=%.6f u=%.6f", t.weight, t.leaf_u);
          out << "leaf t" << t.tree << ".n" << t.node << " " << buf << " :: " << t.conditions
              << "\n";
        }
        std::snprintf(buf, sizeof(buf), "%.6f", printed_weight);
        out << "total printed weight: " << buf << "\n";
      }
      return 0;
    }

    if (cmd_eval->parsed()) {
      QualityImpactModel model = load_model(eval.model);
      Dataset ds = load_dataset(eval.data, model.schema);
      BrierReport rep = evaluate_model(model, ds, parse_bins(eval.bins));
      std::vector<std::pair<std::string, BrierReport>> reports{
          {approach_name(model.approach), rep}};
      atomic_write(eval.out_report, render_report_csv(reports));
      out << render_report_table(reports);
      return 0;
    }

    if (cmd_sweep->parsed()) {
      QualityImpactModel model = load_model(swp.model);
      DataPoint base = parse_point(model.schema, parse_kv_list(swp.base));
      SweepResult result = sweep(model, base, swp.feature, swp.lo, swp.hi, swp.steps);
      atomic_write(swp.out, sweep_to_csv(result));
      if (!swp.svg.empty()) atomic_write(swp.svg, sweep_to_svg(result));
      out << "max_jump=" << format_double(result.max_jump)
          << " jumps(>0.02)=" << result.jump_count() << " -> " << swp.out << "\n";
      return 0;
    }

    if (cmd_sel->parsed()) {
      std::vector<std::pair<std::string, BrierReport>> reports;
      std::stringstream ss(sel.reports);
      std::string path;
      while (std::getline(ss, path, ',')) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        for (auto& entry : parse_report_csv(text)) reports.push_back(std::move(entry));
      }
      out << select_best(reports, sel.eps) << "\n";
      return 0;
    }

    if (cmd_study->parsed()) {
      StudyConfig cfg;
      cfg.train_n = study.train_n;
      cfg.cal_n = study.cal_n;
      cfg.eval_n = study.eval_n;
      cfg.seed = study.seed;
      cfg.confidence_level = study.cl;
      cfg.out_dir = study.out_dir;
      cfg.grid = study.grid;
      StudyOutcome outcome = run_study(cfg, &out);
      out << outcome.table << "selected: " << outcome.selected << "\n";
      return 0;
    }

    err << "softwrap: usage: no subcommand\n";
    return 1;
  } catch (const Error& e) {
    err << "softwrap: error: " << e.what() << "\n";
    return is_usage_error(e.kind()) ? 1 : 2;
  } catch (const std::exception& e) {
    err << "softwrap: internal: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace softwrap

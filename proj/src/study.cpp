#include "softwrap/study.hpp"

#include <chrono>

#include "softwrap/calibration.hpp"
#include "softwrap/csv.hpp"
#include "softwrap/fuzzy_trees.hpp"
#include "softwrap/hard_trees.hpp"
#include "softwrap/model_io.hpp"
#include "softwrap/soft_trees.hpp"
#include "softwrap/synth.hpp"

namespace softwrap {

namespace {

constexpr Approach kApproaches[] = {Approach::Dt,      Approach::Rf,     Approach::FuzzyDt,
                                    Approach::FuzzyRf, Approach::SoftDt, Approach::BaggedSoftDt};

QualityImpactModel train_approach(Approach a, const EncodedDataset& enc,
                                  const TreeHyperparams& hp, uint64_t seed) {
  switch (a) {
    case Approach::Dt: return train_dt(enc, hp);
    case Approach::Rf: return train_rf(enc, hp, seed);
    case Approach::FuzzyDt: return train_fuzzy_dt(enc, hp, seed);
    case Approach::FuzzyRf: return train_fuzzy_rf(enc, hp, seed);
    case Approach::SoftDt: return train_soft_dt(enc, hp, seed);
    case Approach::BaggedSoftDt: return train_bagged_soft_dt(enc, hp, seed);
  }
  throw Error(ErrorKind::BadArguments, "unknown approach");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TreeHyperparams study_hyperparams(Approach a) {
  TreeHyperparams hp;
  if (a == Approach::Dt) {
    hp.max_depth = 5;
    hp.min_leaf_weight = 200.0;
  }
  return hp;
}

DataPoint study_sweep_base() {
  // distance is the swept coordinate; the rest is a plausible mid-scope scene
  DataPoint p;
  p.values = {12.5, 10.0, 0.0, 0.1, 0.0};  // ped_type = adult
  return p;
}

StudyOutcome run_study(const StudyConfig& cfg, std::ostream* log) {
  if (cfg.train_n < 1 || cfg.cal_n < 1 || cfg.eval_n < 1)
    throw Error(ErrorKind::BadConfig, "study needs positive dataset sizes");
  auto t0 = std::chrono::steady_clock::now();
  auto say = [&](const std::string& line) {
    if (log) *log << "[study " << static_cast<int>(seconds_since(t0)) << "s] " << line << "\n";
  };

  StudyOutcome out;
  out.train = generate({GenMode::Uniform, cfg.train_n, derive_seed(cfg.seed, 101)});
  out.cal = generate({GenMode::Representative, cfg.cal_n, derive_seed(cfg.seed, 102)});
  out.eval = generate({GenMode::Representative, cfg.eval_n, derive_seed(cfg.seed, 103)});
  say("generated train/cal/eval = " + std::to_string(cfg.train_n) + "/" +
      std::to_string(cfg.cal_n) + "/" + std::to_string(cfg.eval_n));

  EncodedDataset enc = one_hot_encode(out.train);
  CalibrationConfig cal_cfg;
  cal_cfg.confidence_level = cfg.confidence_level;
  DataPoint base = study_sweep_base();

  for (std::size_t ai = 0; ai < std::size(kApproaches); ++ai) {
    Approach a = kApproaches[ai];
    uint64_t train_seed = derive_seed(cfg.seed, 200 + ai);
    StudyEntry entry;
    entry.id = approach_name(a);

    if (cfg.grid) {
      // small manual grid; winner by (bs, unr) lexicographic rule
      bool ensemble = a == Approach::Rf || a == Approach::FuzzyRf || a == Approach::BaggedSoftDt;
      std::vector<std::pair<std::string, BrierReport>> cell_reports;
      std::vector<QualityImpactModel> cell_models;
      for (int depth : {4, 6, 8}) {
        for (int trees : ensemble ? std::vector<int>{10, 20} : std::vector<int>{1}) {
          TreeHyperparams hp = study_hyperparams(a);
          hp.max_depth = depth;
          if (ensemble) hp.n_trees = trees;
          QualityImpactModel m =
              calibrate_model(train_approach(a, enc, hp, train_seed), out.cal, cal_cfg);
          BrierReport rep = evaluate_model(m, out.eval);
          std::string cell = std::string(approach_name(a)) + "[depth=" + std::to_string(depth) +
                             (ensemble ? ",trees=" + std::to_string(trees) : "") + "]";
          say(cell + " bs=" + format_double(rep.bs) + " unr=" + format_double(rep.unr));
          cell_reports.emplace_back(cell, rep);
          cell_models.push_back(std::move(m));
        }
      }
      std::string winner = select_best(cell_reports);
      for (std::size_t i = 0; i < cell_reports.size(); ++i) {
        if (cell_reports[i].first == winner) {
          entry.model = std::move(cell_models[i]);
          entry.report = cell_reports[i].second;
          say(std::string(approach_name(a)) + ": selected " + winner);
          break;
        }
      }
    } else {
      entry.model = calibrate_model(train_approach(a, enc, study_hyperparams(a), train_seed),
                                    out.cal, cal_cfg);
      entry.report = evaluate_model(entry.model, out.eval);
    }

    entry.distance_sweep = sweep(entry.model, base, "distance", 0.0, 25.0, cfg.sweep_steps);
    say(entry.id + ": bs=" + format_double(entry.report.bs) +
        " uns=" + format_double(entry.report.uns) + " unr=" + format_double(entry.report.unr) +
        " max_jump=" + format_double(entry.distance_sweep.max_jump));
    out.entries.push_back(std::move(entry));
  }

  std::vector<std::pair<std::string, BrierReport>> reports;
  for (const auto& entry : out.entries) reports.emplace_back(entry.id, entry.report);
  out.selected = select_best(reports);
  out.table = render_report_table(reports);
  say("selected: " + out.selected);

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir / "models");
    fs::create_directories(cfg.out_dir / "sweeps");
    save_schema(out.train.schema, cfg.out_dir / "schema.json");
    save_dataset(out.train, cfg.out_dir / "train.csv");
    save_dataset(out.cal, cfg.out_dir / "cal.csv");
    save_dataset(out.eval, cfg.out_dir / "eval.csv");
    for (const auto& entry : out.entries) {
      save_model(entry.model, cfg.out_dir / "models" / (entry.id + ".json"));
      atomic_write(cfg.out_dir / "sweeps" / (entry.id + "_distance.csv"),
                   sweep_to_csv(entry.distance_sweep));
    }
    atomic_write(cfg.out_dir / "reports.csv", render_report_csv(reports));
    atomic_write(cfg.out_dir / "report.txt", out.table);
    atomic_write(cfg.out_dir / "selection.txt", out.selected + "\n");
    say("artifacts written to " + cfg.out_dir.string());
  }
  return out;
}

}  // namespace softwrap

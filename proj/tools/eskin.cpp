// eskin: generate synthetic e-skin datasets, train and evaluate the decoupling
// pipeline, run inference on frame files, and render saved reports.
//
// Exit codes: 0 success, 1 usage/config/IO, 2 data validation, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "eskin/config.hpp"
#include "eskin/dataset_io.hpp"
#include "eskin/evalkit.hpp"
#include "eskin/pipeline.hpp"
#include "eskin/skin_sim.hpp"

namespace fs = std::filesystem;
using namespace eskin;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::optional<int> reps;
  std::optional<int> k;
  std::string out;
  bool emit_heatmaps = false;
  std::string dataset;
  std::string bundle;
  std::string frames;
  std::string report;
};

Schema parse_mode(const std::string& mode) {
  if (mode == "single") return Schema::SingleContact;
  if (mode == "two") return Schema::TwoContact;
  throw UsageError("--mode must be 'single' or 'two', got '" + mode + "'");
}

std::string mode_tag(Schema s) { return s == Schema::SingleContact ? "single" : "two"; }

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.single.seed = seed;
  cfg.two.seed = seed;
  cfg.pipeline.gp.seed = derive_seed(seed, 1);
  cfg.pipeline.svm.seed = derive_seed(seed, 2);
  cfg.pipeline.forest.seed = derive_seed(seed, 3);
  cfg.single_cv.seed = derive_seed(seed, 4);
  cfg.two_cv.seed = derive_seed(seed, 5);
}

void write_json_file(const fs::path& path, const std::string& text) {
  write_file_atomic(path, [&](std::ostream& out) { out << text << '\n'; });
}

int cmd_generate(RunConfig cfg, const Options& o) {
  const Schema mode = parse_mode(o.mode.empty() ? "single" : o.mode);
  if (o.reps) {
    if (*o.reps < 1) throw UsageError("--reps must be >= 1");
    cfg.single.reps_per_cell = *o.reps;
    cfg.two.reps = *o.reps;
  }
  cfg.validate();
  const fs::path out = o.out.empty() ? fs::path(cfg.out_dir) / (mode_tag(mode) + ".csv") : fs::path(o.out);
  const Dataset ds = mode == Schema::SingleContact ? generate_single_force_dataset(cfg.skin, cfg.single)
                                                   : generate_two_force_dataset(cfg.skin, cfg.two);
  save_dataset(ds, out);
  std::cerr << "wrote " << out.string() << " (+ " << meta_path_for(out).filename().string() << ")\n";
  std::cout << ds.size() << '\n';
  return 0;
}

Dataset load_checked(const Options& o) {
  Dataset ds = load_dataset(o.dataset);
  if (!o.mode.empty() && parse_mode(o.mode) != ds.meta.schema)
    throw ModeMismatchError("--mode " + o.mode + " but dataset '" + o.dataset + "' is " +
                            std::string(schema_name(ds.meta.schema)));
  return ds;
}

int cmd_train(const RunConfig& cfg, const Options& o) {
  cfg.validate();
  const Dataset ds = load_checked(o);
  const Schema mode = ds.meta.schema;
  const fs::path out = o.out.empty() ? fs::path(cfg.out_dir) / ("model_" + mode_tag(mode) + ".json") : fs::path(o.out);
  std::string text;
  if (mode == Schema::SingleContact) {
    text = pipeline_to_json(train_single(single_samples(ds), cfg.pipeline)).dump();
  } else {
    text = pipeline_to_json(train_two(two_samples(ds), cfg.pipeline, cfg.two.x_axes, cfg.two.y_axes)).dump();
  }
  write_json_file(out, text);
  std::cout << "trained " << mode_tag(mode) << "-contact models on " << ds.size() << " samples -> " << out.string()
            << '\n';
  return 0;
}

template <class Report>
void emit_confusions(const fs::path& dir, const std::vector<std::pair<std::string, const ConfusionMatrix*>>& cms,
                     bool heatmaps) {
  for (const auto& [name, cm] : cms) {
    write_file_atomic(dir / ("cm_" + name + ".csv"), [&](std::ostream& out) { write_confusion_csv(*cm, out); });
    if (heatmaps)
      write_file_atomic(dir / ("cm_" + name + ".pgm"), [&](std::ostream& out) { write_confusion_pgm(*cm, out); });
  }
}

int cmd_eval(RunConfig cfg, const Options& o) {
  if (o.k) {
    if (*o.k < 2) throw UsageError("--k must be >= 2, got " + std::to_string(*o.k));
    cfg.single_cv.k = *o.k;
    cfg.two_cv.k = *o.k;
  }
  cfg.validate();
  const Dataset ds = load_checked(o);
  const Schema mode = ds.meta.schema;
  const fs::path dir = o.out.empty() ? fs::path(cfg.out_dir) / ("report_" + mode_tag(mode)) : fs::path(o.out);
  if (mode == Schema::SingleContact) {
    const auto rep = cross_validate(ds, cfg.single_cv, cfg.pipeline);
    write_json_file(dir / "metrics.json", report_to_json(rep).dump(2));
    emit_confusions<SingleReport>(dir, {{"row", &rep.row_cm}, {"col", &rep.col_cm}, {"detection", &rep.detection_cm}},
                                  o.emit_heatmaps);
    std::cout << headline(rep) << '\n';
  } else {
    const auto rep = cross_validate_two(ds, cfg.two_cv, cfg.pipeline);
    write_json_file(dir / "metrics.json", report_to_json(rep).dump(2));
    emit_confusions<TwoReport>(dir, {{"x1", &rep.x1_cm}, {"y1", &rep.y1_cm}, {"x2", &rep.x2_cm}, {"y2", &rep.y2_cm}},
                               o.emit_heatmaps);
    std::cout << headline(rep) << '\n';
  }
  return 0;
}

int cmd_infer(const Options& o) {
  std::ifstream bin(o.bundle, std::ios::binary);
  if (!bin) throw IoError("cannot open bundle '" + o.bundle + "'");
  nlohmann::json bundle;
  try {
    bin >> bundle;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bundle '" + o.bundle + "': " + e.what());
  }
  const std::string kind = bundle_kind(bundle);
  Schema mode = kind == "two-contact-pipeline" ? Schema::TwoContact : Schema::SingleContact;
  if (!o.mode.empty() && parse_mode(o.mode) != mode)
    throw ModeMismatchError("--mode " + o.mode + " but bundle '" + o.bundle + "' holds a " + kind);

  std::ifstream fin(o.frames, std::ios::binary);
  if (!fin) throw IoError("cannot open frames file '" + o.frames + "'");
  const auto frames = read_frames(fin);

  auto write = [&](std::ostream& out) {
    char buf[64];
    auto real = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.9f", v);
      return std::string(buf);
    };
    if (mode == Schema::SingleContact) {
      const auto p = single_pipeline_from_json(bundle);
      out << "lambda,detected,node_x,node_y,force_n\n";
      for (const auto& f : frames) {
        const auto e = infer_single(p, f);
        out << real(e.stretch.lambda) << ',' << (e.contact_detected ? 1 : 0) << ',' << e.node.x << ',' << e.node.y
            << ',' << real(e.force.newtons) << '\n';
      }
    } else {
      const auto m = two_models_from_json(bundle);
      out << "n_contacts,x1,y1,f1_n,x2,y2,f2_n\n";
      for (const auto& f : frames) {
        const auto e = infer_two(m, f);
        out << e.contacts.size();
        for (std::size_t c = 0; c < 2; ++c) {
          if (c < e.contacts.size())
            out << ',' << e.contacts[c].node.x << ',' << e.contacts[c].node.y << ',' << real(e.contacts[c].force.newtons);
          else
            out << ",0,0," << real(0.0);
        }
        out << '\n';
      }
    }
  };
  if (o.out.empty()) {
    write(std::cout);
  } else {
    write_file_atomic(o.out, write);
  }
  return 0;
}

ConfusionMatrix cm_from_json(const nlohmann::json& j) {
  ConfusionMatrix cm(j.at("labels").get<std::vector<std::string>>());
  cm.counts = j.at("counts").get<std::vector<std::vector<long>>>();
  return cm;
}

// Pretty-prints a saved metrics.json; with --out, re-emits its confusion matrices.
int cmd_report(const Options& o) {
  std::ifstream in(o.report);
  if (!in) throw IoError("cannot open report '" + o.report + "'");
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("report '" + o.report + "': " + e.what());
  }
  const std::string kind = j.value("kind", "");
  if (kind != "single-contact-cv" && kind != "two-contact-cv")
    throw ParseError("report '" + o.report + "' has unknown kind '" + kind + "'");
  std::cout << kind << "  k=" << j["k"] << "  samples=" << j["n_samples"] << '\n';
  for (const auto& [name, value] : j["pooled"].items()) {
    if (value.is_object()) {
      std::cout << "  " << name << ": mse=" << value["mse"] << " r2=" << value["r2"] << " (n=" << value["n"] << ")\n";
    } else {
      std::cout << "  " << name << ": " << value << '\n';
    }
  }
  if (j.contains("double_affect")) {
    const auto& d = j["double_affect"];
    std::cout << "  force mse shared-terminal=" << d["mse_shared"] << " (n=" << d["n_shared"]
              << ") disjoint=" << d["mse_disjoint"] << " (n=" << d["n_disjoint"] << ")\n";
  }
  for (const auto& [name, cmj] : j["confusion"].items()) {
    const auto cm = cm_from_json(cmj);
    std::cout << "confusion[" << name << "] accuracy=" << fmt_opt(cm.total() ? std::optional(cm.accuracy()) : std::nullopt)
              << " diagonal_dominant=" << (cm.diagonal_dominant() ? "yes" : "no") << '\n';
    write_confusion_csv(cm, std::cout);
    if (!o.out.empty()) {
      const fs::path dir = o.out;
      write_file_atomic(dir / ("cm_" + name + ".csv"), [&](std::ostream& out) { write_confusion_csv(cm, out); });
      if (o.emit_heatmaps)
        write_file_atomic(dir / ("cm_" + name + ".pgm"), [&](std::ostream& out) { write_confusion_pgm(cm, out); });
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic capacitive e-skin: generate, train, evaluate, infer"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed_value = 0;
  int reps_value = 0, k_value = 0;

  auto common = [&](CLI::App* c) {
    c->add_option("--config", o.config_path, "JSON run config (default: $ESKIN_CONFIG or built-in)");
    c->add_option("--seed", seed_value, "Master seed overriding every configured seed");
    c->add_option("--mode", o.mode, "single | two")->check(CLI::IsMember({"single", "two"}));
    c->add_option("--out", o.out, "Output path (file or directory, per command)");
  };

  auto* gen = app.add_subcommand("generate", "Simulate an acquisition protocol and write a dataset");
  common(gen);
  gen->add_option("--reps", reps_value, "Repetitions per protocol cell");

  auto* train = app.add_subcommand("train", "Train the pipeline on a dataset and write a model bundle");
  common(train);
  train->add_option("dataset", o.dataset, "Dataset CSV")->required();

  auto* eval = app.add_subcommand("eval", "Cross-validate the pipeline and write a metrics report");
  common(eval);
  eval->add_option("dataset", o.dataset, "Dataset CSV")->required();
  eval->add_option("--k", k_value, "Number of folds");
  eval->add_flag("--emit-heatmaps", o.emit_heatmaps, "Also write PGM confusion heatmaps");

  auto* infer = app.add_subcommand("infer", "Estimate stretch/contact for every frame of a frames CSV");
  common(infer);
  infer->add_option("bundle", o.bundle, "Model bundle JSON")->required();
  infer->add_option("frames", o.frames, "Frames CSV (cx1..cx10,cy1..cy10)")->required();

  auto* report = app.add_subcommand("report", "Summarise a metrics.json report");
  common(report);
  report->add_option("report", o.report, "metrics.json written by eval")->required();
  report->add_flag("--emit-heatmaps", o.emit_heatmaps, "With --out, also write PGM heatmaps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    if (cmd->count("--seed")) o.seed = seed_value;
    if (cmd == gen && gen->count("--reps")) o.reps = reps_value;
    if (cmd == eval && eval->count("--k")) o.k = k_value;

    RunConfig cfg = resolve_config(o.config_path);
    if (o.seed) apply_seed(cfg, *o.seed);

    if (cmd == gen) return cmd_generate(cfg, o);
    if (cmd == train) return cmd_train(cfg, o);
    if (cmd == eval) return cmd_eval(cfg, o);
    if (cmd == infer) return cmd_infer(o);
    return cmd_report(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

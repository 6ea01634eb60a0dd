// Command line front end: dataset generation, cluster analysis,
// training, evaluation, comparison, streaming inference and cost
// reporting, all driven by one JSON config.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qfem/checkpoint.hpp"
#include "qfem/clustering.hpp"
#include "qfem/config.hpp"
#include "qfem/dataset.hpp"
#include "qfem/errors.hpp"
#include "qfem/experiment.hpp"
#include "qfem/numeric_io.hpp"
#include "qfem/parallel.hpp"

namespace fs = std::filesystem;
using namespace qfem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

ExperimentConfig resolve_config(const GlobalOpts& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.out_dir) cfg.out_dir = *g.out_dir;
  if (g.threads) cfg.threads = *g.threads;
  validate_config(cfg);
  if (cfg.threads > 0) set_max_threads(cfg.threads);
  return cfg;
}

void ensure_out_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory " + cfg.out_dir + ": " +
                      ec.message());
}

// Relative dataset paths live inside the output directory so one
// --out-dir names a whole run.
std::string resolve_dataset_path(const ExperimentConfig& cfg,
                                 const std::string& override_path) {
  std::string p = override_path.empty() ? cfg.dataset_path : override_path;
  if (!override_path.empty()) return p;
  if (fs::path(p).is_absolute()) return p;
  return (fs::path(cfg.out_dir) / p).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw DataError("write failed for " + path);
}

void write_effective_config(const ExperimentConfig& cfg) {
  write_text((fs::path(cfg.out_dir) / "effective_config.json").string(),
             dump_config(cfg));
}

fem::Dataset load_dataset(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
    return fem::read_dataset_binary(path);
  return fem::read_dataset_csv(path);
}

int cmd_gen_data(const ExperimentConfig& cfg, const std::string& dataset_override,
                 bool also_binary) {
  ensure_out_dir(cfg);
  fem::FrameModel frame = fem::build_frame(cfg.frame);
  fem::SensorSpec sensors = fem::default_sensor_spec(cfg.frame);
  fem::StaticSolver solver(frame);

  fem::Dataset ds = fem::sample_dataset(frame, sensors, cfg.loads, cfg.samples,
                                        cfg.seed, cfg.noise_std, cfg.threads);
  const std::string path = resolve_dataset_path(cfg, dataset_override);
  fem::write_dataset_csv(ds, path);
  if (also_binary) {
    fs::path bin = fs::path(path);
    bin.replace_extension(".bin");
    fem::write_dataset_binary(ds, bin.string());
  }

  fem::SensorMapReport report =
      fem::conditioning_diagnostic(frame, solver, sensors, cfg.loads);
  const std::string summary = fem::sensor_map_summary(report);
  write_text((fs::path(cfg.out_dir) / "sensor_map.txt").string(), summary);
  write_effective_config(cfg);

  std::cout << "wrote " << ds.sensors.size() << " samples to " << path << "\n"
            << "sensors per sample: " << ds.sensors.front().size()
            << ", outputs per sample: " << ds.displacements.front().size()
            << ", nodes: " << ds.node_count << "\n\n"
            << summary;
  return kExitOk;
}

int cmd_cluster_analyze(const ExperimentConfig& cfg,
                        const std::string& dataset_override) {
  ensure_out_dir(cfg);
  fem::Dataset ds = load_dataset(resolve_dataset_path(cfg, dataset_override));
  nn::TrainConfig tc = make_train_config(cfg);
  cluster::KSelectionReport report =
      cluster::k_sweep(ds.sensors, ds.displacements, cfg.k_min, cfg.k_max, tc,
                       cfg.sweep_epochs, cfg.seed, cfg.cluster_restarts);
  const std::string csv = cluster::report_to_csv(report);
  write_text((fs::path(cfg.out_dir) / "k_selection.csv").string(), csv);
  write_effective_config(cfg);
  std::cout << csv;
  return kExitOk;
}

// First rows of the training split, written next to the checkpoint so a
// later `infer` run can be byte-compared against them.
void write_inference_fixture(const ExperimentConfig& cfg, const nn::HybridModel& model,
                             const fem::Dataset& ds, const nn::TrainResult& tr,
                             const std::string& tag) {
  const std::size_t n = std::min<std::size_t>(5, tr.split.train.size());
  std::ostringstream in_csv, pred_csv;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& s = ds.sensors[tr.split.train[i]];
    Vec pred = model.predict(s);
    for (std::size_t j = 0; j < s.size(); ++j)
      in_csv << (j ? "," : "") << format_double(s[j]);
    in_csv << '\n';
    for (std::size_t j = 0; j < pred.size(); ++j)
      pred_csv << (j ? "," : "") << format_double(pred[j]);
    pred_csv << '\n';
  }
  fs::path dir(cfg.out_dir);
  write_text((dir / ("sample_inputs_" + tag + ".csv")).string(), in_csv.str());
  write_text((dir / ("sample_predictions_" + tag + ".csv")).string(),
             pred_csv.str());
}

int cmd_train(const ExperimentConfig& cfg, const std::string& dataset_override,
              const std::string& variant_name) {
  ensure_out_dir(cfg);
  fem::Dataset ds = load_dataset(resolve_dataset_path(cfg, dataset_override));
  nn::Variant v = variant_name.empty() ? cfg.variants.front()
                                       : nn::variant_from_name(variant_name);

  nn::HybridModel model;
  VariantRun run = train_variant(cfg, v, ds, model);

  const std::string tag = nn::variant_name(v);
  CheckpointMeta meta;
  meta.seed = cfg.seed;
  meta.config_hash = config_hash(cfg);
  meta.epochs_trained = run.train.epochs_run;
  meta.best_val_loss = run.train.best_val_loss;
  fs::path dir(cfg.out_dir);
  save_checkpoint(model, meta, (dir / ("checkpoint_" + tag + ".json")).string());
  write_text((dir / ("history_" + tag + ".csv")).string(), history_csv(run.train));
  write_text((dir / ("metrics_" + tag + ".json")).string(), metrics_json(run));
  write_text((dir / ("timing_" + tag + ".json")).string(), timing_json(run));
  write_inference_fixture(cfg, model, ds, run.train, tag);
  write_effective_config(cfg);

  std::cout << "variant: " << tag << "\nparams: " << run.param_count
            << "\nepochs: " << run.train.epochs_run
            << " (best " << run.train.best_epoch << ")\n"
            << nn::metrics_to_string(run.test_metrics) << "raw_rmse: "
            << format_double(run.raw_rmse) << "\n"
            << "checkpoint: " << (dir / ("checkpoint_" + tag + ".json")).string()
            << "\n";
  return kExitOk;
}

int cmd_evaluate(const ExperimentConfig& cfg, const std::string& dataset_override,
                 const std::string& checkpoint_path, int shots) {
  ensure_out_dir(cfg);
  if (checkpoint_path.empty())
    throw ConfigError("evaluate: --checkpoint is required");
  fem::Dataset ds = load_dataset(resolve_dataset_path(cfg, dataset_override));
  nn::HybridModel model = load_checkpoint(checkpoint_path);

  nn::MetricsReport m;
  if (shots > 0) {
    // shot-noise evaluation: sampled expectation values, one rng stream
    // per sample index
    std::vector<Vec> preds(ds.sensors.size());
    std::vector<Vec> std_targets(ds.sensors.size());
    for (std::size_t i = 0; i < ds.sensors.size(); ++i) {
      Rng rng(derive_seed(cfg.seed, "shots:" + std::to_string(i)));
      Vec raw = model.predict_sampled(ds.sensors[i], shots, rng);
      preds[i] = model.target_std.transform(raw);
      std_targets[i] = model.target_std.transform(ds.displacements[i]);
    }
    m = nn::compute_metrics(preds, std_targets);
  } else {
    m = nn::evaluate_all(model, ds.sensors, ds.displacements, cfg.threads);
  }

  std::ostringstream json;
  json << "{\n  \"mse\": " << format_double(m.mse)
       << ",\n  \"rmse\": " << format_double(m.rmse)
       << ",\n  \"r2\": " << format_double(m.r2)
       << ",\n  \"nrmse_range\": " << format_double(m.nrmse_range)
       << ",\n  \"nrmse_std\": " << format_double(m.nrmse_std)
       << ",\n  \"shots\": " << shots << "\n}\n";
  write_text((fs::path(cfg.out_dir) / "eval_metrics.json").string(), json.str());
  std::cout << nn::metrics_to_string(m);
  return kExitOk;
}

int cmd_compare(const ExperimentConfig& cfg, const std::string& dataset_override) {
  ensure_out_dir(cfg);
  fem::Dataset ds = load_dataset(resolve_dataset_path(cfg, dataset_override));
  ComparisonTable table = run_compare(cfg, ds);
  fs::path dir(cfg.out_dir);
  write_text((dir / "compare_metrics.csv").string(), comparison_metrics_csv(table));
  write_text((dir / "compare_timing.csv").string(), comparison_timing_csv(table));
  write_effective_config(cfg);
  std::cout << comparison_pretty(table);
  return kExitOk;
}

std::vector<double> parse_sensor_row(const std::string& line, std::size_t expect) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string field = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    row.push_back(parse_double(field));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (expect != 0 && row.size() != expect) {
    std::ostringstream msg;
    msg << "inference input: expected " << expect << " sensor values, got "
        << row.size();
    throw DataError(msg.str());
  }
  return row;
}

bool looks_like_header(const std::string& line) {
  const std::size_t comma = line.find(',');
  const std::string first = line.substr(0, comma);
  try {
    parse_double(first);
    return false;
  } catch (const DataError&) {
    return true;
  }
}

struct LatencyStats {
  std::vector<double> ms;
  void add(double v) { ms.push_back(v); }
  std::string summary() {
    if (ms.empty()) return "no rows processed\n";
    std::sort(ms.begin(), ms.end());
    double total = 0.0;
    for (double v : ms) total += v;
    const double mean = total / static_cast<double>(ms.size());
    const double median = ms[ms.size() / 2];
    const std::size_t p95_idx =
        std::min(ms.size() - 1,
                 static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size()))) - 1);
    std::ostringstream out;
    out << "rows: " << ms.size() << "  latency ms (mean/median/p95): "
        << format_double(mean) << " / " << format_double(median) << " / "
        << format_double(ms[p95_idx]) << "\n";
    return out.str();
  }
};

// Streaming inference over a CSV of sensor rows. --follow keeps polling
// the file for appended rows until it stops growing for idle_timeout_s.
int cmd_infer(const ExperimentConfig& cfg, const std::string& checkpoint_path,
              const std::string& input_path, const std::string& output_path,
              bool follow, int poll_ms, double idle_timeout_s, int shots) {
  if (checkpoint_path.empty()) throw ConfigError("infer: --checkpoint is required");
  nn::HybridModel model = load_checkpoint(checkpoint_path);
  const std::size_t n_sensors = model.input_std.mean.size();

  std::ostream* out = &std::cout;
  std::ofstream out_file;
  if (!output_path.empty() && output_path != "-") {
    out_file.open(output_path, std::ios::binary);
    if (!out_file) throw DataError("cannot open " + output_path + " for writing");
    out = &out_file;
  }

  LatencyStats stats;
  std::uint64_t shot_row = 0;
  auto process_line = [&](const std::string& raw) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') return;
    if (stats.ms.empty() && looks_like_header(line)) return;
    Vec sensors = parse_sensor_row(line, n_sensors);
    const auto t0 = std::chrono::steady_clock::now();
    Vec pred;
    if (shots > 0) {
      Rng rng(derive_seed(cfg.seed, "shots:" + std::to_string(shot_row++)));
      pred = model.predict_sampled(sensors, shots, rng);
    } else {
      pred = model.predict(sensors);
    }
    const auto t1 = std::chrono::steady_clock::now();
    stats.add(std::chrono::duration<double, std::milli>(t1 - t0).count());
    std::string row;
    for (std::size_t j = 0; j < pred.size(); ++j) {
      if (j) row += ',';
      row += format_double(pred[j]);
    }
    row += '\n';
    (*out) << row;
    out->flush();
  };

  if (input_path.empty() || input_path == "-") {
    if (follow) throw ConfigError("infer: --follow needs a file, not stdin");
    std::string line;
    while (std::getline(std::cin, line)) process_line(line);
  } else if (!follow) {
    std::ifstream in(input_path, std::ios::binary);
    if (!in) throw DataError("cannot open " + input_path);
    std::string line;
    while (std::getline(in, line)) process_line(line);
  } else {
    // tail mode: re-open cheaply by remembering the byte offset of the
    // last complete line
    std::streamoff offset = 0;
    std::string pending;
    double idle_s = 0.0;
    const double poll_s = static_cast<double>(poll_ms) / 1e3;
    while (idle_s < idle_timeout_s) {
      std::ifstream in(input_path, std::ios::binary);
      if (!in) throw DataError("cannot open " + input_path);
      in.seekg(0, std::ios::end);
      const std::streamoff size = in.tellg();
      if (size > offset) {
        in.seekg(offset);
        std::string chunk(static_cast<std::size_t>(size - offset), '\0');
        in.read(chunk.data(), size - offset);
        offset = size;
        pending += chunk;
        std::size_t nl;
        while ((nl = pending.find('\n')) != std::string::npos) {
          process_line(pending.substr(0, nl));
          pending.erase(0, nl + 1);
        }
        idle_s = 0.0;
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(poll_ms));
        idle_s += poll_s;
      }
    }
    if (!pending.empty()) process_line(pending);
  }

  std::cerr << stats.summary();
  return kExitOk;
}

int cmd_complexity(const ComplexityDims& dims) {
  std::cout << complexity_pretty(complexity_report(dims));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid quantum-classical surrogate for truss displacement fields"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--seed", g.seed, "master seed (overrides config)");
  app.add_option("--out-dir", g.out_dir, "artifact directory (overrides config)");
  app.add_option("--threads", g.threads, "worker thread cap, 0 = all cores");

  std::string dataset_override;
  bool also_binary = false;
  CLI::App* gen = app.add_subcommand("gen-data", "sample load scenarios and solve them");
  gen->add_option("--dataset", dataset_override, "dataset path override");
  gen->add_flag("--binary", also_binary, "also write a binary twin");

  CLI::App* cl = app.add_subcommand("cluster-analyze", "k-means sweep with downstream metrics");
  std::string cl_dataset;
  cl->add_option("--dataset", cl_dataset, "dataset path override");

  CLI::App* tr = app.add_subcommand("train", "train one variant and write a checkpoint");
  std::string tr_dataset, tr_variant;
  tr->add_option("--dataset", tr_dataset, "dataset path override");
  tr->add_option("--variant", tr_variant, "model variant name");

  CLI::App* ev = app.add_subcommand("evaluate", "metrics for a checkpoint on a dataset");
  std::string ev_dataset, ev_checkpoint;
  int ev_shots = 0;
  ev->add_option("--dataset", ev_dataset, "dataset path override");
  ev->add_option("--checkpoint", ev_checkpoint, "checkpoint file")->required();
  ev->add_option("--shots", ev_shots, "sampled measurement shots, 0 = exact");

  CLI::App* cp = app.add_subcommand("compare", "train every configured variant");
  std::string cp_dataset;
  cp->add_option("--dataset", cp_dataset, "dataset path override");

  CLI::App* in = app.add_subcommand("infer", "stream sensor rows through a checkpoint");
  std::string in_checkpoint, in_input, in_output;
  bool in_follow = false;
  int in_poll_ms = 50, in_shots = 0;
  double in_idle_s = 5.0;
  in->add_option("--checkpoint", in_checkpoint, "checkpoint file")->required();
  in->add_option("--input", in_input, "sensor CSV ('-' = stdin)");
  in->add_option("--output", in_output, "prediction CSV ('-' = stdout)");
  in->add_flag("--follow", in_follow, "poll the input file for appended rows");
  in->add_option("--poll-ms", in_poll_ms, "poll interval in follow mode");
  in->add_option("--idle-timeout", in_idle_s, "seconds without growth before exit");
  in->add_option("--shots", in_shots, "sampled measurement shots, 0 = exact");

  CLI::App* cx = app.add_subcommand("complexity", "multiply-accumulate cost report");
  ComplexityDims dims;
  cx->add_option("--input-dim", dims.d_in, "sensor count");
  cx->add_option("--h1", dims.h1, "first hidden width");
  cx->add_option("--h2", dims.h2, "second hidden width");
  cx->add_option("--output-dim", dims.d_out, "displacement entries");
  cx->add_option("--embedded-dim", dims.d_expanded, "density matrix side");
  cx->add_option("--layers", dims.layers, "circuit layers");
  cx->add_option("--qubits", dims.qubits, "circuit width");
  cx->add_option("--h3", dims.h3, "post-circuit hidden width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (cx->parsed()) return cmd_complexity(dims);
    ExperimentConfig cfg = resolve_config(g);
    if (gen->parsed()) return cmd_gen_data(cfg, dataset_override, also_binary);
    if (cl->parsed()) return cmd_cluster_analyze(cfg, cl_dataset);
    if (tr->parsed()) return cmd_train(cfg, tr_dataset, tr_variant);
    if (ev->parsed()) return cmd_evaluate(cfg, ev_dataset, ev_checkpoint, ev_shots);
    if (cp->parsed()) return cmd_compare(cfg, cp_dataset);
    if (in->parsed())
      return cmd_infer(cfg, in_checkpoint, in_input, in_output, in_follow,
                       in_poll_ms, in_idle_s, in_shots);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

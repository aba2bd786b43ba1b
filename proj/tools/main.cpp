// blinkword: command-line entry point.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "blinkword/bench.hpp"
#include "blinkword/dataset.hpp"
#include "blinkword/decoder.hpp"
#include "blinkword/dictionary.hpp"
#include "blinkword/errors.hpp"
#include "blinkword/frame_source.hpp"
#include "blinkword/gateway.hpp"
#include "blinkword/gradient_check.hpp"
#include "blinkword/heuristic.hpp"
#include "blinkword/model_io.hpp"
#include "blinkword/pgm.hpp"
#include "blinkword/pipeline.hpp"
#include "blinkword/report.hpp"
#include "blinkword/train.hpp"

namespace bw = blinkword;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bw::Error("cannot write " + path);
  out << text;
  if (!out) throw bw::Error("short write to " + path);
}

std::unique_ptr<bw::Classifier> make_classifier(const std::string& choice) {
  if (choice == "heuristic") return std::make_unique<bw::HeuristicModel>();
  const std::string prefix = "tinynet:";
  if (choice.rfind(prefix, 0) == 0) {
    auto model = bw::load_model(choice.substr(prefix.size()));
    if (!std::holds_alternative<bw::TinyNet>(model)) {
      throw bw::SchemaError(choice.substr(prefix.size()) + " does not hold a tinynet model");
    }
    return bw::make_classifier(std::move(model));
  }
  const std::string model_prefix = "model:";
  if (choice.rfind(model_prefix, 0) == 0) {
    return bw::make_classifier(bw::load_model(choice.substr(model_prefix.size())));
  }
  throw bw::ArgumentError("classifier must be 'heuristic' or 'tinynet:<model-file>'");
}

std::unique_ptr<bw::FrameSource> make_source(const std::string& choice, int fps,
                                             std::uint64_t seed) {
  if (choice == "live") {
    std::ios::sync_with_stdio(false);
    return std::make_unique<bw::LiveSource>(std::cin);
  }
  if (choice.rfind("dir:", 0) == 0) return std::make_unique<bw::DirectorySource>(choice.substr(4));
  if (choice.rfind("script:", 0) == 0) {
    return std::make_unique<bw::ScriptSource>(bw::load_script(choice.substr(7)), fps, seed);
  }
  throw bw::ArgumentError("source must be dir:<path>, script:<path> or live");
}

struct StreamFlags {
  bw::StreamConfig config;
  std::string dict_path;
  std::string mode = "words";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--fps", config.fps, "Frames per second")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--budget-ms", config.latency_budget_ms, "Per-frame latency budget")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--min-closed-ms", config.min_closed_ms, "Shortest closure counted as a blink")
        ->capture_default_str();
    cmd->add_option("--word-gap-ms", config.word_gap_ms, "Open time that ends a word")
        ->capture_default_str();
    cmd->add_option("--session-toggle-ms", config.session_toggle_ms,
                    "Closed time that starts/ends a session")
        ->capture_default_str();
    cmd->add_option("--dict", dict_path, "Dictionary file")->check(CLI::ExistingFile);
    cmd->add_option("--mode", mode, "Dictionary mode")
        ->check(CLI::IsMember({"words", "mouse", "keyboard"}))
        ->capture_default_str();
  }

  bw::Dictionary dictionary() const {
    const auto m = bw::dictionary_mode_from_string(mode);
    return dict_path.empty() ? bw::Dictionary(m) : bw::Dictionary::load(dict_path, m);
  }
};

// Synthetic data or open/ + closed/ directories.
struct DataFlags {
  std::string train_dir;
  std::string val_dir;
  std::size_t train_per_class = 2000;
  std::size_t val_per_class = 500;
  std::uint64_t data_seed = kDefaultSeed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--train-dir", train_dir, "Labeled training directory (open/, closed/)")
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--val-dir", val_dir, "Labeled validation directory (open/, closed/)")
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--train-per-class", train_per_class,
                    "Synthetic training frames per class when no directory is given")
        ->capture_default_str();
    cmd->add_option("--val-per-class", val_per_class, "Synthetic validation frames per class")
        ->capture_default_str();
    cmd->add_option("--data-seed", data_seed, "Seed of the synthetic generator")
        ->capture_default_str();
  }

  std::pair<bw::LabeledSet, bw::LabeledSet> load() const {
    if (!train_dir.empty()) {
      auto training = bw::read_labeled_directory(train_dir);
      auto validation = val_dir.empty() ? bw::LabeledSet{} : bw::read_labeled_directory(val_dir);
      return {std::move(training), std::move(validation)};
    }
    auto all = bw::generate_synthetic(train_per_class + val_per_class, data_seed);
    const double fraction = static_cast<double>(train_per_class) /
                            static_cast<double>(train_per_class + val_per_class);
    return bw::split(all, fraction);
  }
};

struct TrainFlags {
  bw::TrainConfig config;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--hidden", config.hidden_dim, "Hidden units")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--batch", config.batch_size, "Mini-batch size")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--epochs", config.epochs, "Training epochs")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lr", config.learning_rate, "Learning rate")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--seed", config.seed, "Training seed")->capture_default_str();
    cmd->add_option("--patience", config.early_stop_patience,
                    "Stop after this many epochs without improvement (0 = off)")
        ->capture_default_str();
  }
};

void print_events(const std::vector<bw::DecodeEvent>& events) {
  for (const auto& e : events) {
    if (const auto* w = std::get_if<bw::WordEmitted>(&e)) {
      std::cout << w->token << "\n";
    } else if (const auto* u = std::get_if<bw::UnknownPattern>(&e)) {
      std::cout << "<unknown:" << u->blink_count << ">\n";
    }
  }
}

void print_latency(const bw::LatencyStats& s) {
  std::printf("frames %zu  mean %.3f ms  p50 %.3f  p95 %.3f  p99 %.3f  max %.3f  over budget %zu\n",
              s.frames_total, s.mean_ms, s.p50_ms, s.p95_ms, s.p99_ms, s.max_ms,
              s.budget_violations);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blink-to-word decoding, training and benchmarking"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic labeled dataset or a scripted stream");
  std::string gen_out;
  std::size_t gen_count = 500;
  std::uint64_t gen_seed = kDefaultSeed;
  std::string gen_script;
  int gen_fps = 10;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--count-per-class", gen_count, "Frames per class")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--script", gen_script,
                  "Render this segment script as a frame_NNNNNN.pgm stream instead")
      ->check(CLI::ExistingFile);
  gen->add_option("--fps", gen_fps, "Frame rate for --script")->check(CLI::PositiveNumber)
      ->capture_default_str();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a TinyNet classifier");
  DataFlags train_data;
  TrainFlags train_flags;
  std::string train_out;
  std::string train_report;
  std::string train_init;
  train_data.add_to(train_cmd);
  train_flags.add_to(train_cmd);
  train_cmd->add_option("--out", train_out, "Model file to write")->required();
  train_cmd->add_option("--report", train_report, "Training report (JSON)");
  train_cmd->add_option("--init", train_init, "Initialise from this model file")
      ->check(CLI::ExistingFile);

  // grad-check
  auto* grad = app.add_subcommand("grad-check", "Compare analytic and finite-difference gradients");
  std::size_t grad_hidden = 16;
  std::uint64_t grad_seed = kDefaultSeed;
  std::size_t grad_batch = 8;
  double grad_epsilon = 1e-5;
  double grad_tolerance = 1e-4;
  std::string grad_model;
  grad->add_option("--hidden", grad_hidden, "Hidden units of the random model")
      ->capture_default_str();
  grad->add_option("--seed", grad_seed, "Seed for model and batch")->capture_default_str();
  grad->add_option("--batch", grad_batch, "Frames in the batch")->check(CLI::PositiveNumber)
      ->capture_default_str();
  grad->add_option("--epsilon", grad_epsilon, "Central difference step")->capture_default_str();
  grad->add_option("--tolerance", grad_tolerance, "Maximum relative error accepted")
      ->capture_default_str();
  grad->add_option("--model", grad_model, "Check this model instead of a random one")
      ->check(CLI::ExistingFile);

  // eval
  auto* eval = app.add_subcommand("eval", "Accuracy and latency of a classifier");
  std::string eval_classifier = "heuristic";
  std::string eval_dir;
  std::size_t eval_per_class = 500;
  std::uint64_t eval_seed = 7;
  bw::MeasureOptions eval_measure;
  std::string eval_report;
  eval->add_option("--classifier", eval_classifier, "heuristic | tinynet:<model-file>")
      ->capture_default_str();
  eval->add_option("--data", eval_dir, "Labeled test directory (open/, closed/)")
      ->check(CLI::ExistingDirectory);
  eval->add_option("--per-class", eval_per_class, "Synthetic test frames per class")
      ->capture_default_str();
  eval->add_option("--data-seed", eval_seed, "Synthetic test seed")->capture_default_str();
  eval->add_option("--repetitions", eval_measure.repetitions, "Timing repetitions")
      ->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_flag("--warmup", eval_measure.discard_first_repetition,
                 "Discard the first repetition");
  eval->add_option("--budget-ms", eval_measure.budget_ms, "Latency budget")->capture_default_str();
  eval->add_option("--report", eval_report, "Report file (JSON)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Train one model per batch size");
  DataFlags sweep_data;
  TrainFlags sweep_flags;
  std::vector<std::size_t> sweep_batches{8, 16, 32};
  std::string sweep_report;
  sweep_data.add_to(sweep_cmd);
  sweep_flags.add_to(sweep_cmd);
  sweep_cmd->add_option("--batch-sizes", sweep_batches, "Batch sizes")->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--report", sweep_report, "Report file (JSON)");

  // select
  auto* select = app.add_subcommand("select", "Most accurate candidate within a latency budget");
  std::string select_candidates;
  double select_budget = bw::kUnboundedLatency;
  std::string select_report;
  bool select_table = false;
  select->add_option("--candidates", select_candidates, "Candidate file (JSON)")
      ->required()->check(CLI::ExistingFile);
  select->add_option("--budget-ms", select_budget, "Latency budget T (default: unbounded)");
  select->add_option("--report", select_report, "Report file (JSON)");
  select->add_flag("--table", select_table, "Print the candidate table to stdout");

  // decode / run
  auto* decode = app.add_subcommand("decode", "Replay a recorded stream and print decoded words");
  auto* run = app.add_subcommand("run", "Run the pipeline and report latency and events");
  std::string source_spec;
  std::string classifier_spec = "heuristic";
  std::string report_path;
  std::string events_path;
  std::uint64_t source_seed = kDefaultSeed;
  StreamFlags stream;
  for (auto* cmd : {decode, run}) {
    cmd->add_option("--source", source_spec, "dir:<path> | script:<path> | live")->required();
    cmd->add_option("--classifier", classifier_spec, "heuristic | tinynet:<model-file>")
        ->capture_default_str();
    cmd->add_option("--report", report_path, "Pipeline report (JSON)");
    cmd->add_option("--events", events_path, "Event log (one wire message per line)");
    cmd->add_option("--source-seed", source_seed, "Seed for script: sources")
        ->capture_default_str();
    stream.add_to(cmd);
  }

  // serve
  auto* serve = app.add_subcommand("serve", "Stream live output to connected clients");
  std::string serve_bind = "127.0.0.1:8765";
  bool serve_simulated = false;
  bool serve_no_pace = false;
  bool serve_once = false;
  std::string serve_source;
  std::string serve_classifier = "heuristic";
  StreamFlags serve_stream;
  serve->add_option("--bind", serve_bind, "Listen address host:port")->capture_default_str();
  auto* sim_flag = serve->add_flag("--simulated", serve_simulated,
                                   "Decode sim_state messages sent by clients");
  serve->add_option("--source", serve_source, "dir:<path> | script:<path> | live")
      ->excludes(sim_flag);
  serve->add_option("--classifier", serve_classifier, "heuristic | tinynet:<model-file>")
      ->capture_default_str();
  serve->add_flag("--no-pace", serve_no_pace, "Decode simulated input as soon as it arrives");
  serve->add_flag("--once", serve_once, "Exit when the source is exhausted");
  serve_stream.add_to(serve);

  if (argc <= 1) {
    std::cerr << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) {
      if (!gen_script.empty()) {
        bw::ScriptSource source(bw::load_script(gen_script), gen_fps, gen_seed);
        std::vector<bw::Frame> frames;
        while (auto f = source.next()) frames.push_back(std::move(*f));
        bw::write_stream_directory(gen_out, frames);
        std::cout << "wrote " << frames.size() << " frames to " << gen_out << "\n";
      } else {
        const auto set = bw::generate_synthetic(gen_count, gen_seed);
        bw::write_labeled_directory(gen_out, set);
        std::cout << "wrote " << set.size() << " labeled frames to " << gen_out << "\n";
      }
      return 0;
    }

    if (*train_cmd) {
      auto [training, validation] = train_data.load();
      std::optional<bw::TinyNet> init;
      if (!train_init.empty()) {
        auto model = bw::load_model(train_init);
        if (!std::holds_alternative<bw::TinyNet>(model)) {
          throw bw::SchemaError(train_init + " does not hold a tinynet model");
        }
        init = bw::init_from_model(std::get<bw::TinyNet>(model), train_flags.config.hidden_dim,
                                   train_flags.config.seed);
      }
      const auto result = bw::train(training, validation, train_flags.config, init);
      bw::save_model(result.model, train_out);
      if (!train_report.empty()) {
        write_file(train_report, bw::train_report_json(result.report, train_flags.config));
      }
      std::printf("epochs %zu  best validation accuracy %.4f at epoch %zu\n",
                  result.report.epochs.size(), result.report.best_validation_accuracy,
                  result.report.epoch_of_best);
      return 0;
    }

    if (*grad) {
      bw::TinyNet model = bw::TinyNet::random(grad_hidden, grad_seed);
      if (!grad_model.empty()) {
        auto loaded = bw::load_model(grad_model);
        if (!std::holds_alternative<bw::TinyNet>(loaded)) {
          throw bw::SchemaError(grad_model + " does not hold a tinynet model");
        }
        model = std::get<bw::TinyNet>(std::move(loaded));
      }
      auto batch = bw::generate_synthetic((grad_batch + 1) / 2, grad_seed + 1);
      batch.erase(batch.begin() + static_cast<std::ptrdiff_t>(grad_batch), batch.end());
      const auto result = bw::gradient_check(model, batch, grad_epsilon);
      std::printf("parameters %zu  max relative error %.3e (parameter %zu: analytic %.6e, numeric %.6e)\n",
                  result.parameters_checked, result.max_relative_error, result.worst_parameter,
                  result.worst_analytic, result.worst_numeric);
      return result.max_relative_error < grad_tolerance ? 0 : 2;
    }

    if (*eval) {
      const auto classifier = make_classifier(eval_classifier);
      const auto test_set = eval_dir.empty() ? bw::generate_synthetic(eval_per_class, eval_seed)
                                             : bw::read_labeled_directory(eval_dir);
      const auto result = bw::evaluate(*classifier, test_set, eval_measure);
      std::printf("%s: accuracy %.4f on %zu frames\n", classifier->name().c_str(), result.accuracy,
                  test_set.size());
      print_latency(result.latency);
      if (!eval_report.empty()) {
        std::ostringstream doc;
        doc << "{\n  \"classifier\": \"" << classifier->name() << "\",\n  \"accuracy\": "
            << result.accuracy << ",\n  \"latency\": " << bw::latency_json(result.latency)
            << "}\n";
        write_file(eval_report, doc.str());
      }
      return 0;
    }

    if (*sweep_cmd) {
      auto [training, validation] = sweep_data.load();
      const auto rows = bw::sweep(sweep_batches, training, validation, sweep_flags.config);
      std::cout << bw::render_sweep(rows);
      if (!sweep_report.empty()) {
        std::ostringstream doc;
        doc << "{\n  \"rows\": [";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          doc << (i ? ",\n" : "\n") << "    {\"batch_size\": " << rows[i].batch_size
              << ", \"accuracy\": " << rows[i].accuracy
              << ", \"epoch_of_best\": " << rows[i].epoch_of_best << "}";
        }
        doc << "\n  ]\n}\n";
        write_file(sweep_report, doc.str());
      }
      return 0;
    }

    if (*select) {
      auto candidates = bw::load_candidates(select_candidates);
      const auto report = bw::make_bench_report(std::move(candidates), select_budget);
      if (select_table) std::cout << bw::render_table(report);
      std::cout << report.selected.name << "\n";
      if (!select_report.empty()) write_file(select_report, bw::bench_report_json(report));
      return 0;
    }

    if (*decode || *run) {
      stream.config.validate();
      const auto classifier = make_classifier(classifier_spec);
      auto source = make_source(source_spec, stream.config.fps, source_seed);
      bw::PipelineOptions options;
      if (*decode) options.mode = bw::PipelineMode::kReplay;
      const auto report =
          bw::run_pipeline(*source, *classifier, stream.config, stream.dictionary(), {}, options);
      if (!report_path.empty()) {
        write_file(report_path, bw::pipeline_report_json(report, stream.config));
      }
      if (!events_path.empty()) write_file(events_path, bw::event_log(report));
      if (*decode) {
        print_events(report.events);
      } else {
        for (const auto& e : report.events) std::cout << bw::describe(e) << "\n";
        print_latency(report.latency);
        std::printf("captured %zu  dropped %zu\n", report.frames_captured, report.dropped_frames);
      }
      return 0;
    }

    if (*serve) {
      if (!serve_simulated && serve_source.empty()) {
        std::cerr << "serve needs --simulated or --source\n";
        return 1;
      }
      serve_stream.config.validate();
      auto [host, port] = bw::parse_bind_address(serve_bind);
      bw::GatewayOptions options;
      options.host = host;
      options.port = port;
      options.config = serve_stream.config;
      options.dict = serve_stream.dictionary();
      options.simulated = serve_simulated;
      options.pace_simulated = !serve_no_pace;
      bw::Gateway gateway(options);
      gateway.start();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << host << ":" << gateway.port() << std::endl;

      if (!serve_source.empty()) {
        const auto classifier = make_classifier(serve_classifier);
        auto inner = make_source(serve_source, serve_stream.config.fps, kDefaultSeed);
        bw::PacedSource source(std::move(inner));
        bw::PipelineSink sink{[&](const bw::StateEvent& s) { gateway.publish_state(s); },
                              [&](const bw::DecodeEvent& e) { gateway.publish_event(e); }};
        bw::run_pipeline(source, *classifier, serve_stream.config, options.dict, sink);
        if (serve_once) {
          gateway.stop();
          return 0;
        }
      }
      while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      gateway.stop();
      return 0;
    }
  } catch (const bw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

#include "blinkword/report.hpp"

#include "blinkword/wire.hpp"
#include "json_codec.hpp"

namespace blinkword {

using codec::json;

std::string pipeline_report_json(const PipelineReport& report, const StreamConfig& config) {
  json events = json::array();
  for (const auto& e : report.events) events.push_back(codec::encode_event(e));
  json doc = {{"config", codec::encode_config(config)},
              {"frames_captured", report.frames_captured},
              {"frames_total", report.latency.frames_total},
              {"dropped_frames", report.dropped_frames},
              {"queue_high_water",
               {{"capture", report.queue_high_water.capture},
                {"decode", report.queue_high_water.decode}}},
              {"latency", codec::encode_latency(report.latency, true)},
              {"events", std::move(events)}};
  return doc.dump(2) + "\n";
}

std::string train_report_json(const TrainReport& report, const TrainConfig& config) {
  json epochs = json::array();
  for (const auto& m : report.epochs) {
    epochs.push_back({{"train_loss", m.train_loss},
                      {"train_accuracy", m.train_accuracy},
                      {"validation_accuracy", m.validation_accuracy}});
  }
  json doc = {{"config",
               {{"hidden_dim", config.hidden_dim},
                {"batch_size", config.batch_size},
                {"epochs", config.epochs},
                {"learning_rate", config.learning_rate},
                {"seed", config.seed},
                {"early_stop_patience", config.early_stop_patience}}},
              {"epoch_of_best", report.epoch_of_best},
              {"best_validation_accuracy", report.best_validation_accuracy},
              {"final_validation_accuracy", report.final_validation_accuracy},
              {"epochs", std::move(epochs)}};
  return doc.dump(2) + "\n";
}

std::string latency_json(const LatencyStats& stats) {
  return codec::encode_latency(stats, false).dump(2) + "\n";
}

std::string event_log(const PipelineReport& report) {
  // States and events interleave in the order the decoder saw them: each
  // event follows the state that triggered it.
  std::string out;
  std::size_t next_event = 0;
  for (const auto& state : report.states) {
    out += serialize(StateMessage{state});
    out += '\n';
    while (next_event < report.events.size()) {
      const auto& e = report.events[next_event];
      const auto index = std::visit([](const auto& v) { return v.frame_index; }, e);
      if (index != state.frame_index) break;
      out += serialize(EventMessage{e});
      out += '\n';
      ++next_event;
    }
  }
  return out;
}

}  // namespace blinkword

#pragma once

#include <span>
#include <string>

#include "blinkword/pipeline.hpp"
#include "blinkword/train.hpp"

namespace blinkword {

// Machine-readable documents written by the command-line tool.

std::string pipeline_report_json(const PipelineReport& report, const StreamConfig& config);
std::string train_report_json(const TrainReport& report, const TrainConfig& config);
std::string latency_json(const LatencyStats& stats);

// One wire line per StateEvent and DecodeEvent, in pipeline order.
std::string event_log(const PipelineReport& report);

}  // namespace blinkword

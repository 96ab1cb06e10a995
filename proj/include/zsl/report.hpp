#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "zsl/eval.hpp"
#include "zsl/model.hpp"
#include "zsl/train.hpp"
#include "zsl/transductive.hpp"

namespace zsl {

const char* setting_name(Setting setting);
Setting parse_setting(const std::string& name); // throws ConfigError

nlohmann::json loss_json(const LossBreakdown& loss);
nlohmann::json hyperparams_json(const HyperParams& hp);
nlohmann::json metrics_json(const Metrics& m);
nlohmann::json train_log_json(const std::vector<TrainLogEntry>& log); // no wall times
nlohmann::json round_reports_json(const std::vector<RoundReport>& rounds);

std::string timestamp_utc();

// One record per line, wall times included.
void save_train_log(const std::filesystem::path& path, const std::vector<TrainLogEntry>& log);

void save_report(const std::filesystem::path& path, const nlohmann::json& report);

} // namespace zsl

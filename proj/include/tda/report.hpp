#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tda/loss.hpp"
#include "tda/metrics.hpp"
#include "tda/synth.hpp"
#include "tda/targets.hpp"

namespace tda {

using Json = nlohmann::json;

// Rounds to 9 significant digits so serialized reports are stable and
// diffable. Non-finite values become JSON null.
Json json_real(double v);

// Two-space indented, keys sorted, trailing newline.
std::string dump_json(const Json& j);

Json to_json(const DatasetStats& stats);
DatasetStats stats_from_json(const Json& j);
DatasetStats load_stats(const std::filesystem::path& path);
void save_stats(const std::filesystem::path& path, const DatasetStats& stats);

Json to_json(const TargetLossRecord& rec);
Json loss_report(const CombinedLoss& loss, const BaseLossSpec& base, const TdaConfig& cfg);

Json to_json(const EvalReport& report);
std::string roc_csv(const std::vector<RocPoint>& points);
std::string bins_csv(const std::vector<BinRow>& rows);

SceneSpec scene_spec_from_json(const Json& j);
Json to_json(const SceneSpec& spec);

}  // namespace tda

#pragma once

#include <string>

#include <json.hpp>

#include "pkpir/audit.hpp"
#include "pkpir/engine.hpp"
#include "pkpir/scheme.hpp"

namespace pkpir {

using Json = nlohmann::json;

// Plan files: a JSON object mapping the database index (as a string) to its
// cached message list, e.g. {"1": [3], "2": [4]}.
Json plan_to_json(const PrefetchPlan& plan);
PrefetchPlan plan_from_json(const Json& j);
PrefetchPlan load_plan_file(const std::string& path);

Json table_to_json(const QueryTable& table);
Json transcript_to_json(const RetrievalTranscript& tr);
Json privacy_report_to_json(const PrivacyReport& report);
Json grid_report_to_json(const GridReport& report);

/// Fixed-width lowercase hex, ceil(w/4) digits per symbol.
std::string symbols_to_hex(const std::vector<Fe>& symbols, std::uint32_t width);

}  // namespace pkpir

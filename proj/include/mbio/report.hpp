/**
 * @file report.hpp
 * @brief JSON views of harness results.
 */
#pragma once

#include <json.hpp>

#include "mbio/harness.hpp"

namespace mbio::report {

nlohmann::json to_json(const harness::VerifyOutcome& outcome);
nlohmann::json to_json(const hw::StageReport& stage);
nlohmann::json to_json(const std::vector<hw::StageReport>& stages);
/// EER and operating point; `full` adds the sweep and score lists.
nlohmann::json to_json(const harness::EvalResult& result, double threshold, bool full = false);
nlohmann::json to_json(const harness::EquivReport& report);
nlohmann::json summary(const harness::Evaluation& evaluation);

}  // namespace mbio::report

#pragma once

#include <json.hpp>

#include "migrationlab/analysis.hpp"
#include "migrationlab/game.hpp"
#include "migrationlab/offline.hpp"
#include "migrationlab/policy.hpp"

namespace migrationlab {

nlohmann::ordered_json run_record_json(const RunRecord& run);
nlohmann::ordered_json opt_result_json(const OptResult& opt);
nlohmann::ordered_json competitive_report_json(const CompetitiveReport& report);
nlohmann::ordered_json epoch_ledger_json(const EpochLedger& ledger, const GameParams& params);

}  // namespace migrationlab

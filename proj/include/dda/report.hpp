#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dda/anomaly.hpp"
#include "dda/dda_engine.hpp"

namespace dda {

enum class RenderMode { Text, Json, Csv };

/// Wall-clock comparison of the ingest phase (parse + explode + build +
/// serialize) against the analysis pass.
struct TimingReport {
    double ingestSeconds = 0.0;
    double ddaSeconds = 0.0;
    Count recordCount = 0;
    Count tripleCount = 0;

    /// ddaSeconds / ingestSeconds; empty when ingestSeconds is not positive.
    std::optional<double> ratio() const;
};

// All renderers are deterministic functions of their inputs. Numbers are
// plain decimal with no thousands separators; durations are printed at
// millisecond resolution.

/// Stats table with columns Entity | N_i | V_i | M_i | Structure Type.
/// Text mode draws an ASCII pipe/dash table, Csv adds a header row with
/// RFC-4180 quoting, Json emits the full report object.
std::string renderStatsTable(const DdaReport& report, RenderMode mode);

/// Three-line verdict block for the global-sum relations.
std::string renderGlobalSums(const GlobalSums& sums);

/// Text mode is an ASCII table with display-unescaped subjects; Json mode is
/// JSON lines, one object per finding; Csv one row per finding.
std::string renderFindings(const std::vector<AnomalyFinding>& findings, RenderMode mode,
                           std::string_view separator = "|");

std::string renderTimings(const TimingReport& timings, RenderMode mode);

// JSON bindings used by the renderers and by round-trip tooling.
nlohmann::ordered_json reportToJson(const DdaReport& report);
DdaReport reportFromJson(const nlohmann::json& j);
nlohmann::ordered_json findingToJson(const AnomalyFinding& finding);
nlohmann::ordered_json timingsToJson(const TimingReport& timings);

} // namespace dda

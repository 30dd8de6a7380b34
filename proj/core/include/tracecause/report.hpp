#pragma once

#include <string>

#include "tracecause/engine.hpp"

namespace tracecause {

inline constexpr int kReportVersion = 1;

// JSON report; see docs/formats.md. `cause_vars` fills the partition when no
// cause was found. With `timing` false, wall_ms is written as 0 so reports of
// identical runs compare byte for byte.
std::string report_json(const CauseReport& report, const TraceLog& log, const VarSet& cause_vars,
                        bool timing = true);

}  // namespace tracecause

#include "tracecause/report.hpp"

#include <json.hpp>

namespace tracecause {

std::string report_json(const CauseReport& report, const TraceLog& log, const VarSet& cause_vars,
                        bool timing) {
  using nlohmann::ordered_json;
  const Signature& sig = log.signature();
  const Partition part =
      report.cause ? report.cause->partition : derive_partition(sig, cause_vars);

  ordered_json j;
  j["report_version"] = kReportVersion;
  j["mode"] = std::string(to_string(report.mode));
  j["found"] = report.found();
  j["cause"] = report.cause ? ordered_json(report.cause->to_string()) : ordered_json(nullptr);
  j["witness"] = report.found() ? ordered_json(report.witness) : ordered_json(nullptr);
  j["counterfactual"] = report.found() ? ordered_json(report.counterfactual) : ordered_json(nullptr);
  j["reason"] = report.reason ? ordered_json(std::string(to_string(*report.reason)))
                              : ordered_json(nullptr);
  j["partition"] = {{"X", sig.names(part.x)}, {"Z", sig.names(part.z)}, {"W", sig.names(part.w)}};

  const EngineStats& st = report.stats;
  j["stats"] = {
      {"outer_iters", st.outer_iters},
      {"inner_iters", st.inner_iters},
      {"candidates_tried", st.candidates_tried},
      {"alpha_final", st.alpha_final},
      {"selected_traces", st.selected_traces},
      {"abstract_states", st.abstract_states},
      {"abstract_state_history", st.abstract_state_history},
      {"checked_universe", st.checked_universe},
      {"wall_ms", timing ? st.wall_ms : 0.0},
  };

  if (report.verification) {
    const Verification& v = *report.verification;
    auto id = [&](const std::optional<std::size_t>& i) {
      return i ? ordered_json(log[*i].id()) : ordered_json(nullptr);
    };
    j["verification"] = {
        {"ac1", v.ac1},
        {"ac2a", v.ac2a},
        {"ac2b", v.ac2b},
        {"ok", v.ok()},
        {"witness", id(v.witness)},
        {"counterfactual", id(v.counterfactual)},
    };
  } else {
    j["verification"] = nullptr;
  }
  return j.dump(2) + "\n";
}

}  // namespace tracecause

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "easysched/energy.hpp"
#include "easysched/jobshop.hpp"
#include "easysched/pso.hpp"
#include "easysched/resched.hpp"
#include "easysched/types.hpp"

namespace easysched {

// --- Protocol messages ------------------------------------------------

struct EnergyRequest {
  DeciWh energy_dwh = 0;
  bool operator==(const EnergyRequest&) const = default;
};
struct EnergyReply {
  bool oui = false;
  bool operator==(const EnergyReply&) const = default;
};
struct ControlNoPerturbation {
  bool operator==(const ControlNoPerturbation&) const = default;
};
struct ControlReschedule {
  Seconds time_resch_s = 0;
  double taux_energy_pct = 0.0;
  bool operator==(const ControlReschedule&) const = default;
};
struct ConsumptionReport {
  Seconds t_s = 0;
  DeciWh cumulative_dwh = 0;
  bool operator==(const ConsumptionReport&) const = default;
};

// Session bodies used only by the distributed runtime.
struct Hello {
  std::string role;
  std::string id;
  bool operator==(const Hello&) const = default;
};
struct StartPredictive {
  bool operator==(const StartPredictive&) const = default;
};
struct Negotiated {
  bool failed = false;
  bool operator==(const Negotiated&) const = default;
};
struct StartOnline {
  bool operator==(const StartOnline&) const = default;
};
struct ReportFragment {
  std::string payload_json;
  bool operator==(const ReportFragment&) const = default;
};
struct Shutdown {
  bool operator==(const Shutdown&) const = default;
};

using MessageBody =
    std::variant<EnergyRequest, EnergyReply, ControlNoPerturbation,
                 ControlReschedule, ConsumptionReport, Hello, StartPredictive,
                 Negotiated, StartOnline, ReportFragment, Shutdown>;

struct AgentMessage {
  std::string from;
  std::string to;
  Seconds sent_at_s = 0;
  MessageBody body;
  bool operator==(const AgentMessage&) const = default;
};

// --- Trace rows (the run report schemas) ------------------------------

struct NegotiationRow {
  double gamma = 0.0;
  double makespan_s = 0.0;
  double energy_wh = 0.0;
  std::string reply;  // "Oui", "Non", or "-" while pending
};

struct ReactiveRow {
  std::string source;
  double taux_energy_pct = 0.0;
  Seconds time_resch_s = 0;
  double old_makespan_s = 0.0;
  double old_energy_wh = 0.0;
  double new_makespan_s = 0.0;
  double new_energy_wh = 0.0;
  double budget_wh = 0.0;
  bool penalty = false;
};

// --- Factory scheduler agent (AOU) -------------------------------------

// Outcome of one predictive solver run. The default solver wraps pso_run;
// tests may inject scripted outcomes.
struct SolveOutcome {
  std::optional<Schedule> schedule;
  double makespan_s = 0.0;
  double energy_wh = 0.0;
  DeciWh energy_dwh = 0;
  double f = 0.0;
};

using PredictiveSolver = std::function<SolveOutcome(double gamma, int round)>;

// pso_run on the given instance, seeding round k with params.seed + k.
PredictiveSolver make_pso_solver(const Instance& instance,
                                 const PsoParams& params);

enum class AouPhase { predictive, awaiting_reply, online, done };

struct AouConfig {
  std::string id;
  std::string provider_id;
  std::string ace_id;
  double gamma0 = 1.0;
  double alpha = 0.1;
  Seconds p3_s = 8;
  Instance instance;
};

struct AouState {
  AouConfig config;
  AouPhase phase = AouPhase::predictive;
  int rounds = 0;  // completed solver runs
  double gamma = 1.0;
  bool failed = false;
  std::optional<Schedule> current;
  std::vector<NegotiationRow> history;
  std::vector<ReactiveRow> reactive_log;
  std::map<std::string, double> applied_taux;  // source -> last applied taux
  std::set<std::pair<std::string, Seconds>> seen_orders;
  DeciWh reported_cumulative_dwh = 0;
  std::vector<std::string> notes;
};

AouState make_aou(AouConfig config);

struct AouStart {};
struct AouReply {
  bool oui = false;
};
using AouPredictiveEvent = std::variant<AouStart, AouReply>;

// Predictive negotiation step: runs the solver on start and on each refusal
// (with gamma lowered by alpha), emits the energy request, and goes online
// on acceptance. A refusal that would push gamma below zero ends the phase
// with the failure flag set.
std::pair<AouState, std::vector<AgentMessage>> aou_predictive_step(
    AouState state, const AouPredictiveEvent& event,
    const PredictiveSolver& solver, Seconds now_s);

// Online control step. Reschedule orders are deduplicated by
// (source, time_resch) and by repeated taux from the same source; applied
// orders update the current schedule and report consumption to the ACE.
std::pair<AouState, std::vector<AgentMessage>> aou_online_step(
    AouState state, const AgentMessage& message, Seconds now_s);

// Energy of all placements finished by now, never less than what was
// already reported (consumption cannot be taken back).
DeciWh aou_consumed_by(const AouState& state, Seconds now_s);

// --- Energy provider agent (AOE) ----------------------------------------

enum class SourceKind { wind, pv };

struct AoeConfig {
  std::string id;
  SourceKind kind = SourceKind::wind;
  WindSourceConfig wind;
  double pv_taux_pct = 10.0;
  DeciWh capacity_dwh = 0;
  Seconds p1_s = 3;
  Seconds p2_s = 6;
  std::vector<std::string> consumers;  // connected AOU ids
};

struct AoeState {
  AoeConfig config;
  DeciWh committed_dwh = 0;
  AlarmFilter filter;
  EnergyAlarm last_alarm;
  std::vector<std::string> notes;
};

AoeState make_aoe(AoeConfig config);

// Oui iff the remaining capacity covers the request; acceptance books it.
std::pair<AoeState, AgentMessage> aoe_validate_request(
    AoeState state, const AgentMessage& request, Seconds now_s);

struct AoeTickP1 {
  SensorSample sample;  // ignored by pv sources
};
struct AoeTickP2 {};
using AoeOnlineEvent = std::variant<AoeTickP1, AoeTickP2>;

// p1 ticks refresh the alarm state from the source; p2 ticks push the
// filter one window and emit a reschedule order or a heartbeat to every
// connected consumer.
std::pair<AoeState, std::vector<AgentMessage>> aoe_online_step(
    AoeState state, const AoeOnlineEvent& event, Seconds now_s);

// --- Energy controller agent (ACE) --------------------------------------

struct AceState {
  std::map<std::string, std::vector<std::pair<Seconds, DeciWh>>> ledger;
};

// Appends one consumption sample; a cumulative value below the factory's
// last record is rejected.
std::pair<AceState, bool> ace_record(AceState state, const std::string& factory,
                                     Seconds t_s, DeciWh cumulative_dwh);

std::string ace_ledger_csv(const AceState& state);

}  // namespace easysched

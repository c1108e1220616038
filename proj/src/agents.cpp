#include "easysched/agents.hpp"

#include <algorithm>
#include <sstream>

namespace easysched {

PredictiveSolver make_pso_solver(const Instance& instance,
                                 const PsoParams& params) {
  return [instance, params](double gamma, int round) {
    PsoParams p = params;
    p.seed = params.seed + static_cast<std::uint64_t>(round);
    const PsoResult r = pso_run(instance, gamma, p);
    SolveOutcome out;
    out.makespan_s = static_cast<double>(r.schedule.makespan_s);
    out.energy_wh = to_wh(r.schedule.total_energy_dwh);
    out.energy_dwh = r.schedule.total_energy_dwh;
    out.f = r.f;
    out.schedule = std::move(r.schedule);
    return out;
  };
}

AouState make_aou(AouConfig config) {
  AouState state;
  state.gamma = config.gamma0;
  state.config = std::move(config);
  return state;
}

namespace {

std::pair<AouState, std::vector<AgentMessage>> aou_solve_and_request(
    AouState state, const PredictiveSolver& solver, Seconds now_s) {
  const SolveOutcome outcome = solver(state.gamma, state.rounds);
  ++state.rounds;
  state.current = outcome.schedule;
  state.history.push_back(
      {state.gamma, outcome.makespan_s, outcome.energy_wh, "-"});
  state.phase = AouPhase::awaiting_reply;
  AgentMessage request{state.config.id, state.config.provider_id, now_s,
                       EnergyRequest{outcome.energy_dwh}};
  return {std::move(state), {std::move(request)}};
}

}  // namespace

std::pair<AouState, std::vector<AgentMessage>> aou_predictive_step(
    AouState state, const AouPredictiveEvent& event,
    const PredictiveSolver& solver, Seconds now_s) {
  if (std::holds_alternative<AouStart>(event)) {
    if (state.phase != AouPhase::predictive) {
      state.notes.push_back("protocol error: start in wrong phase");
      return {std::move(state), {}};
    }
    return aou_solve_and_request(std::move(state), solver, now_s);
  }

  const AouReply& reply = std::get<AouReply>(event);
  if (state.phase != AouPhase::awaiting_reply) {
    state.notes.push_back("protocol error: energy reply in wrong phase");
    return {std::move(state), {}};
  }
  state.history.back().reply = reply.oui ? "Oui" : "Non";
  if (reply.oui) {
    state.phase = AouPhase::online;
    return {std::move(state), {}};
  }
  const double next_gamma =
      state.config.gamma0 - state.rounds * state.config.alpha;
  if (next_gamma < -1e-9) {
    state.phase = AouPhase::done;
    state.failed = true;
    state.notes.push_back("negotiation failed: gamma exhausted");
    return {std::move(state), {}};
  }
  state.gamma = std::max(next_gamma, 0.0);
  return aou_solve_and_request(std::move(state), solver, now_s);
}

DeciWh aou_consumed_by(const AouState& state, Seconds now_s) {
  DeciWh consumed = 0;
  if (state.current) {
    for (const Placement& p : state.current->placements)
      if (p.end_s <= now_s)
        consumed += state.config.instance.op(p.job, p.rank)
                        .profile[p.speed - 1]
                        .energy_dwh;
  }
  return std::max(consumed, state.reported_cumulative_dwh);
}

std::pair<AouState, std::vector<AgentMessage>> aou_online_step(
    AouState state, const AgentMessage& message, Seconds now_s) {
  std::vector<AgentMessage> actions;
  if (state.phase != AouPhase::online) {
    state.notes.push_back("protocol error: control message in phase " +
                          std::to_string(static_cast<int>(state.phase)));
    return {std::move(state), actions};
  }

  if (std::holds_alternative<ControlNoPerturbation>(message.body))
    return {std::move(state), actions};

  const auto* control = std::get_if<ControlReschedule>(&message.body);
  if (control == nullptr) {
    state.notes.push_back("protocol error: unexpected message kind online");
    return {std::move(state), actions};
  }

  const std::string& source = message.from;
  if (!state.seen_orders.insert({source, control->time_resch_s}).second) {
    state.notes.push_back("duplicate order ignored: " + source + "@" +
                          std::to_string(control->time_resch_s));
    return {std::move(state), actions};
  }
  auto applied = state.applied_taux.find(source);
  if (applied != state.applied_taux.end() &&
      applied->second == control->taux_energy_pct) {
    state.notes.push_back("unchanged taux from " + source + " ignored");
    return {std::move(state), actions};
  }
  if (!state.current) {
    state.notes.push_back("reschedule order without a schedule");
    return {std::move(state), actions};
  }
  if (control->time_resch_s > state.current->makespan_s) {
    state.notes.push_back("order at t=" +
                          std::to_string(control->time_resch_s) +
                          " beyond makespan, schedule unchanged");
    return {std::move(state), actions};
  }

  const RescheduleOrder order{control->time_resch_s,
                              control->taux_energy_pct};
  const Schedule old = *state.current;
  const RescheduleResult result =
      reschedule(old, order, state.config.instance);

  ReactiveRow row;
  row.source = source;
  row.taux_energy_pct = control->taux_energy_pct;
  row.time_resch_s = control->time_resch_s;
  row.old_makespan_s = static_cast<double>(old.makespan_s);
  row.old_energy_wh = to_wh(old.total_energy_dwh);
  row.new_makespan_s = static_cast<double>(result.schedule.makespan_s);
  row.new_energy_wh = to_wh(result.schedule.total_energy_dwh);
  row.budget_wh = result.energy_budget_wh;
  row.penalty = result.penalty;
  state.reactive_log.push_back(row);
  state.current = result.schedule;
  state.applied_taux[source] = control->taux_energy_pct;

  state.reported_cumulative_dwh = aou_consumed_by(state, now_s);
  actions.push_back({state.config.id, state.config.ace_id, now_s,
                     ConsumptionReport{now_s, state.reported_cumulative_dwh}});
  return {std::move(state), actions};
}

AoeState make_aoe(AoeConfig config) {
  AoeState state;
  state.filter.p2_initial_s = config.p2_s;
  state.filter.p2_s = config.p2_s;
  state.config = std::move(config);
  return state;
}

std::pair<AoeState, AgentMessage> aoe_validate_request(
    AoeState state, const AgentMessage& request, Seconds now_s) {
  const auto& body = std::get<EnergyRequest>(request.body);
  if (body.energy_dwh <= 0)
    throw Error("energy request must be positive");
  const bool oui =
      state.committed_dwh + body.energy_dwh <= state.config.capacity_dwh;
  if (oui) state.committed_dwh += body.energy_dwh;
  AgentMessage reply{state.config.id, request.from, now_s, EnergyReply{oui}};
  return {std::move(state), std::move(reply)};
}

std::pair<AoeState, std::vector<AgentMessage>> aoe_online_step(
    AoeState state, const AoeOnlineEvent& event, Seconds now_s) {
  std::vector<AgentMessage> actions;

  if (const auto* tick = std::get_if<AoeTickP1>(&event)) {
    if (state.config.kind == SourceKind::pv) {
      state.last_alarm = pv_source_poll(state.config.pv_taux_pct);
    } else {
      try {
        state.last_alarm = detect(tick->sample, state.config.wind);
      } catch (const Error& e) {
        state.notes.push_back(std::string("sensor fault: ") + e.what());
        state.last_alarm = EnergyAlarm{};
      }
    }
    return {std::move(state), actions};
  }

  auto [filter, action] = filter_alarm(state.filter, state.last_alarm, now_s);
  state.filter = filter;
  for (const std::string& consumer : state.config.consumers) {
    if (action.order) {
      actions.push_back(
          {state.config.id, consumer, now_s,
           ControlReschedule{action.time_resch_s, action.taux_energy_pct}});
    } else {
      actions.push_back(
          {state.config.id, consumer, now_s, ControlNoPerturbation{}});
    }
  }
  return {std::move(state), actions};
}

std::pair<AceState, bool> ace_record(AceState state, const std::string& factory,
                                     Seconds t_s, DeciWh cumulative_dwh) {
  auto& entries = state.ledger[factory];
  if (!entries.empty() && cumulative_dwh < entries.back().second)
    return {std::move(state), false};
  entries.emplace_back(t_s, cumulative_dwh);
  return {std::move(state), true};
}

std::string ace_ledger_csv(const AceState& state) {
  std::ostringstream out;
  out << "factory,t_s,cumulative_wh\n";
  for (const auto& [factory, entries] : state.ledger)
    for (const auto& [t, e] : entries)
      out << factory << ',' << t << ',' << to_wh(e) << '\n';
  return out.str();
}

}  // namespace easysched

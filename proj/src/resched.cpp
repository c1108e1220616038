#include "easysched/resched.hpp"

#include <algorithm>
#include <optional>

namespace easysched {

namespace {

constexpr double kBudgetEps = 1e-9;

// Partition of a schedule at the reschedule instant. Placements that are
// finished or in execution keep their exact times and speed; only
// operations that have not started may be revised.
struct Split {
  std::vector<Placement> fixed;
  std::vector<Placement> movable;                // start >= t_resch
  std::vector<std::vector<int>> machine_seq;     // movable ids per machine
  std::size_t affected_count = 0;                // movable + in execution
};

Split split_at(const Schedule& schedule, const Instance& instance,
               Seconds t_resch) {
  Split split;
  split.machine_seq.resize(instance.num_machines);

  std::vector<const Placement*> ordered;
  for (const Placement& p : schedule.placements) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const Placement* a, const Placement* b) {
              if (a->start_s != b->start_s) return a->start_s < b->start_s;
              return std::pair{a->job, a->rank} < std::pair{b->job, b->rank};
            });

  for (const Placement* p : ordered) {
    if (p->end_s > t_resch) ++split.affected_count;
    if (p->start_s >= t_resch) {
      split.machine_seq[p->machine].push_back(
          static_cast<int>(split.movable.size()));
      split.movable.push_back(*p);
    } else {
      split.fixed.push_back(*p);
    }
  }
  return split;
}

// Semi-active rebuild for given machine sequences and speeds of the movable
// operations. Returns nothing when the sequences deadlock against the job
// routings (possible after swaps).
std::optional<Schedule> rebuild(const Instance& instance, const Split& split,
                                const std::vector<std::vector<int>>& machine_seq,
                                const std::vector<int>& speeds,
                                Seconds t_resch) {
  std::vector<Seconds> machine_free(instance.num_machines, 0);
  std::vector<Seconds> job_free(instance.num_jobs, 0);
  std::vector<std::vector<bool>> placed(instance.num_jobs);
  for (int j = 0; j < instance.num_jobs; ++j)
    placed[j].assign(instance.jobs[j].size(), false);

  std::vector<Placement> out = split.fixed;
  for (const Placement& p : split.fixed) {
    machine_free[p.machine] = std::max(machine_free[p.machine], p.end_s);
    job_free[p.job] = std::max(job_free[p.job], p.end_s);
    placed[p.job][p.rank] = true;
  }

  std::vector<std::size_t> next(machine_seq.size(), 0);
  std::size_t remaining = split.movable.size();
  while (remaining > 0) {
    bool progress = false;
    for (std::size_t m = 0; m < machine_seq.size(); ++m) {
      while (next[m] < machine_seq[m].size()) {
        const int id = machine_seq[m][next[m]];
        const Placement& base = split.movable[id];
        if (base.rank > 0 && !placed[base.job][base.rank - 1]) break;
        const Operation& op = instance.op(base.job, base.rank);
        Placement p = base;
        p.speed = speeds[id];
        p.start_s = std::max({machine_free[m], job_free[base.job], t_resch});
        p.end_s = p.start_s + op.profile[p.speed - 1].duration_s;
        machine_free[m] = p.end_s;
        job_free[base.job] = p.end_s;
        placed[base.job][base.rank] = true;
        out.push_back(p);
        ++next[m];
        --remaining;
        progress = true;
      }
    }
    if (!progress) return std::nullopt;  // precedence cycle
  }
  return finalize_schedule(std::move(out), instance);
}

std::vector<int> predictive_speeds(const Split& split) {
  std::vector<int> speeds(split.movable.size());
  for (std::size_t i = 0; i < split.movable.size(); ++i)
    speeds[i] = split.movable[i].speed;
  return speeds;
}

int cheapest_speed(const Operation& op) {
  int best = 1;
  for (int v = 2; v <= static_cast<int>(op.profile.size()); ++v)
    if (op.profile[v - 1].energy_dwh < op.profile[best - 1].energy_dwh)
      best = v;
  return best;
}

}  // namespace

double energy_budget_wh(const Schedule& predictive,
                        const RescheduleOrder& order) {
  return (1.0 - order.taux_energy_pct / 100.0) *
         to_wh(predictive.total_energy_dwh);
}

RescheduleResult technique1(const Schedule& predictive,
                            const RescheduleOrder& order,
                            const Instance& instance) {
  order.validate();
  check_feasible(predictive, instance);

  RescheduleResult result;
  result.technique_used = Technique::speed_only;
  result.energy_budget_wh = energy_budget_wh(predictive, order);

  if (to_wh(predictive.total_energy_dwh) <=
      result.energy_budget_wh + kBudgetEps) {
    result.schedule = predictive;
    return result;
  }

  const Split split = split_at(predictive, instance, order.time_resch_s);
  std::vector<int> speeds = predictive_speeds(split);

  struct Candidate {
    int id;
    DeciWh saving;
    Seconds start_s;
    int job, rank, best_speed;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < split.movable.size(); ++i) {
    const Placement& p = split.movable[i];
    const Operation& op = instance.op(p.job, p.rank);
    const int best = cheapest_speed(op);
    candidates.push_back({static_cast<int>(i),
                          op.profile[p.speed - 1].energy_dwh -
                              op.profile[best - 1].energy_dwh,
                          p.start_s, p.job, p.rank, best});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.saving != b.saving) return a.saving > b.saving;
              if (a.start_s != b.start_s) return a.start_s < b.start_s;
              return std::pair{a.job, a.rank} < std::pair{b.job, b.rank};
            });

  DeciWh energy = predictive.total_energy_dwh;
  bool met = false;
  for (const Candidate& c : candidates) {
    if (c.saving <= 0) break;
    speeds[c.id] = c.best_speed;
    energy -= c.saving;
    if (to_wh(energy) <= result.energy_budget_wh + kBudgetEps) {
      met = true;
      break;
    }
  }

  auto rebuilt = rebuild(instance, split, split.machine_seq, speeds,
                         order.time_resch_s);
  if (!rebuilt)
    throw Error("technique1: rebuild failed on an unchanged sequence");
  result.schedule = std::move(*rebuilt);
  result.penalty = !met;
  return result;
}

RescheduleResult technique2(const Schedule& predictive,
                            const RescheduleOrder& order,
                            const Instance& instance, std::size_t max_evals) {
  order.validate();
  check_feasible(predictive, instance);

  RescheduleResult result;
  result.technique_used = Technique::permutation;
  result.energy_budget_wh = energy_budget_wh(predictive, order);

  const Split split = split_at(predictive, instance, order.time_resch_s);
  if (split.movable.empty()) {
    result.schedule = predictive;
    result.penalty = to_wh(predictive.total_energy_dwh) >
                     result.energy_budget_wh + kBudgetEps;
    return result;
  }
  if (max_evals == 0)
    max_evals = 10 * split.affected_count * split.affected_count;

  // Start from the cheapest fixed-sequence assignment; the search can then
  // only trade makespan against the (already minimal) energy.
  std::vector<int> speeds(split.movable.size());
  for (std::size_t i = 0; i < split.movable.size(); ++i)
    speeds[i] = cheapest_speed(
        instance.op(split.movable[i].job, split.movable[i].rank));
  std::vector<std::vector<int>> seq = split.machine_seq;

  struct Point {
    DeciWh energy;
    Seconds makespan;
    Schedule schedule;
    bool better_than(const Point& other) const {
      if (energy != other.energy) return energy < other.energy;
      return makespan < other.makespan;
    }
  };
  auto eval = [&](const std::vector<std::vector<int>>& s,
                  const std::vector<int>& v) -> std::optional<Point> {
    auto schedule = rebuild(instance, split, s, v, order.time_resch_s);
    if (!schedule) return std::nullopt;
    return Point{schedule->total_energy_dwh, schedule->makespan_s,
                 std::move(*schedule)};
  };

  std::size_t evals = 1;
  std::optional<Point> current = eval(seq, speeds);
  if (!current) throw Error("technique2: rebuild failed on start state");
  const double budget = result.energy_budget_wh;
  auto meets = [&](const Point& p) {
    return to_wh(p.energy) <= budget + kBudgetEps;
  };
  std::optional<Point> best_meeting;
  Point best_any = *current;
  if (meets(*current)) best_meeting = *current;

  while (evals < max_evals) {
    struct Move {
      std::vector<std::vector<int>> seq;
      std::vector<int> speeds;
      Point point;
    };
    std::optional<Move> best_move;

    // Adjacent swaps on each machine.
    for (std::size_t m = 0; m < seq.size() && evals < max_evals; ++m) {
      for (std::size_t k = 0; k + 1 < seq[m].size() && evals < max_evals; ++k) {
        auto s = seq;
        std::swap(s[m][k], s[m][k + 1]);
        ++evals;
        auto point = eval(s, speeds);
        if (!point) continue;
        if (meets(*point) &&
            (!best_meeting || point->better_than(*best_meeting)))
          best_meeting = *point;
        if (point->better_than(best_any)) best_any = *point;
        if (point->better_than(*current) &&
            (!best_move || point->better_than(best_move->point)))
          best_move = Move{std::move(s), speeds, std::move(*point)};
      }
    }
    // Speed changes.
    for (std::size_t i = 0; i < speeds.size() && evals < max_evals; ++i) {
      for (int v = 1; v <= instance.max_speed && evals < max_evals; ++v) {
        if (v == speeds[i]) continue;
        auto w = speeds;
        w[i] = v;
        ++evals;
        auto point = eval(seq, w);
        if (!point) continue;
        if (meets(*point) &&
            (!best_meeting || point->better_than(*best_meeting)))
          best_meeting = *point;
        if (point->better_than(best_any)) best_any = *point;
        if (point->better_than(*current) &&
            (!best_move || point->better_than(best_move->point)))
          best_move = Move{seq, std::move(w), std::move(*point)};
      }
    }

    if (!best_move) break;  // local optimum
    seq = std::move(best_move->seq);
    speeds = std::move(best_move->speeds);
    current = std::move(best_move->point);
  }

  if (best_meeting) {
    result.schedule = std::move(best_meeting->schedule);
    result.penalty = false;
  } else {
    result.schedule = std::move(best_any.schedule);
    result.penalty = true;
  }
  return result;
}

RescheduleResult reschedule(const Schedule& predictive,
                            const RescheduleOrder& order,
                            const Instance& instance) {
  RescheduleResult first = technique1(predictive, order, instance);
  if (!first.penalty) return first;
  return technique2(predictive, order, instance);
}

}  // namespace easysched

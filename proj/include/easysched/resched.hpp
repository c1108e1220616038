#pragma once

#include <cstdint>
#include <string>

#include "easysched/jobshop.hpp"
#include "easysched/types.hpp"

namespace easysched {

// Reactive command from an energy provider: from when the schedule suffix
// may change, and by what percentage consumption must drop.
struct RescheduleOrder {
  Seconds time_resch_s = 0;
  double taux_energy_pct = 0.0;  // in (0, 100]

  void validate() const {
    if (time_resch_s < 0)
      throw Error("reschedule order: negative reschedule time");
    if (!(taux_energy_pct > 0.0 && taux_energy_pct <= 100.0))
      throw Error("reschedule order: taux must be in (0, 100]");
  }
};

enum class Technique { speed_only, permutation };

struct RescheduleResult {
  Schedule schedule;
  bool penalty = false;  // true: the budget could not be met
  Technique technique_used = Technique::speed_only;
  double energy_budget_wh = 0.0;
};

// budget = (1 - taux/100) * total energy of the schedule being revised.
double energy_budget_wh(const Schedule& predictive,
                        const RescheduleOrder& order);

// Sequence-preserving speed changes: operations already finished or in
// execution at time_resch_s are untouched; the remaining affected
// operations are re-sped one at a time, largest saving first, until the
// budget is met or every candidate is at its cheapest level.
RescheduleResult technique1(const Schedule& predictive,
                            const RescheduleOrder& order,
                            const Instance& instance);

// Fallback search over adjacent swaps of affected operations on each
// machine combined with speed changes, capped at max_evals schedule
// evaluations (0 means 10 * |affected|^2). The finished prefix is never
// altered and in-execution operations keep their speed.
RescheduleResult technique2(const Schedule& predictive,
                            const RescheduleOrder& order,
                            const Instance& instance,
                            std::size_t max_evals = 0);

// technique1, then technique2 whenever the first leaves a penalty.
RescheduleResult reschedule(const Schedule& predictive,
                            const RescheduleOrder& order,
                            const Instance& instance);

}  // namespace easysched

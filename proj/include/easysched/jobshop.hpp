#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "easysched/types.hpp"

namespace easysched {

// Per-speed execution cost of one operation. Speed levels are 1..max_speed;
// profile[v-1] holds the entry for level v.
struct SpeedProfile {
  Seconds duration_s = 0;
  DeciWh energy_dwh = 0;
  bool operator==(const SpeedProfile&) const = default;
};

struct Operation {
  int job = 0;
  int rank = 0;  // position in the job's routing
  int machine = 0;
  std::vector<SpeedProfile> profile;  // one entry per speed level
  bool operator==(const Operation&) const = default;
};

// Job-shop problem with speed-scalable machines.
struct Instance {
  int num_machines = 0;
  int num_jobs = 0;
  int max_speed = 0;
  std::vector<std::vector<Operation>> jobs;  // jobs[j] = ordered routing

  int total_operations() const;
  const Operation& op(int job, int rank) const { return jobs[job][rank]; }

  // Throws Error naming the offending operation on any invariant breach.
  void validate() const;

  bool operator==(const Instance&) const = default;
};

struct Placement {
  int job = 0;
  int rank = 0;
  int machine = 0;
  int speed = 1;
  Seconds start_s = 0;
  Seconds end_s = 0;
  bool operator==(const Placement&) const = default;
};

struct Schedule {
  std::vector<Placement> placements;
  Seconds makespan_s = 0;
  DeciWh total_energy_dwh = 0;
  bool operator==(const Schedule&) const = default;
};

enum class PerturbationKind { repairable, non_repairable };
enum class ResourceClass { renewable, consumable };

// A disturbance event: which resource, when, for how long, and its nature.
struct Perturbation {
  std::string resource;
  Seconds occurrence_s = 0;
  Seconds duration_s = 1;
  PerturbationKind kind = PerturbationKind::repairable;
  ResourceClass resource_class = ResourceClass::renewable;
};

// Instance file format (UTF-8 text, '#' starts a comment):
//   line 1: "m n Vmax"
//   then one line per operation, "machine d1 e1 d2 e2 ... dVmax eVmax"
//   (durations in seconds, energies in 0.1 Wh units, machine 0-based).
// Jobs are separated by blank lines; without separators the line count must
// be exactly n*m and jobs are read as consecutive groups of m lines.
Instance load_instance(const std::string& text);
std::string format_instance(const Instance& instance);

// Deterministic seeded generator. Base durations fall in [1, 99] s and base
// energies in [1.0, 50.0] Wh; higher speed levels shorten an operation and
// cost more energy, strictly in both directions.
Instance generate_instance(int num_machines, int num_jobs, int max_speed,
                           std::uint64_t seed);

// Throws Error naming the violated invariant (machine overlap, routing
// order, duration mismatch, unknown operation, duplicate placement).
void check_feasible(const Schedule& schedule, const Instance& instance);

// Recomputes (makespan, total energy) from the placements after checking
// feasibility; also verifies the schedule's cached fields agree.
std::pair<Seconds, DeciWh> evaluate(const Schedule& schedule,
                                    const Instance& instance);

// Indices into schedule.placements of every placement still unfinished at
// time_resch_s (end > time_resch_s), in placement order.
std::vector<std::size_t> affected_operations(const Schedule& schedule,
                                             Seconds time_resch_s);

// CSV with header "machine,job,rank,speed,start_s,end_s", rows sorted by
// (machine, start_s).
std::string gantt_export(const Schedule& schedule);

// Fills the cached makespan/energy fields from placements (no feasibility
// check; use check_feasible/evaluate for that).
Schedule finalize_schedule(std::vector<Placement> placements,
                           const Instance& instance);

}  // namespace easysched

#pragma once

#include <cstdint>
#include <vector>

#include "easysched/jobshop.hpp"
#include "easysched/types.hpp"

namespace easysched {

struct PsoParams {
  int swarm_size = 30;
  int iterations = 200;
  double inertia = 0.72;     // w
  double cognitive = 1.49;   // c1
  double social = 1.49;      // c2
  int neighborhood_size = 4;
  std::uint64_t seed = 1;
};

// Normalization denominators making the weighted objective fall in [0, 1]
// for every feasible schedule.
struct NormBounds {
  Seconds max_makespan_s = 0;
  DeciWh max_energy_dwh = 0;
};

NormBounds normalization_bounds(const Instance& instance);

// F = gamma * makespan/max_makespan + (1 - gamma) * energy/max_energy.
double objective(double makespan_s, double energy_wh, double gamma,
                 double max_makespan_s, double max_energy_wh);
double objective(Seconds makespan_s, DeciWh energy_dwh, double gamma,
                 const NormBounds& bounds);

// Random-key encoding: one key per operation gives a global priority order
// (ascending keys, ties by (job, rank)); one continuous companion per
// operation rounds to the speed gene in [1, max_speed].
struct Particle {
  std::vector<double> sequence_keys;
  std::vector<double> speed_pos;
  std::vector<double> key_velocity;
  std::vector<double> speed_velocity;
  std::vector<int> neighbors;  // swarm indices, ring topology

  std::vector<double> best_keys;
  std::vector<double> best_speed_pos;
  double best_f = 0.0;
  bool best_valid = false;

  std::vector<int> speed_genes(int max_speed) const;
};

// List-scheduling decode: repeatedly place the routing-ready operation with
// the smallest key, semi-actively. Always yields a feasible schedule.
Schedule decode(const Particle& particle, const Instance& instance);

struct PsoResult {
  Schedule schedule;
  double f = 0.0;
};

// Seed-deterministic swarm search minimizing the weighted objective.
PsoResult pso_run(const Instance& instance, double gamma,
                  const PsoParams& params);

}  // namespace easysched

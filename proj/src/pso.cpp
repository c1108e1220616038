#include "easysched/pso.hpp"

#include <algorithm>
#include <cmath>

#include "easysched/rng.hpp"

namespace easysched {

NormBounds normalization_bounds(const Instance& instance) {
  NormBounds bounds;
  for (const auto& job : instance.jobs) {
    for (const Operation& op : job) {
      bounds.max_makespan_s += op.profile.front().duration_s;  // slowest speed
      DeciWh worst = 0;
      for (const SpeedProfile& p : op.profile)
        worst = std::max(worst, p.energy_dwh);
      bounds.max_energy_dwh += worst;
    }
  }
  return bounds;
}

double objective(double makespan_s, double energy_wh, double gamma,
                 double max_makespan_s, double max_energy_wh) {
  return gamma * (makespan_s / max_makespan_s) +
         (1.0 - gamma) * (energy_wh / max_energy_wh);
}

double objective(Seconds makespan_s, DeciWh energy_dwh, double gamma,
                 const NormBounds& bounds) {
  return objective(static_cast<double>(makespan_s), to_wh(energy_dwh), gamma,
                   static_cast<double>(bounds.max_makespan_s),
                   to_wh(bounds.max_energy_dwh));
}

std::vector<int> Particle::speed_genes(int max_speed) const {
  std::vector<int> genes(speed_pos.size());
  for (std::size_t i = 0; i < speed_pos.size(); ++i) {
    const int g = static_cast<int>(std::lround(speed_pos[i]));
    genes[i] = std::clamp(g, 1, max_speed);
  }
  return genes;
}

namespace {

std::vector<int> job_offsets(const Instance& instance) {
  std::vector<int> offsets(instance.num_jobs + 1, 0);
  for (int j = 0; j < instance.num_jobs; ++j)
    offsets[j + 1] = offsets[j] + static_cast<int>(instance.jobs[j].size());
  return offsets;
}

}  // namespace

Schedule decode(const Particle& particle, const Instance& instance) {
  const std::vector<int> offsets = job_offsets(instance);
  const int total = offsets.back();
  if (static_cast<int>(particle.sequence_keys.size()) != total ||
      static_cast<int>(particle.speed_pos.size()) != total)
    throw Error("particle dimension does not match instance operation count");

  const std::vector<int> genes = particle.speed_genes(instance.max_speed);

  std::vector<int> next_rank(instance.num_jobs, 0);
  std::vector<Seconds> machine_free(instance.num_machines, 0);
  std::vector<Seconds> job_free(instance.num_jobs, 0);
  std::vector<Placement> placements;
  placements.reserve(total);

  for (int step = 0; step < total; ++step) {
    // Among routing-ready operations, take the smallest key; ties go to the
    // lower (job, rank).
    int pick = -1;
    for (int j = 0; j < instance.num_jobs; ++j) {
      if (next_rank[j] >= static_cast<int>(instance.jobs[j].size())) continue;
      if (pick == -1) {
        pick = j;
        continue;
      }
      const double key = particle.sequence_keys[offsets[j] + next_rank[j]];
      const double best = particle.sequence_keys[offsets[pick] + next_rank[pick]];
      if (key < best) pick = j;
    }

    const Operation& op = instance.op(pick, next_rank[pick]);
    const int idx = offsets[pick] + next_rank[pick];
    Placement p;
    p.job = op.job;
    p.rank = op.rank;
    p.machine = op.machine;
    p.speed = genes[idx];
    p.start_s = std::max(machine_free[op.machine], job_free[op.job]);
    p.end_s = p.start_s + op.profile[p.speed - 1].duration_s;
    machine_free[op.machine] = p.end_s;
    job_free[op.job] = p.end_s;
    placements.push_back(p);
    ++next_rank[pick];
  }

  return finalize_schedule(std::move(placements), instance);
}

namespace {

struct Swarm {
  std::vector<Particle> particles;
};

Swarm init_swarm(const Instance& instance, const PsoParams& params, Rng& rng) {
  const int total = instance.total_operations();
  Swarm swarm;
  swarm.particles.resize(params.swarm_size);
  for (int i = 0; i < params.swarm_size; ++i) {
    Particle& p = swarm.particles[i];
    p.sequence_keys.resize(total);
    p.speed_pos.resize(total);
    p.key_velocity.assign(total, 0.0);
    p.speed_velocity.assign(total, 0.0);
    for (int d = 0; d < total; ++d) p.sequence_keys[d] = rng.uniform_real();
    for (int d = 0; d < total; ++d)
      p.speed_pos[d] = rng.uniform_real(1.0, double(instance.max_speed));
    // Ring neighborhood: the nearest neighborhood_size particles.
    const int half = params.neighborhood_size / 2;
    for (int o = 1; o <= half; ++o) {
      p.neighbors.push_back((i + o) % params.swarm_size);
      p.neighbors.push_back((i - o + params.swarm_size) % params.swarm_size);
    }
    if (params.neighborhood_size % 2 == 1)
      p.neighbors.push_back((i + half + 1) % params.swarm_size);
  }
  return swarm;
}

}  // namespace

PsoResult pso_run(const Instance& instance, double gamma,
                  const PsoParams& params) {
  if (params.swarm_size < 1) throw Error("pso: swarm_size must be >= 1");
  if (params.iterations < 1) throw Error("pso: iterations must be >= 1");
  if (params.neighborhood_size < 0 ||
      params.neighborhood_size >= params.swarm_size)
    throw Error("pso: neighborhood_size must be < swarm_size");
  if (gamma < 0.0 || gamma > 1.0) throw Error("pso: gamma must be in [0, 1]");
  instance.validate();

  const NormBounds bounds = normalization_bounds(instance);
  Rng rng(params.seed);
  Swarm swarm = init_swarm(instance, params, rng);

  const double key_vmax = 0.2;
  const double speed_vmax = 0.2 * std::max(1, instance.max_speed - 1);

  PsoResult best;
  bool best_valid = false;

  for (int iter = 0; iter < params.iterations; ++iter) {
    for (Particle& p : swarm.particles) {
      const Schedule schedule = decode(p, instance);
      const double f =
          objective(schedule.makespan_s, schedule.total_energy_dwh, gamma,
                    bounds);
      if (!p.best_valid || f < p.best_f) {
        p.best_f = f;
        p.best_keys = p.sequence_keys;
        p.best_speed_pos = p.speed_pos;
        p.best_valid = true;
      }
      if (!best_valid || f < best.f) {
        best.f = f;
        best.schedule = schedule;
        best_valid = true;
      }
    }

    if (iter + 1 == params.iterations) break;

    for (std::size_t i = 0; i < swarm.particles.size(); ++i) {
      Particle& p = swarm.particles[i];
      // Neighborhood best includes the particle itself.
      const Particle* nbest = &p;
      for (int nb : p.neighbors) {
        const Particle& q = swarm.particles[nb];
        if (q.best_f < nbest->best_f) nbest = &q;
      }
      const int total = static_cast<int>(p.sequence_keys.size());
      for (int d = 0; d < total; ++d) {
        const double r1 = rng.uniform_real();
        const double r2 = rng.uniform_real();
        double v = params.inertia * p.key_velocity[d] +
                   params.cognitive * r1 * (p.best_keys[d] - p.sequence_keys[d]) +
                   params.social * r2 * (nbest->best_keys[d] - p.sequence_keys[d]);
        v = std::clamp(v, -key_vmax, key_vmax);
        p.key_velocity[d] = v;
        p.sequence_keys[d] = std::clamp(p.sequence_keys[d] + v, 0.0, 1.0);
      }
      for (int d = 0; d < total; ++d) {
        const double r1 = rng.uniform_real();
        const double r2 = rng.uniform_real();
        double v = params.inertia * p.speed_velocity[d] +
                   params.cognitive * r1 * (p.best_speed_pos[d] - p.speed_pos[d]) +
                   params.social * r2 * (nbest->best_speed_pos[d] - p.speed_pos[d]);
        v = std::clamp(v, -speed_vmax, speed_vmax);
        p.speed_velocity[d] = v;
        p.speed_pos[d] =
            std::clamp(p.speed_pos[d] + v, 1.0, double(instance.max_speed));
      }
    }
  }

  return best;
}

}  // namespace easysched

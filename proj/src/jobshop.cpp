#include "easysched/jobshop.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "easysched/rng.hpp"

namespace easysched {

int Instance::total_operations() const {
  int n = 0;
  for (const auto& job : jobs) n += static_cast<int>(job.size());
  return n;
}

void Instance::validate() const {
  if (num_machines < 1 || num_jobs < 1 || max_speed < 1)
    throw Error("instance header counts must all be >= 1");
  if (static_cast<int>(jobs.size()) != num_jobs)
    throw Error("instance has " + std::to_string(jobs.size()) +
                " jobs, header claims " + std::to_string(num_jobs));
  for (int j = 0; j < num_jobs; ++j) {
    if (jobs[j].empty())
      throw Error("job " + std::to_string(j) + " has no operations");
    for (int r = 0; r < static_cast<int>(jobs[j].size()); ++r) {
      const Operation& op = jobs[j][r];
      const std::string where =
          "operation (job " + std::to_string(j) + ", rank " +
          std::to_string(r) + ")";
      if (op.job != j || op.rank != r)
        throw Error(where + ": stored indices disagree with position");
      if (op.machine < 0 || op.machine >= num_machines)
        throw Error(where + ": machine index out of range");
      if (static_cast<int>(op.profile.size()) != max_speed)
        throw Error(where + ": speed table has " +
                    std::to_string(op.profile.size()) + " entries, expected " +
                    std::to_string(max_speed));
      for (const SpeedProfile& p : op.profile) {
        if (p.duration_s <= 0) throw Error(where + ": non-positive duration");
        if (p.energy_dwh <= 0) throw Error(where + ": non-positive energy");
      }
    }
  }
}

namespace {

struct Line {
  int number;  // 1-based position in the original text
  std::string body;
};

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw Error("parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace

Instance load_instance(const std::string& text) {
  // Tokenize into content lines, preserving blank lines (job separators)
  // but dropping lines that are comments only.
  std::vector<Line> lines;
  {
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      const auto hash = raw.find('#');
      std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
      const bool comment_only =
          hash != std::string::npos &&
          body.find_first_not_of(" \t\r") == std::string::npos;
      if (comment_only) continue;
      lines.push_back({number, body});
    }
  }

  auto is_blank = [](const Line& l) {
    return l.body.find_first_not_of(" \t\r") == std::string::npos;
  };

  // Header is the first non-blank line.
  std::size_t pos = 0;
  while (pos < lines.size() && is_blank(lines[pos])) ++pos;
  if (pos == lines.size()) throw Error("parse error: empty instance file");

  Instance instance;
  {
    std::istringstream head(lines[pos].body);
    if (!(head >> instance.num_machines >> instance.num_jobs >>
          instance.max_speed))
      parse_fail(lines[pos].number, "expected header \"m n Vmax\"");
    std::string extra;
    if (head >> extra)
      parse_fail(lines[pos].number, "trailing token \"" + extra + "\"");
  }
  if (instance.num_machines < 1 || instance.num_jobs < 1 ||
      instance.max_speed < 1)
    parse_fail(lines[pos].number, "header counts must all be >= 1");
  ++pos;

  // Group the remaining operation lines into jobs: blank-line separated
  // blocks, or fixed groups of num_machines lines when no separator occurs.
  std::vector<std::vector<Line>> groups;
  bool saw_separator = false;
  {
    std::vector<Line> current;
    for (; pos < lines.size(); ++pos) {
      if (is_blank(lines[pos])) {
        if (!current.empty()) {
          groups.push_back(std::move(current));
          current.clear();
          saw_separator = true;
        }
        continue;
      }
      current.push_back(lines[pos]);
    }
    if (!current.empty()) groups.push_back(std::move(current));
  }
  if (!saw_separator && groups.size() == 1) {
    const std::vector<Line> all = std::move(groups.front());
    const std::size_t per_job = static_cast<std::size_t>(instance.num_machines);
    if (all.size() != per_job * instance.num_jobs)
      parse_fail(all.empty() ? 0 : all.back().number,
                 "expected " + std::to_string(per_job * instance.num_jobs) +
                     " operation lines (n*m) or blank-line separated jobs, "
                     "got " +
                     std::to_string(all.size()));
    groups.clear();
    for (int j = 0; j < instance.num_jobs; ++j)
      groups.emplace_back(all.begin() + j * per_job,
                          all.begin() + (j + 1) * per_job);
  }
  if (static_cast<int>(groups.size()) != instance.num_jobs)
    throw Error("parse error: found " + std::to_string(groups.size()) +
                " jobs, header claims " + std::to_string(instance.num_jobs));

  for (int j = 0; j < instance.num_jobs; ++j) {
    std::vector<Operation> ops;
    for (int r = 0; r < static_cast<int>(groups[j].size()); ++r) {
      const Line& line = groups[j][r];
      std::istringstream in(line.body);
      Operation op;
      op.job = j;
      op.rank = r;
      if (!(in >> op.machine))
        parse_fail(line.number, "expected machine index");
      for (int v = 0; v < instance.max_speed; ++v) {
        SpeedProfile p;
        if (!(in >> p.duration_s >> p.energy_dwh))
          parse_fail(line.number, "expected " +
                                      std::to_string(instance.max_speed) +
                                      " duration/energy pairs");
        op.profile.push_back(p);
      }
      std::string extra;
      if (in >> extra)
        parse_fail(line.number, "trailing token \"" + extra + "\"");
      ops.push_back(std::move(op));
    }
    instance.jobs.push_back(std::move(ops));
  }

  instance.validate();
  return instance;
}

std::string format_instance(const Instance& instance) {
  std::ostringstream out;
  out << instance.num_machines << ' ' << instance.num_jobs << ' '
      << instance.max_speed << '\n';
  for (const auto& job : instance.jobs) {
    out << '\n';
    for (const Operation& op : job) {
      out << op.machine;
      for (const SpeedProfile& p : op.profile)
        out << ' ' << p.duration_s << ' ' << p.energy_dwh;
      out << '\n';
    }
  }
  return out.str();
}

Instance generate_instance(int num_machines, int num_jobs, int max_speed,
                           std::uint64_t seed) {
  if (num_machines < 1 || num_jobs < 1 || max_speed < 1)
    throw Error("generate_instance: counts must all be >= 1");

  Rng rng(seed);
  Instance instance;
  instance.num_machines = num_machines;
  instance.num_jobs = num_jobs;
  instance.max_speed = max_speed;

  for (int j = 0; j < num_jobs; ++j) {
    // Classic routing: each job visits every machine once, random order.
    std::vector<int> route(num_machines);
    for (int m = 0; m < num_machines; ++m) route[m] = m;
    for (int m = num_machines - 1; m > 0; --m) {
      const int k = static_cast<int>(rng.uniform_int(0, m));
      std::swap(route[m], route[k]);
    }

    std::vector<Operation> ops;
    for (int r = 0; r < num_machines; ++r) {
      Operation op;
      op.job = j;
      op.rank = r;
      op.machine = route[r];

      const Seconds d1 = rng.uniform_int(1, 99);
      const DeciWh e1 = rng.uniform_int(10, 500);

      // duration(v) = ceil(d1/v), energy(v) = e1*sqrt(v); where the integer
      // laws plateau the values are lifted minimally so both stay strictly
      // monotone in v.
      std::vector<Seconds> dur(max_speed);
      std::vector<DeciWh> energy(max_speed);
      for (int v = 1; v <= max_speed; ++v) {
        dur[v - 1] = (d1 + v - 1) / v;
        energy[v - 1] = static_cast<DeciWh>(
            std::llround(static_cast<double>(e1) * std::sqrt(double(v))));
      }
      for (int v = max_speed - 2; v >= 0; --v)
        dur[v] = std::max(dur[v], dur[v + 1] + 1);
      for (int v = 1; v < max_speed; ++v)
        energy[v] = std::max(energy[v], energy[v - 1] + 1);

      for (int v = 0; v < max_speed; ++v)
        op.profile.push_back({dur[v], energy[v]});
      ops.push_back(std::move(op));
    }
    instance.jobs.push_back(std::move(ops));
  }

  instance.validate();
  return instance;
}

void check_feasible(const Schedule& schedule, const Instance& instance) {
  std::set<std::pair<int, int>> seen;
  for (const Placement& p : schedule.placements) {
    if (p.job < 0 || p.job >= instance.num_jobs ||
        p.rank >= static_cast<int>(instance.jobs[p.job].size()) || p.rank < 0)
      throw Error("schedule references unknown operation (job " +
                  std::to_string(p.job) + ", rank " + std::to_string(p.rank) +
                  ")");
    const Operation& op = instance.op(p.job, p.rank);
    const std::string where = "placement (job " + std::to_string(p.job) +
                              ", rank " + std::to_string(p.rank) + ")";
    if (!seen.insert({p.job, p.rank}).second)
      throw Error(where + ": scheduled twice");
    if (p.machine != op.machine)
      throw Error(where + ": wrong machine");
    if (p.speed < 1 || p.speed > instance.max_speed)
      throw Error(where + ": speed level out of range");
    if (p.end_s != p.start_s + op.profile[p.speed - 1].duration_s)
      throw Error(where + ": end time does not match duration at speed " +
                  std::to_string(p.speed));
    if (p.start_s < 0) throw Error(where + ": negative start time");
  }

  // No overlap on any machine.
  std::map<int, std::vector<const Placement*>> by_machine;
  for (const Placement& p : schedule.placements)
    by_machine[p.machine].push_back(&p);
  for (auto& [machine, ps] : by_machine) {
    std::sort(ps.begin(), ps.end(), [](const Placement* a, const Placement* b) {
      return a->start_s < b->start_s;
    });
    for (std::size_t i = 1; i < ps.size(); ++i) {
      if (ps[i]->start_s < ps[i - 1]->end_s)
        throw Error("machine " + std::to_string(machine) +
                    ": placements overlap (job " +
                    std::to_string(ps[i - 1]->job) + " and job " +
                    std::to_string(ps[i]->job) + ")");
    }
  }

  // Routing order within each job.
  std::map<std::pair<int, int>, const Placement*> by_op;
  for (const Placement& p : schedule.placements) by_op[{p.job, p.rank}] = &p;
  for (const auto& [key, p] : by_op) {
    if (key.second == 0) continue;
    auto prev = by_op.find({key.first, key.second - 1});
    if (prev == by_op.end())
      throw Error("job " + std::to_string(key.first) + ": rank " +
                  std::to_string(key.second) + " scheduled without rank " +
                  std::to_string(key.second - 1));
    if (p->start_s < prev->second->end_s)
      throw Error("job " + std::to_string(key.first) +
                  ": rank " + std::to_string(key.second) +
                  " starts before rank " + std::to_string(key.second - 1) +
                  " ends");
  }
}

std::pair<Seconds, DeciWh> evaluate(const Schedule& schedule,
                                    const Instance& instance) {
  check_feasible(schedule, instance);
  Seconds makespan = 0;
  DeciWh energy = 0;
  for (const Placement& p : schedule.placements) {
    makespan = std::max(makespan, p.end_s);
    energy += instance.op(p.job, p.rank).profile[p.speed - 1].energy_dwh;
  }
  if (makespan != schedule.makespan_s)
    throw Error("cached makespan " + std::to_string(schedule.makespan_s) +
                " disagrees with recomputed " + std::to_string(makespan));
  if (energy != schedule.total_energy_dwh)
    throw Error("cached energy " + std::to_string(schedule.total_energy_dwh) +
                " disagrees with recomputed " + std::to_string(energy));
  return {makespan, energy};
}

std::vector<std::size_t> affected_operations(const Schedule& schedule,
                                             Seconds time_resch_s) {
  std::vector<std::size_t> affected;
  for (std::size_t i = 0; i < schedule.placements.size(); ++i)
    if (schedule.placements[i].end_s > time_resch_s) affected.push_back(i);
  return affected;
}

std::string gantt_export(const Schedule& schedule) {
  std::vector<Placement> rows = schedule.placements;
  std::sort(rows.begin(), rows.end(), [](const Placement& a, const Placement& b) {
    if (a.machine != b.machine) return a.machine < b.machine;
    if (a.start_s != b.start_s) return a.start_s < b.start_s;
    return std::pair{a.job, a.rank} < std::pair{b.job, b.rank};
  });
  std::ostringstream out;
  out << "machine,job,rank,speed,start_s,end_s\n";
  for (const Placement& p : rows)
    out << p.machine << ',' << p.job << ',' << p.rank << ',' << p.speed << ','
        << p.start_s << ',' << p.end_s << '\n';
  return out.str();
}

Schedule finalize_schedule(std::vector<Placement> placements,
                           const Instance& instance) {
  Schedule schedule;
  schedule.placements = std::move(placements);
  for (const Placement& p : schedule.placements) {
    schedule.makespan_s = std::max(schedule.makespan_s, p.end_s);
    schedule.total_energy_dwh +=
        instance.op(p.job, p.rank).profile[p.speed - 1].energy_dwh;
  }
  return schedule;
}

}  // namespace easysched

#include "easysched/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace easysched {

double air_density(double temperature_c, double humidity_pct,
                   double pressure_pa, bool humidity_as_fraction) {
  const double phi =
      humidity_as_fraction ? humidity_pct / 100.0 : humidity_pct;
  const double saturation =
      230.617 * phi * std::exp(17.5043 * temperature_c / (241.2 + temperature_c));
  const double density =
      (pressure_pa - saturation) / (287.06 * (temperature_c + 273.15));
  if (!(density > 0.0))
    throw Error("air_density: humidity term exceeds pressure (T=" +
                std::to_string(temperature_c) + ", phi=" +
                std::to_string(humidity_pct) + ")");
  return density;
}

double wind_power(double density, const WindSourceConfig& config) {
  return 0.5 * density * config.rotor_area_m2 * config.wind_speed_ms *
         config.wind_speed_ms * config.wind_speed_ms;
}

EnergyAlarm detect(const SensorSample& sample, const WindSourceConfig& config) {
  const double rho0 =
      air_density(config.baseline.temperature_c, config.baseline.humidity_pct,
                  config.pressure_pa, config.humidity_as_fraction);
  const double rho_t =
      air_density(sample.temperature_c, sample.humidity_pct, config.pressure_pa,
                  config.humidity_as_fraction);
  EnergyAlarm alarm;
  alarm.ratio = rho_t / rho0;  // S and V cancel
  alarm.alarmed = alarm.ratio < 1.0 - config.deadband;
  alarm.taux_energy_pct = alarm.alarmed ? (1.0 - alarm.ratio) * 100.0 : 0.0;
  return alarm;
}

EnergyAlarm pv_source_poll(double taux_energy_pct) {
  EnergyAlarm alarm;
  alarm.alarmed = taux_energy_pct > 0.0;
  alarm.ratio = 1.0 - taux_energy_pct / 100.0;
  alarm.taux_energy_pct = alarm.alarmed ? taux_energy_pct : 0.0;
  return alarm;
}

std::pair<AlarmFilter, FilterAction> filter_alarm(AlarmFilter state,
                                                  const EnergyAlarm& alarm,
                                                  Seconds /*now_s*/) {
  FilterAction action;
  state.time_resch_s += state.p2_s;
  if (alarm.alarmed) {
    action.order = true;
    action.time_resch_s = state.time_resch_s;
    action.taux_energy_pct = alarm.taux_energy_pct;
    state.p2_s = std::min(state.p2_s * AlarmFilter::kGrowthFactor,
                          state.p2_initial_s * AlarmFilter::kCapFactor);
  } else {
    state.p2_s = state.p2_initial_s;
  }
  return {state, action};
}

SensorTrace::SensorTrace(std::vector<SensorSample> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) throw Error("sensor trace is empty");
  for (std::size_t i = 1; i < samples_.size(); ++i)
    if (samples_[i].t_s < samples_[i - 1].t_s)
      throw Error("sensor trace timestamps must be non-decreasing");
  for (const SensorSample& s : samples_) {
    if (s.humidity_pct < 0.0 || s.humidity_pct > 100.0)
      throw Error("sensor humidity out of [0, 100] at t=" +
                  std::to_string(s.t_s));
    if (s.temperature_c < -40.0 || s.temperature_c > 60.0)
      throw Error("sensor temperature out of [-40, 60] at t=" +
                  std::to_string(s.t_s));
  }
}

SensorTrace SensorTrace::parse_csv(const std::string& text) {
  std::vector<SensorSample> samples;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (number == 1 && line.find("t_s") != std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    SensorSample s;
    if (!(row >> s.t_s >> s.temperature_c >> s.humidity_pct))
      throw Error("sensor trace parse error at line " + std::to_string(number));
    samples.push_back(s);
  }
  return SensorTrace(std::move(samples));
}

std::string SensorTrace::to_csv() const {
  std::ostringstream out;
  out << "t_s,temperature_c,humidity_pct\n";
  for (const SensorSample& s : samples_)
    out << s.t_s << ',' << s.temperature_c << ',' << s.humidity_pct << '\n';
  return out.str();
}

const SensorSample& SensorTrace::sample_at(Seconds t) const {
  const SensorSample* last = &samples_.front();
  for (const SensorSample& s : samples_) {
    if (s.t_s > t) break;
    last = &s;
  }
  return *last;
}

TraceReplay::TraceReplay(const SensorTrace& trace, Seconds p1_s,
                         Seconds horizon_s)
    : trace_(trace), p1_s_(p1_s), horizon_s_(horizon_s) {
  if (p1_s_ <= 0) throw Error("replay: acquisition period must be positive");
}

std::pair<Seconds, SensorSample> TraceReplay::next() {
  if (done()) throw Error("replay exhausted");
  const Seconds t = now_s_;
  now_s_ += p1_s_;
  return {t, trace_.sample_at(t)};
}

}  // namespace easysched

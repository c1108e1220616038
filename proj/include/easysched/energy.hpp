#pragma once

#include <string>
#include <utility>
#include <vector>

#include "easysched/types.hpp"

namespace easysched {

struct SensorSample {
  Seconds t_s = 0;
  double temperature_c = 0.0;   // T
  double humidity_pct = 0.0;    // relative humidity, 0..100
  bool operator==(const SensorSample&) const = default;
};

// Wind turbine source. Rotor area and wind speed are constant per source,
// so power ratios against the baseline reduce to air-density ratios.
struct WindSourceConfig {
  double rotor_area_m2 = 1.0;       // S
  double wind_speed_ms = 1.0;       // V
  double pressure_pa = 101325.0;    // p
  SensorSample baseline;            // defines P(0)
  bool humidity_as_fraction = false;
  double deadband = 0.0;  // suppress ratios in [1 - deadband, 1)
};

struct EnergyAlarm {
  bool alarmed = false;
  double ratio = 1.0;            // P(t) / P(0)
  double taux_energy_pct = 0.0;  // (1 - ratio) * 100 when alarmed
};

// rho = (p - 230.617*phi*exp(17.5043*T / (241.2+T))) / (287.06*(T+273.15)).
// phi enters in percent by default; the fraction convention divides it by
// 100 first (see WindSourceConfig.humidity_as_fraction).
double air_density(double temperature_c, double humidity_pct,
                   double pressure_pa, bool humidity_as_fraction = false);

// P = 1/2 * rho * S * V^3.
double wind_power(double density, const WindSourceConfig& config);

// Compares the sample's density against the baseline's; alarms when the
// ratio drops below 1 (minus the configured deadband).
EnergyAlarm detect(const SensorSample& sample, const WindSourceConfig& config);

// Fixed-rate photovoltaic source: permanently alarmed at the configured
// reduction percentage (0 disables it).
EnergyAlarm pv_source_poll(double taux_energy_pct);

// False-alarm filter state. The verification period triples after each
// alarmed window (capped), and snaps back to its initial value after one
// fully quiet window. time_resch_s tracks the window boundary, so orders
// carry the boundary at which the alarm was confirmed.
struct AlarmFilter {
  Seconds p2_initial_s = 6;
  Seconds p2_s = 6;
  Seconds time_resch_s = 0;
  static constexpr Seconds kGrowthFactor = 3;
  static constexpr Seconds kCapFactor = 100;
};

struct FilterAction {
  bool order = false;  // false: "no energy perturbation" heartbeat
  Seconds time_resch_s = 0;
  double taux_energy_pct = 0.0;
};

// One verification-window step. Pure: returns the successor state and the
// action to emit.
std::pair<AlarmFilter, FilterAction> filter_alarm(AlarmFilter state,
                                                  const EnergyAlarm& alarm,
                                                  Seconds now_s);

// Piecewise-constant sensor trace, indexable by simulated time.
class SensorTrace {
 public:
  explicit SensorTrace(std::vector<SensorSample> samples);

  // CSV: header "t_s,temperature_c,humidity_pct" then one row per sample.
  static SensorTrace parse_csv(const std::string& text);
  std::string to_csv() const;

  // Last sample with t_s <= t (the first sample before trace start).
  const SensorSample& sample_at(Seconds t) const;
  const std::vector<SensorSample>& samples() const { return samples_; }

 private:
  std::vector<SensorSample> samples_;
};

// Acquisition-paced view of a trace: yields the sample seen at t = 0, p1,
// 2*p1, ... up to the horizon.
class TraceReplay {
 public:
  TraceReplay(const SensorTrace& trace, Seconds p1_s, Seconds horizon_s);

  bool done() const { return now_s_ > horizon_s_; }
  std::pair<Seconds, SensorSample> next();

 private:
  const SensorTrace& trace_;
  Seconds p1_s_;
  Seconds horizon_s_;
  Seconds now_s_ = 0;
};

}  // namespace easysched

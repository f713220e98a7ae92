#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlch/optimizer.hpp"
#include "nlch/state.hpp"

namespace nlch {

struct TimeseriesRow {
  int step = 0;
  double time = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double separation = 0.0;
  double cost = 0.0;
  double stationarity = 0.0;
};

struct Timeseries {
  bool with_cost = false;
  std::vector<TimeseriesRow> rows;
};

/// One row per time slice.
Timeseries diagnostics_series(const StateTrajectory& traj, double dt);

/// Row for optimizer iteration k: final-time diagnostics of the iterate's state plus cost and stationarity.
TimeseriesRow optimization_row(int k, const StateTrajectory& traj, double dt, double cost, double stationarity);

/// Header "step,time,mass,energy,separation[,cost,stationarity]", values at 17 significant digits.
std::string format_timeseries(const Timeseries& series);
void emit_timeseries(const Timeseries& series, const std::filesystem::path& path);
Timeseries parse_timeseries(const std::string& csv);

}  // namespace nlch

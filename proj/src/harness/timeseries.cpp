#include "nlch/harness/timeseries.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlch/error.hpp"

namespace nlch {

namespace {

constexpr const char* kHeader = "step,time,mass,energy,separation";
constexpr const char* kCostHeader = ",cost,stationarity";

void append(std::string& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, ",%.17g", value);
  out += buf;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw IoError("malformed CSV value '" + s + "'");
  return v;
}

}  // namespace

Timeseries diagnostics_series(const StateTrajectory& traj, double dt) {
  Timeseries ts;
  for (int n = 0; n <= traj.n_steps(); ++n) {
    const auto i = static_cast<std::size_t>(n);
    ts.rows.push_back({n, n * dt, traj.mass[i], traj.energy[i], traj.separation[i], 0.0, 0.0});
  }
  return ts;
}

TimeseriesRow optimization_row(int k, const StateTrajectory& traj, double dt, double cost, double stationarity) {
  const auto N = static_cast<std::size_t>(traj.n_steps());
  return {k, traj.n_steps() * dt, traj.mass[N], traj.energy[N], traj.separation[N], cost, stationarity};
}

std::string format_timeseries(const Timeseries& series) {
  std::string out = kHeader;
  if (series.with_cost) out += kCostHeader;
  out += "\r\n";
  for (const auto& r : series.rows) {
    out += std::to_string(r.step);
    append(out, r.time);
    append(out, r.mass);
    append(out, r.energy);
    append(out, r.separation);
    if (series.with_cost) {
      append(out, r.cost);
      append(out, r.stationarity);
    }
    out += "\r\n";
  }
  return out;
}

void emit_timeseries(const Timeseries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << format_timeseries(series);
  if (!out) throw IoError("write failed: " + path.string());
}

Timeseries parse_timeseries(const std::string& csv) {
  std::stringstream in(csv);
  std::string line;
  auto strip = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };
  if (!std::getline(in, line)) throw IoError("empty CSV");
  strip(line);
  Timeseries ts;
  if (line == std::string(kHeader) + kCostHeader) ts.with_cost = true;
  else if (line != kHeader) throw IoError("unexpected CSV header '" + line + "'");
  const std::size_t columns = ts.with_cost ? 7 : 5;
  while (std::getline(in, line)) {
    strip(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) throw IoError("CSV row has " + std::to_string(cells.size()) + " columns");
    TimeseriesRow r;
    r.step = std::stoi(cells[0]);
    r.time = parse_double(cells[1]);
    r.mass = parse_double(cells[2]);
    r.energy = parse_double(cells[3]);
    r.separation = parse_double(cells[4]);
    if (ts.with_cost) {
      r.cost = parse_double(cells[5]);
      r.stationarity = parse_double(cells[6]);
    }
    ts.rows.push_back(r);
  }
  return ts;
}

}  // namespace nlch

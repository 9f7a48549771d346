#include "fourierctl/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "fourierctl/capsule_plant.hpp"

namespace fourierctl {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string mode_name(int mode) { return std::string(to_string(static_cast<ContactMode>(mode))); }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      table.header = split_line(line);
      first = false;
    } else {
      table.rows.push_back(split_line(line));
    }
  }
  return table;
}

void write_trajectory_csv(std::ostream& out, const Trajectory<4>& trajectory) {
  out << "tau,theta,theta_dot,z,z_dot,mode,u\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const auto& y = trajectory.states[i];
    out << format_number(trajectory.times[i]) << ',' << format_number(y[0]) << ','
        << format_number(y[1]) << ',' << format_number(y[2]) << ',' << format_number(y[3]) << ','
        << mode_name(trajectory.modes[i]) << ',' << format_number(trajectory.controls[i]) << '\n';
  }
}

void write_events_csv(std::ostream& out, const Trajectory<4>& trajectory) {
  out << "tau,from_mode,to_mode\n";
  for (const EventRecord& e : trajectory.events) {
    out << format_number(e.time) << ',' << mode_name(e.from_mode) << ',' << mode_name(e.to_mode) << '\n';
  }
}

void write_control_csv(std::ostream& out, const FourierControl& control, double t0, double tf,
                       double stride) {
  out << "tau,u\n";
  const auto count = static_cast<std::size_t>(std::floor((tf - t0) / stride + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = std::min(tf, t0 + stride * static_cast<double>(i));
    out << format_number(t) << ',' << format_number(control.evaluate(t)) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const CampaignRecord& record) {
  out << "approach,K,trials,mean_distance,sd_distance,relative_change_percent,best_distance\n";
  for (const KSummary& s : record.summary) {
    out << to_string(record.mode) << ',' << s.harmonics << ',' << s.trials << ','
        << format_number(s.mean_distance) << ',' << format_number(s.sd_distance) << ','
        << (s.relative_change ? format_number(*s.relative_change) : "") << ','
        << format_number(s.best_distance) << '\n';
  }
}

void write_delta_matrix_csv(std::ostream& out, const CampaignRecord& record) {
  std::vector<int> ks;
  std::map<int, std::map<int, double>> by_trial;
  std::vector<int> trials;
  for (const TrialRecord& r : record.records) {
    if (std::find(ks.begin(), ks.end(), r.harmonics) == ks.end()) ks.push_back(r.harmonics);
    if (std::find(trials.begin(), trials.end(), r.trial) == trials.end()) trials.push_back(r.trial);
    if (r.relative_change) by_trial[r.trial][r.harmonics] = *r.relative_change;
  }
  std::sort(ks.begin(), ks.end());
  std::sort(trials.begin(), trials.end());
  // No column for the first K.
  if (!ks.empty()) ks.erase(ks.begin());

  out << "trial";
  for (const int k : ks) out << ",K" << k;
  out << '\n';
  for (const int trial : trials) {
    out << trial;
    for (const int k : ks) {
      out << ',';
      const auto row = by_trial.find(trial);
      if (row == by_trial.end()) continue;
      const auto cell = row->second.find(k);
      if (cell != row->second.end()) out << format_number(cell->second);
    }
    out << '\n';
  }
}

}  // namespace fourierctl

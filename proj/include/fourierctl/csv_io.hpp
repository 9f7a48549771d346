/**
 * @file csv_io.hpp
 * @brief CSV artifacts: trajectories, events, control samples and campaign tables.
 *
 * Every file starts with a header row. Numbers are written with 17
 * significant digits so that they parse back to the same double.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fourierctl/campaign_runner.hpp"
#include "fourierctl/fourier_control.hpp"
#include "fourierctl/hybrid_integrator.hpp"

namespace fourierctl {

/// Decimal form with 17 significant digits; empty for NaN.
[[nodiscard]] std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Minimal reader for the files written here (no quoting).
[[nodiscard]] CsvTable read_csv(std::istream& in);

/// tau,theta,theta_dot,z,z_dot,mode,u
void write_trajectory_csv(std::ostream& out, const Trajectory<4>& trajectory);
/// tau,from_mode,to_mode
void write_events_csv(std::ostream& out, const Trajectory<4>& trajectory);
/// tau,u sampled every `stride` on [t0, tf], endpoint included.
void write_control_csv(std::ostream& out, const FourierControl& control, double t0, double tf,
                       double stride = 0.01);
/// approach,K,trials,mean_distance,sd_distance,relative_change_percent,best_distance
void write_summary_csv(std::ostream& out, const CampaignRecord& record);
/// trial,K<k>,... with the per-trial relative change of K vs K-1; empty when undefined.
void write_delta_matrix_csv(std::ostream& out, const CampaignRecord& record);

}  // namespace fourierctl

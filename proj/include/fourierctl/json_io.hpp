/**
 * @file json_io.hpp
 * @brief JSON mapping of controls, results and run configuration.
 *
 * Configuration documents have the sections plant, bounds, integrator, de,
 * campaign and control; every section and key is optional and defaults to
 * the reference setup. Unknown keys, wrong types and out-of-range values are
 * reported as violations, never silently ignored.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fourierctl/campaign_runner.hpp"
#include "fourierctl/evolution_optimizer.hpp"
#include "fourierctl/fourier_control.hpp"

namespace fourierctl {

using Json = nlohmann::json;

void to_json(Json& j, const ControlShape& shape);
void from_json(const Json& j, ControlShape& shape);
void to_json(Json& j, const SpanParams& span);
void from_json(const Json& j, SpanParams& span);
void to_json(Json& j, const FourierControl& control);
void from_json(const Json& j, FourierControl& control);
void to_json(Json& j, const CapsuleParams& params);
void to_json(Json& j, const OptimizationResult& result);
void to_json(Json& j, const TrialRecord& record);
void to_json(Json& j, const KSummary& summary);
void to_json(Json& j, const TrialFailure& failure);
void to_json(Json& j, const CampaignRecord& record);
void to_json(Json& j, const CampaignConfig& config);

/// Control given to `simulate` (and as an optional seed to `optimize`).
struct ControlSpec {
  std::optional<FourierControl> coefficients;  ///< explicit a0, a, b, omega
  std::optional<std::vector<double>> decision;  ///< decision vector for `harmonics`
  int harmonics = 0;
};

struct RunSettings {
  CampaignConfig campaign{};
  std::optional<ControlSpec> control;
};

/// Parses a configuration document. All problems are collected into
/// `violations`; the returned settings are meaningful only when it is empty.
[[nodiscard]] RunSettings parse_settings(const Json& document, std::vector<std::string>& violations);

/// Range and consistency checks on parsed settings, as a list of violations.
[[nodiscard]] std::vector<std::string> check_settings(const RunSettings& settings);

/// Turns a control spec into coefficients (ConfigError on an invalid spec).
[[nodiscard]] FourierControl resolve_control(const ControlSpec& spec, const CampaignConfig& config);

}  // namespace fourierctl

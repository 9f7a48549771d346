#include "fourierctl/json_io.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "fourierctl/errors.hpp"

namespace fourierctl {

namespace {

/// Typed access to one object of the configuration document. Consumed keys
/// are tracked so that leftovers can be reported as unknown.
class Section {
 public:
  Section(const Json& document, const std::string& name, std::vector<std::string>& violations)
      : path_(name), violations_(violations) {
    if (!document.contains(name)) return;
    const Json& value = document.at(name);
    if (!value.is_object()) {
      violations_.push_back(name + ": must be an object");
      return;
    }
    object_ = &value;
  }

  [[nodiscard]] bool has(const char* key) const { return object_ && object_->contains(key); }

  void number(const char* key, double& out) {
    const Json* v = take(key);
    if (!v) return;
    if (!v->is_number()) {
      fail(key, "must be a number");
      return;
    }
    out = v->get<double>();
    if (!std::isfinite(out)) fail(key, "must be finite");
  }

  template <class Int>
  void integer(const char* key, Int& out) {
    const Json* v = take(key);
    if (!v) return;
    if (v->is_number_unsigned() || v->is_number_integer()) {
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0) {
          fail(key, "must be non-negative");
          return;
        }
      }
      out = v->get<Int>();
      return;
    }
    fail(key, "must be an integer");
  }

  void boolean(const char* key, bool& out) {
    const Json* v = take(key);
    if (!v) return;
    if (!v->is_boolean()) {
      fail(key, "must be true or false");
      return;
    }
    out = v->get<bool>();
  }

  void string(const char* key, std::string& out) {
    const Json* v = take(key);
    if (!v) return;
    if (!v->is_string()) {
      fail(key, "must be a string");
      return;
    }
    out = v->get<std::string>();
  }

  void numbers(const char* key, std::vector<double>& out) {
    const Json* v = take(key);
    if (!v) return;
    if (!v->is_array()) {
      fail(key, "must be an array of numbers");
      return;
    }
    out.clear();
    for (const Json& e : *v) {
      if (!e.is_number()) {
        fail(key, "must be an array of numbers");
        return;
      }
      out.push_back(e.get<double>());
    }
  }

  void range(const char* key, double& lo, double& hi) {
    std::vector<double> pair{lo, hi};
    const bool present = has(key);
    numbers(key, pair);
    if (!present) return;
    if (pair.size() != 2) {
      fail(key, "must be [min, max]");
      return;
    }
    lo = pair[0];
    hi = pair[1];
  }

  void finish() {
    if (!object_) return;
    for (const auto& item : object_->items()) {
      if (!consumed_.count(item.key())) violations_.push_back(path_ + "." + item.key() + ": unknown key");
    }
  }

 private:
  const Json* take(const char* key) {
    if (!has(key)) return nullptr;
    consumed_.insert(key);
    return &object_->at(key);
  }

  void fail(const char* key, const std::string& what) { violations_.push_back(path_ + "." + key + ": " + what); }

  std::string path_;
  std::vector<std::string>& violations_;
  const Json* object_ = nullptr;
  std::set<std::string> consumed_;
};

template <class F>
void collect(std::vector<std::string>& out, const std::string& prefix, F&& check) {
  try {
    check();
  } catch (const std::exception& e) {
    out.push_back(prefix + ": " + e.what());
  }
}

}  // namespace

void to_json(Json& j, const ControlShape& shape) {
  j = Json{{"angles", shape.angles}, {"omega", shape.omega}, {"harmonics", shape.harmonics}};
}

void from_json(const Json& j, ControlShape& shape) {
  j.at("angles").get_to(shape.angles);
  j.at("omega").get_to(shape.omega);
  shape.harmonics = j.contains("harmonics") ? j.at("harmonics").get<int>()
                                            : static_cast<int>((shape.angles.size() + 1) / 2);
}

void to_json(Json& j, const SpanParams& span) { j = Json{{"p", span.p}, {"q", span.q}}; }

void from_json(const Json& j, SpanParams& span) {
  j.at("p").get_to(span.p);
  j.at("q").get_to(span.q);
}

void to_json(Json& j, const FourierControl& control) {
  j = Json{{"a0", control.a0},
           {"a", control.a},
           {"b", control.b},
           {"omega", control.omega},
           {"harmonics", control.harmonics}};
}

void from_json(const Json& j, FourierControl& control) {
  j.at("a0").get_to(control.a0);
  j.at("a").get_to(control.a);
  j.at("b").get_to(control.b);
  j.at("omega").get_to(control.omega);
  control.harmonics = static_cast<int>(control.a.size());
}

void to_json(Json& j, const CapsuleParams& params) {
  j = Json{{"mu", params.mu}, {"rho", params.rho}, {"nu", params.nu}, {"gamma", params.gamma}};
}

void to_json(Json& j, const OptimizationResult& result) {
  j = Json{{"vector", result.best_vector},
           {"cost", result.best_cost},
           {"history", result.cost_history},
           {"seed", result.rng_seed},
           {"evaluation_count", result.evaluation_count},
           {"generations", result.generations},
           {"population_size", result.population_size},
           {"stopped_on_stagnation", result.stopped_on_stagnation},
           {"warnings", result.warnings}};
}

void to_json(Json& j, const TrialRecord& record) {
  j = Json{{"harmonics", record.harmonics},
           {"trial", record.trial},
           {"decision", record.decision},
           {"cost", record.cost},
           {"distance", record.distance},
           {"final_z", record.final_z},
           {"relative_change", record.relative_change ? Json(*record.relative_change) : Json(nullptr)},
           {"wall_time_s", record.wall_time_s},
           {"evaluation_count", record.evaluation_count},
           {"generations", record.generations},
           {"rng_seed", record.rng_seed},
           {"seeded", record.seeded},
           {"events", record.events},
           {"flagged_steps", record.flagged_steps},
           {"cost_history", record.cost_history}};
}

void to_json(Json& j, const KSummary& summary) {
  j = Json{{"harmonics", summary.harmonics},
           {"trials", summary.trials},
           {"mean_distance", summary.mean_distance},
           {"sd_distance", summary.sd_distance},
           {"sd_from_single_trial", summary.sd_from_single_trial},
           {"relative_change", summary.relative_change ? Json(*summary.relative_change) : Json(nullptr)},
           {"best_distance", summary.best_distance}};
}

void to_json(Json& j, const TrialFailure& failure) {
  j = Json{{"trial", failure.trial}, {"harmonics", failure.harmonics}, {"message", failure.message}};
}

void to_json(Json& j, const CampaignConfig& config) {
  j = Json{{"plant", config.plant},
           {"bounds",
            {{"lower", config.control_bounds.lower},
             {"upper", config.control_bounds.upper},
             {"omega_min", config.resolved_omega_min()},
             {"omega_max", config.decision_bounds.omega_max},
             {"p", {config.decision_bounds.p_min, config.decision_bounds.p_max}},
             {"q", {config.decision_bounds.q_min, config.decision_bounds.q_max}}}},
           {"integrator",
            {{"abs_tol", config.integrator.abs_tol},
             {"rel_tol", config.integrator.rel_tol},
             {"initial_step", config.integrator.initial_step},
             {"max_step", config.integrator.max_step},
             {"event_tol_time", config.integrator.event_tol_time},
             {"max_event_bisections", config.integrator.max_event_bisections},
             {"max_events", config.integrator.max_events}}},
           {"de",
            {{"strategy", config.de.strategy == DeStrategy::Best1Bin ? "best1bin" : "rand1bin"},
             {"population_size", config.de.population_size},
             {"max_generations", config.de.max_generations},
             {"mutation", {config.de.mutation_min, config.de.mutation_max}},
             {"crossover_rate", config.de.crossover_rate},
             {"stagnation_tolerance", config.de.stagnation_tolerance},
             {"stagnation_generations", config.de.stagnation_generations},
             {"parallel", config.de.parallel_evaluations},
             {"jobs", config.de.jobs}}},
           {"campaign",
            {{"k_min", config.k_min},
             {"k_max", config.k_max},
             {"trials", config.trials},
             {"t0", config.t0},
             {"tf", config.tf},
             {"mode", std::string(to_string(config.mode))},
             {"seed", config.base_seed},
             {"improvement_threshold", config.improvement_threshold},
             {"stop_on_stagnation", config.stop_on_stagnation},
             {"grid_points", config.grid_points}}}};
}

void to_json(Json& j, const CampaignRecord& record) {
  j = Json{{"mode", std::string(to_string(record.mode))},
           {"records", record.records},
           {"summary", record.summary},
           {"failures", record.failures},
           {"diagnostics", record.diagnostics},
           {"notes", record.notes},
           {"best_index", record.best_index ? Json(*record.best_index) : Json(nullptr)}};
}

RunSettings parse_settings(const Json& document, std::vector<std::string>& violations) {
  RunSettings settings;
  if (!document.is_object()) {
    violations.push_back("configuration must be a JSON object");
    return settings;
  }
  static const std::set<std::string> kSections{"plant", "bounds", "integrator", "de", "campaign", "control"};
  for (const auto& item : document.items()) {
    if (!kSections.count(item.key())) violations.push_back(item.key() + ": unknown section");
  }

  CampaignConfig& c = settings.campaign;

  Section plant(document, "plant", violations);
  plant.number("mu", c.plant.mu);
  plant.number("rho", c.plant.rho);
  plant.number("nu", c.plant.nu);
  plant.number("gamma", c.plant.gamma);
  plant.finish();

  Section bounds(document, "bounds", violations);
  bounds.number("lower", c.control_bounds.lower);
  bounds.number("upper", c.control_bounds.upper);
  bounds.number("omega_min", c.decision_bounds.omega_min);
  bounds.number("omega_max", c.decision_bounds.omega_max);
  bounds.range("p", c.decision_bounds.p_min, c.decision_bounds.p_max);
  bounds.range("q", c.decision_bounds.q_min, c.decision_bounds.q_max);
  bounds.finish();

  Section integrator(document, "integrator", violations);
  integrator.number("abs_tol", c.integrator.abs_tol);
  integrator.number("rel_tol", c.integrator.rel_tol);
  integrator.number("initial_step", c.integrator.initial_step);
  integrator.number("max_step", c.integrator.max_step);
  integrator.number("event_tol_time", c.integrator.event_tol_time);
  integrator.integer("max_event_bisections", c.integrator.max_event_bisections);
  integrator.integer("max_events", c.integrator.max_events);
  integrator.finish();

  Section de(document, "de", violations);
  std::string strategy = c.de.strategy == DeStrategy::Best1Bin ? "best1bin" : "rand1bin";
  de.string("strategy", strategy);
  if (strategy == "best1bin") {
    c.de.strategy = DeStrategy::Best1Bin;
  } else if (strategy == "rand1bin") {
    c.de.strategy = DeStrategy::Rand1Bin;
  } else {
    violations.push_back("de.strategy: must be rand1bin or best1bin");
  }
  de.integer("population_size", c.de.population_size);
  de.integer("max_generations", c.de.max_generations);
  de.range("mutation", c.de.mutation_min, c.de.mutation_max);
  de.number("crossover_rate", c.de.crossover_rate);
  de.number("stagnation_tolerance", c.de.stagnation_tolerance);
  de.integer("stagnation_generations", c.de.stagnation_generations);
  de.boolean("parallel", c.de.parallel_evaluations);
  de.integer("jobs", c.de.jobs);
  de.finish();

  Section campaign(document, "campaign", violations);
  campaign.integer("k_min", c.k_min);
  campaign.integer("k_max", c.k_max);
  campaign.integer("trials", c.trials);
  campaign.number("t0", c.t0);
  campaign.number("tf", c.tf);
  std::string mode(to_string(c.mode));
  campaign.string("mode", mode);
  try {
    c.mode = campaign_mode_from_string(mode);
  } catch (const ConfigError& e) {
    violations.push_back(std::string("campaign.mode: ") + e.what());
  }
  campaign.integer("seed", c.base_seed);
  campaign.number("improvement_threshold", c.improvement_threshold);
  campaign.boolean("stop_on_stagnation", c.stop_on_stagnation);
  campaign.integer("grid_points", c.grid_points);
  campaign.finish();

  Section control(document, "control", violations);
  if (document.contains("control")) {
    ControlSpec spec;
    const bool coefficient_form = control.has("a0") || control.has("a") || control.has("b");
    const bool decision_form = control.has("decision");
    const bool shape_form = control.has("angles");
    const int forms = int(coefficient_form) + int(decision_form) + int(shape_form);
    if (forms != 1) {
      violations.push_back(
          "control: give exactly one of {a0, a, b, omega}, {decision, harmonics} or {angles, omega, p, q}");
    }
    control.integer("harmonics", spec.harmonics);
    if (coefficient_form) {
      FourierControl coeffs;
      if (!control.has("omega")) violations.push_back("control.omega: required with coefficients");
      control.number("a0", coeffs.a0);
      control.numbers("a", coeffs.a);
      control.numbers("b", coeffs.b);
      control.number("omega", coeffs.omega);
      if (coeffs.a.size() != coeffs.b.size()) violations.push_back("control: a and b differ in length");
      coeffs.harmonics = static_cast<int>(coeffs.a.size());
      spec.harmonics = coeffs.harmonics;
      spec.coefficients = coeffs;
    } else if (decision_form) {
      std::vector<double> v;
      control.numbers("decision", v);
      if (!control.has("harmonics")) violations.push_back("control.harmonics: required with decision");
      spec.decision = v;
    } else if (shape_form) {
      ControlShape shape;
      SpanParams span;
      control.numbers("angles", shape.angles);
      control.number("omega", shape.omega);
      control.number("p", span.p);
      control.number("q", span.q);
      if (!control.has("omega")) violations.push_back("control.omega: required with angles");
      if (!control.has("harmonics")) spec.harmonics = static_cast<int>((shape.angles.size() + 1) / 2);
      shape.harmonics = spec.harmonics;
      spec.decision = join_decision(shape, span);
    }
    settings.control = spec;
  }
  control.finish();
  return settings;
}

std::vector<std::string> check_settings(const RunSettings& settings) {
  std::vector<std::string> out;
  const CampaignConfig& c = settings.campaign;
  collect(out, "plant", [&] { c.plant.validate(); });
  collect(out, "bounds", [&] { c.control_bounds.validate(); });
  collect(out, "integrator", [&] { c.integrator.validate(); });
  collect(out, "de", [&] { c.de.validate(); });

  if (c.k_min < 1) out.push_back("campaign.k_min: must be >= 1");
  if (c.k_max < c.k_min) out.push_back("campaign.k_max: must be >= k_min");
  if (c.trials < 1) out.push_back("campaign.trials: must be >= 1");
  if (!(c.tf > c.t0)) out.push_back("campaign: tf must exceed t0");
  if (c.grid_points < 2) out.push_back("campaign.grid_points: must be >= 2");
  if (!(c.improvement_threshold >= 0.0)) out.push_back("campaign.improvement_threshold: must be >= 0");

  const DecisionBounds& b = c.decision_bounds;
  if (c.tf > c.t0) {
    const double one_period = 2.0 * std::numbers::pi / (c.tf - c.t0);
    if (b.omega_min > 0.0 && b.omega_min < one_period - 1e-12) {
      out.push_back("bounds.omega_min: below one period per horizon (" + std::to_string(one_period) + ")");
    }
    if (!(b.omega_max >= c.resolved_omega_min())) out.push_back("bounds.omega_max: below omega_min");
  }
  const auto check_unit_range = [&](const char* name, double lo, double hi) {
    if (!(lo > 0.0)) out.push_back(std::string("bounds.") + name + ": lower bound must be > 0");
    if (!(hi <= 1.0)) out.push_back(std::string("bounds.") + name + ": upper bound must be <= 1");
    if (!(lo <= hi)) out.push_back(std::string("bounds.") + name + ": lower bound exceeds upper bound");
  };
  check_unit_range("p", b.p_min, b.p_max);
  check_unit_range("q", b.q_min, b.q_max);

  if (settings.control && out.empty()) {
    collect(out, "control", [&] { (void)resolve_control(*settings.control, c); });
  }
  return out;
}

FourierControl resolve_control(const ControlSpec& spec, const CampaignConfig& config) {
  if (spec.coefficients) {
    const FourierControl& f = *spec.coefficients;
    if (f.a.size() != f.b.size()) throw ConfigError("a and b differ in length");
    if (!std::isfinite(f.omega)) throw ConfigError("omega must be finite");
    return f;
  }
  if (!spec.decision) throw ConfigError("no control given");
  if (spec.harmonics < 1) throw ConfigError("harmonics must be >= 1");
  const std::vector<double>& v = *spec.decision;
  if (v.size() != decision_dimension(spec.harmonics)) {
    std::ostringstream msg;
    msg << "decision for K=" << spec.harmonics << " needs " << decision_dimension(spec.harmonics)
        << " entries, got " << v.size();
    throw ConfigError(msg.str());
  }
  const auto [shape, span] = split_decision(v, spec.harmonics);
  try {
    shape.validate(config.t0, config.tf);
    span.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return control_from_decision(v, spec.harmonics, config);
}

}  // namespace fourierctl

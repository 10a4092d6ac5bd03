#include "pbsched/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pbsched/errors.hpp"

namespace pbsched {

namespace {

using nlohmann::json;

// Reads fields of one JSON object, remembering which keys were consumed so
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return object_.contains(key); }

  const json& get(const std::string& key) {
    if (!object_.contains(key)) fail(field(key), "is required");
    seen_.insert(key);
    return object_.at(key);
  }

  double number(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) fail(field(key), "must be a number");
    return v.get<double>();
  }

  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number_integer()) fail(field(key), "must be an integer");
    return v.get<long long>();
  }

  long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

  std::string string(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) fail(field(key), "must be a string");
    return v.get<std::string>();
  }

  const json& array(const std::string& key) {
    const json& v = get(key);
    if (!v.is_array()) fail(field(key), "must be an array");
    return v;
  }

  void finish() const {
    for (const auto& item : object_.items()) {
      if (!seen_.count(item.key())) fail(field(item.key()), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& what) {
    throw ConfigError(field + ": " + what);
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

PackModel<double> read_pack(const json& node) {
  ObjectReader pack(node, "pack");
  const json& list = pack.array("modules");
  pack.finish();
  std::vector<ModuleParams<double>> modules;
  for (std::size_t i = 0; i < list.size(); ++i) {
    ObjectReader m(list[i], "pack.modules[" + std::to_string(i) + "]");
    ModuleParams<double> p;
    p.id = static_cast<int>(m.integer("id", static_cast<long long>(i + 1)));
    p.ocv = m.number("ocv_v");
    p.impedance = m.number("impedance_ohm");
    p.soc = m.number("soc", 1.0);
    m.finish();
    modules.push_back(p);
  }
  try {
    return PackModel<double>(std::move(modules));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("pack: ") + e.what());
  }
}

ScalingSpec read_scaling(const json& node) {
  ObjectReader s(node, "scaling");
  ScalingSpec spec;
  const std::string mode = s.string("mode");
  if (mode == "equal") {
    spec.mode = ScalingMode::equal;
  } else if (mode == "discharge_soc") {
    spec.mode = ScalingMode::discharge_soc;
  } else if (mode == "charge_soc") {
    spec.mode = ScalingMode::charge_soc;
  } else if (mode == "explicit") {
    spec.mode = ScalingMode::explicit_list;
    for (const json& b : s.array("betas")) {
      if (!b.is_number()) ObjectReader::fail("scaling.betas", "entries must be numbers");
      spec.betas.push_back(b.get<double>());
    }
  } else {
    ObjectReader::fail("scaling.mode", "must be one of equal, discharge_soc, charge_soc, explicit");
  }
  s.finish();
  return spec;
}

LoadProfile read_load_profile(const json& list) {
  std::vector<LoadSegment> segments;
  for (std::size_t i = 0; i < list.size(); ++i) {
    ObjectReader seg(list[i], "load_profile[" + std::to_string(i) + "]");
    segments.push_back({seg.number("start_s"), seg.number("resistance_ohm")});
    seg.finish();
  }
  try {
    return LoadProfile(std::move(segments));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("load_profile: ") + e.what());
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
  }

  ObjectReader top(root, "");
  const long long version = top.integer("schema_version");
  if (version != kConfigSchemaVersion) {
    ObjectReader::fail("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                             std::to_string(kConfigSchemaVersion) + ")");
  }

  PackModel<double> pack = read_pack(top.get("pack"));
  ScalingSpec scaling = top.has("scaling") ? read_scaling(top.get("scaling")) : ScalingSpec{};
  LoadProfile profile = read_load_profile(top.array("load_profile"));

  PlantSettings plant;
  if (top.has("plant")) {
    ObjectReader p(top.get("plant"), "plant");
    plant.dt = p.number("dt_s", plant.dt);
    plant.pwm_resolution = static_cast<int>(p.integer("pwm_resolution", plant.pwm_resolution));
    plant.ramp_up_seconds = p.number("ramp_up_s", plant.ramp_up_seconds);
    plant.noise_stddev = p.number("noise_stddev", plant.noise_stddev);
    const long long seed = p.integer("rng_seed", 0);
    if (seed < 0) ObjectReader::fail("plant.rng_seed", "must be >= 0");
    plant.rng_seed = static_cast<std::uint64_t>(seed);
    p.finish();
  }

  SchedulerSettings sched;
  if (top.has("scheduler")) {
    ObjectReader s(top.get("scheduler"), "scheduler");
    sched.min_bus_current = s.number("min_bus_current_a", sched.min_bus_current);
    sched.fallback_load = s.number("fallback_load_ohm", sched.fallback_load);
    sched.initial_duty = s.number("initial_duty", sched.initial_duty);
    s.finish();
  }

  ExperimentConfig cfg{
      .pack = std::move(pack),
      .scaling = std::move(scaling),
      .load_profile = std::move(profile),
      .duration = top.number("duration_s"),
      .scheduler_period = top.number("scheduler_period_s", 1.0),
      .plant = plant,
      .scheduler = sched,
      .output_path = top.has("output_path") ? top.string("output_path") : std::string{},
  };
  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw FileError("cannot open config " + path);
  std::ostringstream text;
  text << file.rdbuf();
  return parse_experiment_config(text.str());
}

}  // namespace pbsched

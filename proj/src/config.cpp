#include "circumnav/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "circumnav/csv.hpp"
#include "circumnav/errors.hpp"
#include "circumnav/profiles.hpp"

namespace circumnav {

TrainingConfig RunConfig::training() const {
  TrainingConfig t;
  t.iterations = iterations;
  t.samples_per_iteration = samples_per_iteration;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.lr = lr;
  t.hidden = hidden;
  t.gains = gains();
  t.window_extra = window_plus_one ? 1 : 0;
  t.noise_sigma = noise_sigma;
  t.master_seed = seed;
  t.mix = mix;
  t.episode_steps = episode_steps;
  t.abort_radius = abort_radius;
  t.input_vel_scale = input_vel_scale;
  t.target_scale = target_scale;
  t.grad_clip = grad_clip;
  t.workers = effective_workers();
  return t;
}

int RunConfig::effective_workers() const {
  if (workers > 0) return workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void RunConfig::validate() const {
  if (k_t <= 0.0 || k_r <= 0.0 || d_star <= 0.0) throw ConfigError("gains must be positive");
  if (u_max < 0.0) throw ConfigError("u_max must be >= 0 (0 disables saturation)");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (frequency <= 0.0) throw ConfigError("frequency must be positive");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (hidden < 1) throw ConfigError("hidden must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (samples_per_iteration < 1) throw ConfigError("samples_per_iteration must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (lr <= 0.0) throw ConfigError("lr must be positive");
  if (noise_sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
  if (episode_steps <= window) throw ConfigError("episode_steps must exceed window");
  if (input_vel_scale <= 0.0 || target_scale <= 0.0) throw ConfigError("scales must be positive");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (nonholonomic_trials < 1) throw ConfigError("trials must be >= 1");
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  if (name == "paper") {
    const Profile& p = profile("paper");
    cfg.k_t = p.gains.k_t;
    cfg.k_r = p.gains.k_r;
    cfg.d_star = p.gains.d_star;
    cfg.window = p.gains.window;
    cfg.hidden = p.hidden;
    cfg.lr = p.lr;
    cfg.iterations = p.iterations;
    cfg.epochs = p.epochs;
    cfg.batch_size = p.batch_size;
    cfg.samples_per_iteration = p.dataset_size;
    cfg.input_vel_scale = 1.0;
    cfg.target_scale = 1.0;
  } else if (name == "desk") {
    // Laptop-scale training: smaller net and budget, inputs and targets
    // scaled into O(1) so the short schedule trains well.
    apply_preset(cfg, "paper");
    cfg.hidden = 64;
    cfg.window = 30;
    cfg.iterations = 10;
    cfg.samples_per_iteration = 10000;
    cfg.epochs = 5;
    cfg.input_vel_scale = cfg.k_t;
    cfg.target_scale = cfg.d_star;
  } else if (name == "fast") {
    const Profile& p = profile("fast");
    apply_preset(cfg, "paper");
    cfg.k_t = p.gains.k_t;
    cfg.k_r = p.gains.k_r;
  } else {
    throw UnknownProfile(name);
  }
  cfg.preset = name;
}

namespace {

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, int line)> set;
};

double to_double(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("line " + std::to_string(line) + ": bad number for " + key);
  }
  return x;
}

long to_long(const std::string& v, const std::string& key, int line) {
  char* end = nullptr;
  long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("line " + std::to_string(line) + ": bad integer for " + key);
  }
  return x;
}

bool to_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("line " + std::to_string(line) + ": bad bool for " + key);
}

#define FIELD_D(sec, name, member)                                                       \
  Field{sec, name, [](const RunConfig& c) { return format_double(c.member); },           \
        [](RunConfig& c, const std::string& v, int line) { c.member = to_double(v, name, line); }}
#define FIELD_L(sec, name, member)                                                       \
  Field{sec, name, [](const RunConfig& c) { return std::to_string(c.member); },          \
        [](RunConfig& c, const std::string& v, int line) { c.member = to_long(v, name, line); }}
#define FIELD_B(sec, name, member)                                                      \
  Field{sec, name, [](const RunConfig& c) { return c.member ? "true" : "false"; },      \
        [](RunConfig& c, const std::string& v, int line) { c.member = to_bool(v, name, line); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      Field{"run", "preset", [](const RunConfig& c) { return c.preset; },
            [](RunConfig& c, const std::string& v, int) { apply_preset(c, v); }},
      Field{"run", "seed",
            [](const RunConfig& c) { return std::to_string(c.seed); },
            [](RunConfig& c, const std::string& v, int line) {
              c.seed = static_cast<std::uint64_t>(to_long(v, "seed", line));
            }},
      Field{"run", "workers",
            [](const RunConfig& c) { return std::to_string(c.workers); },
            [](RunConfig& c, const std::string& v, int line) {
              c.workers = static_cast<int>(to_long(v, "workers", line));
            }},
      FIELD_L("run", "nonholonomic_trials", nonholonomic_trials),
      FIELD_D("run", "settle_override", settle_override),
      FIELD_D("controller", "k_t", k_t),
      FIELD_D("controller", "k_r", k_r),
      FIELD_D("controller", "d_star", d_star),
      FIELD_L("controller", "window", window),
      FIELD_D("controller", "u_max", u_max),
      FIELD_D("sim", "frequency", frequency),
      FIELD_D("sim", "abort_radius", abort_radius),
      FIELD_L("sim", "steps", steps),
      FIELD_D("agent", "start_x", agent_start.x),
      FIELD_D("agent", "start_y", agent_start.y),
      FIELD_D("agent", "estimate0_x", initial_target_estimate.x),
      FIELD_D("agent", "estimate0_y", initial_target_estimate.y),
      FIELD_L("model", "hidden", hidden),
      FIELD_D("model", "input_vel_scale", input_vel_scale),
      FIELD_D("model", "target_scale", target_scale),
      FIELD_B("model", "window_plus_one", window_plus_one),
      FIELD_D("noise", "sigma", noise_sigma),
      FIELD_B("noise", "renormalize_bearing", renormalize_bearing),
      FIELD_L("training", "iterations", iterations),
      FIELD_L("training", "samples_per_iteration", samples_per_iteration),
      FIELD_L("training", "epochs", epochs),
      FIELD_L("training", "batch_size", batch_size),
      FIELD_D("training", "lr", lr),
      FIELD_L("training", "episode_steps", episode_steps),
      FIELD_D("training", "grad_clip", grad_clip),
      FIELD_D("trajectory", "weight_constant", mix.weight_constant),
      FIELD_D("trajectory", "weight_circle", mix.weight_circle),
      FIELD_D("trajectory", "weight_nonholonomic", mix.weight_nonholonomic),
      FIELD_D("trajectory", "const_v_min", mix.const_v_min),
      FIELD_D("trajectory", "const_v_max", mix.const_v_max),
      FIELD_D("trajectory", "const_v_exclusion", mix.const_v_exclusion),
      FIELD_D("trajectory", "circle_r_min", mix.circle_r_min),
      FIELD_D("trajectory", "circle_r_max", mix.circle_r_max),
      FIELD_D("trajectory", "circle_omega_min", mix.circle_omega_min),
      FIELD_D("trajectory", "circle_omega_max", mix.circle_omega_max),
      FIELD_D("trajectory", "circle_omega_exclusion", mix.circle_omega_exclusion),
      FIELD_L("trajectory", "resample_period", mix.resample_period),
      FIELD_D("trajectory", "agent_radius_min", mix.agent_radius_min),
      FIELD_D("trajectory", "agent_radius_max", mix.agent_radius_max),
  };
  return f;
}

#undef FIELD_D
#undef FIELD_L
#undef FIELD_B

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad section");
      section = t.substr(1, t.size() - 2);
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    bool found = false;
    for (const Field& f : fields()) {
      if (f.section == section && f.key == key) {
        f.set(base, value, line_no);
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + section + "." +
                        key + "'");
    }
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace circumnav

#include "qcl/config.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qcl {

namespace {

constexpr std::array<std::pair<Experiment, const char*>, 7> kNames{{
    {Experiment::trap_census_heisenberg, "trap_census_heisenberg"},
    {Experiment::trap_census_generic, "trap_census_generic"},
    {Experiment::fluence_study, "fluence_study"},
    {Experiment::singular_census, "singular_census"},
    {Experiment::singular_critical_search, "singular_critical_search"},
    {Experiment::system_e_study, "system_e_study"},
    {Experiment::zero_field_start, "zero_field_start"},
}};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::exception();
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad numeric value for " + key);
  }
}

long long parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::exception();
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad integer value for " + key);
  }
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean value for " + key);
}

std::string format_double_cfg(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& [ex, name] : kNames) {
    if (ex == e) return name;
  }
  return "unknown";
}

std::optional<Experiment> experiment_from_string(const std::string& name) {
  for (const auto& [ex, n] : kNames) {
    if (name == n) return ex;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (n_models < 1 || n_runs_per_model < 1) {
    throw std::invalid_argument("config: model/run counts must be >= 1");
  }
  if (dimension < 2 || dimension > 16) {
    throw std::invalid_argument("config: dimension must be in [2, 16]");
  }
  if (segments < 1) {
    throw std::invalid_argument("config: segments must be >= 1");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("config: horizon must be positive");
  }
  if (h2_ratio < 0.0) {
    throw std::invalid_argument("config: h2_ratio must be >= 0");
  }
  if (!(success_threshold > 0.0) || success_threshold > 1.0) {
    throw std::invalid_argument("config: success_threshold must be in (0,1]");
  }
  if (max_tries < 1 || max_total_iterations < 1) {
    throw std::invalid_argument("config: ascent budgets must be >= 1");
  }
  if (ode_steps < 100) {
    throw std::invalid_argument("config: ode_steps must be >= 100");
  }
  if (step_size < 0.0) {
    throw std::invalid_argument("config: step_size must be >= 0");
  }
  if (output_path.empty()) {
    throw std::invalid_argument("config: output_path must be set");
  }
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream out;
  out << "[" << to_string(experiment) << "]\n";
  out << "n_models = " << n_models << "\n";
  out << "n_runs_per_model = " << n_runs_per_model << "\n";
  out << "seed = " << seed << "\n";
  out << "dimension = " << dimension << "\n";
  out << "segments = " << segments << "\n";
  out << "horizon = " << format_double_cfg(horizon) << "\n";
  out << "polarizability = " << (polarizability ? "on" : "off") << "\n";
  out << "h2_ratio = " << format_double_cfg(h2_ratio) << "\n";
  out << "output_path = " << output_path << "\n";
  out << "threads = " << threads << "\n";
  out << "success_threshold = " << format_double_cfg(success_threshold) << "\n";
  out << "max_tries = " << max_tries << "\n";
  out << "max_total_iterations = " << max_total_iterations << "\n";
  out << "step_size = " << format_double_cfg(step_size) << "\n";
  out << "ode_steps = " << ode_steps << "\n";
  out << "confirm_traps = " << (confirm_traps ? "on" : "off") << "\n";
  return out.str();
}

ExperimentConfig ExperimentConfig::from_ini(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<Experiment> exp;
  ExperimentConfig cfg;
  bool in_section = false;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw std::invalid_argument("config: malformed section header");
      }
      if (exp) {
        throw std::invalid_argument("config: multiple sections");
      }
      const std::string name = trim(t.substr(1, t.size() - 2));
      exp = experiment_from_string(name);
      if (!exp) {
        throw std::invalid_argument("config: unknown experiment '" + name +
                                    "'");
      }
      cfg = defaults(*exp);
      in_section = true;
      continue;
    }
    if (!in_section) {
      throw std::invalid_argument("config: key outside a section");
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "n_models") {
      cfg.n_models = static_cast<int>(parse_int(value, key));
    } else if (key == "n_runs_per_model") {
      cfg.n_runs_per_model = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "dimension") {
      cfg.dimension = static_cast<int>(parse_int(value, key));
    } else if (key == "segments") {
      cfg.segments = static_cast<int>(parse_int(value, key));
    } else if (key == "horizon") {
      cfg.horizon = parse_double(value, key);
    } else if (key == "polarizability") {
      cfg.polarizability = parse_bool(value, key);
    } else if (key == "h2_ratio") {
      cfg.h2_ratio = parse_double(value, key);
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_int(value, key));
    } else if (key == "success_threshold") {
      cfg.success_threshold = parse_double(value, key);
    } else if (key == "max_tries") {
      cfg.max_tries = static_cast<int>(parse_int(value, key));
    } else if (key == "max_total_iterations") {
      cfg.max_total_iterations = static_cast<long>(parse_int(value, key));
    } else if (key == "step_size") {
      cfg.step_size = parse_double(value, key);
    } else if (key == "ode_steps") {
      cfg.ode_steps = static_cast<int>(parse_int(value, key));
    } else if (key == "confirm_traps") {
      cfg.confirm_traps = parse_bool(value, key);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!exp) {
    throw std::invalid_argument("config: missing [experiment] section");
  }
  cfg.experiment = *exp;
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  switch (e) {
    case Experiment::trap_census_heisenberg:
      cfg.n_models = 20;
      cfg.n_runs_per_model = 20;
      cfg.dimension = 4;
      cfg.segments = 250;
      cfg.horizon = 10.0;
      cfg.h2_ratio = 0.1;
      break;
    case Experiment::trap_census_generic:
    case Experiment::zero_field_start:
      cfg.n_models = 10;
      cfg.n_runs_per_model = 10;
      cfg.segments = 500;
      break;
    case Experiment::fluence_study:
      cfg.n_models = 5;
      cfg.n_runs_per_model = 1;
      cfg.segments = 250;
      break;
    case Experiment::singular_census:
      cfg.n_models = 100;
      cfg.n_runs_per_model = 1;
      cfg.horizon = 2.0;
      cfg.h2_ratio = 1.0;
      cfg.ode_steps = 4000;
      break;
    case Experiment::singular_critical_search:
      cfg.n_models = 40;
      cfg.n_runs_per_model = 200;  // neighborhood points per found control
      cfg.horizon = 2.0;
      cfg.h2_ratio = 1.0;
      cfg.ode_steps = 400;
      break;
    case Experiment::system_e_study:
      cfg.n_models = 20;
      cfg.n_runs_per_model = 20;
      cfg.dimension = 3;
      cfg.segments = 500;
      cfg.horizon = 1000.0;
      cfg.success_threshold = 0.999;
      break;
  }
  return cfg;
}

}  // namespace qcl

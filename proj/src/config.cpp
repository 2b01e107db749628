#include "avgschro/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace avgschro {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError("expected a number, got '" + v + "'", line);
  }
}

long long parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw ConfigError("expected an integer, got '" + v + "'", line);
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Distribution keys are collected first and assembled once the section ends,
// so the parameter set can be validated as a whole.
struct DistBuilder {
  std::string family;
  std::map<std::string, double> params;
  int family_line = 0;

  double take(const char* key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    double v = it->second;
    params.erase(it);
    return v;
  }

  DistributionSpec build() {
    if (family.empty())
      throw ConfigError("[distribution] requires a 'family' key", family_line);
    DistributionSpec spec = DistributionSpec::normal(0, 1);
    try {
      if (family == "normal")
        spec = DistributionSpec::normal(take("mean", 0.0), take("variance", 1.0));
      else if (family == "cauchy")
        spec = DistributionSpec::cauchy(take("location", 0.0), take("scale", 1.0));
      else if (family == "stable")
        spec = DistributionSpec::stable(take("stability", 2.0),
                                        take("skewness", 0.0),
                                        take("shift", 0.0), take("scale", 0.5));
      else if (family == "uniform")
        spec = DistributionSpec::uniform(take("a", 0.0), take("b", 1.0));
      else if (family == "exponential")
        spec = DistributionSpec::exponential(take("rate", 1.0));
      else
        throw ConfigError("unknown distribution family '" + family + "'",
                          family_line);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), family_line);
    }
    if (!params.empty())
      throw ConfigError("parameter '" + params.begin()->first +
                            "' does not belong to family '" + family + "'",
                        family_line);
    return spec;
  }
};

}  // namespace

void ExperimentConfig::validate() const {
  if (!(length > 0.0)) throw std::invalid_argument("L must be > 0");
  if (!(0.0 <= control_lo && control_lo < control_hi && control_hi <= length))
    throw std::invalid_argument("control region must satisfy 0 <= lo < hi <= L");
  if (nx < 4) throw std::invalid_argument("nx must be >= 4");
  if (nt < 1) throw std::invalid_argument("nt must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("T must be > 0");
  if (n_modes < 0 || n_modes > nx - 1)
    throw std::invalid_argument("n_modes must lie in [0, nx-1]");
  if (samples < 1) throw std::invalid_argument("ensemble samples must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (backend != BackendKind::mc_fd) {
    bool full = control_lo == 0.0 && control_hi == length;
    if (!full)
      throw std::invalid_argument(
          "spectral backend requires full-domain control (G0 = G)");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  DistBuilder dist;
  bool have_dist = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("unterminated section header", line);
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (section != "problem" && section != "distribution" &&
          section != "discretization" && section != "ensemble" &&
          section != "hum" && section != "backend" && section != "probes")
        throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line);
    std::string key = lower(trim(s.substr(0, eq)));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    if (section.empty())
      throw ConfigError("key '" + key + "' appears before any section", line);

    if (section == "problem") {
      if (key == "l") cfg.length = parse_double(value, line);
      else if (key == "control_lo") cfg.control_lo = parse_double(value, line);
      else if (key == "control_hi") cfg.control_hi = parse_double(value, line);
      else if (key == "t") cfg.horizon = parse_double(value, line);
      else if (key == "initial") cfg.initial = value;
      else throw ConfigError("unknown key '" + key + "' in [problem]", line);
    } else if (section == "distribution") {
      have_dist = true;
      if (key == "family") {
        dist.family = lower(value);
        dist.family_line = line;
      } else {
        dist.params[key] = parse_double(value, line);
        if (dist.family_line == 0) dist.family_line = line;
      }
    } else if (section == "discretization") {
      if (key == "nx") cfg.nx = static_cast<int>(parse_int(value, line));
      else if (key == "nt") cfg.nt = static_cast<int>(parse_int(value, line));
      else if (key == "n_modes") cfg.n_modes = static_cast<int>(parse_int(value, line));
      else throw ConfigError("unknown key '" + key + "' in [discretization]", line);
    } else if (section == "ensemble") {
      if (key == "samples" || key == "m")
        cfg.samples = static_cast<int>(parse_int(value, line));
      else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_int(value, line));
      else throw ConfigError("unknown key '" + key + "' in [ensemble]", line);
    } else if (section == "hum") {
      if (key == "tol") cfg.tol = parse_double(value, line);
      else if (key == "k_max") cfg.k_max = static_cast<int>(parse_int(value, line));
      else if (key == "z_guess") cfg.z_guess = lower(value);
      else throw ConfigError("unknown key '" + key + "' in [hum]", line);
    } else if (section == "backend") {
      if (key == "kind") {
        std::string v = lower(value);
        if (v == "spectral") cfg.backend = BackendKind::spectral;
        else if (v == "mc_fd") cfg.backend = BackendKind::mc_fd;
        else if (v == "both") cfg.backend = BackendKind::both;
        else throw ConfigError("unknown backend '" + value + "'", line);
      } else if (key == "threads") {
        cfg.threads = static_cast<int>(parse_int(value, line));
      } else {
        throw ConfigError("unknown key '" + key + "' in [backend]", line);
      }
    } else if (section == "probes") {
      if (key == "run") cfg.probes = split_list(lower(value));
      else throw ConfigError("unknown key '" + key + "' in [probes]", line);
    }
  }

  if (have_dist) cfg.distribution = dist.build();
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), line);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;  // defaults already match test1
  if (name == "test1") {
    cfg.distribution = DistributionSpec::normal(0.0, 1.0);
    cfg.horizon = 0.4;
  } else if (name == "test2") {
    cfg.distribution = DistributionSpec::cauchy(0.0, 1.0);
    cfg.horizon = 0.2;
  } else {
    throw std::invalid_argument("unknown preset '" + name +
                                "' (available: test1, test2)");
  }
  return cfg;
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[problem]\n"
     << "L = " << cfg.length << "\n"
     << "control_lo = " << cfg.control_lo << "\n"
     << "control_hi = " << cfg.control_hi << "\n"
     << "T = " << cfg.horizon << "\n"
     << "initial = " << cfg.initial << "\n\n";
  os << "[distribution]\n";
  const DistributionSpec& d = cfg.distribution;
  switch (d.family()) {
    case Family::normal:
      os << "family = normal\nmean = " << d.mean()
         << "\nvariance = " << d.variance() << "\n";
      break;
    case Family::cauchy:
      os << "family = cauchy\nlocation = " << d.location()
         << "\nscale = " << d.scale() << "\n";
      break;
    case Family::stable:
      os << "family = stable\nstability = " << d.stability()
         << "\nskewness = " << d.skewness() << "\nshift = " << d.shift()
         << "\nscale = " << d.scale() << "\n";
      break;
    case Family::uniform:
      os << "family = uniform\na = " << d.lower() << "\nb = " << d.upper()
         << "\n";
      break;
    case Family::exponential:
      os << "family = exponential\nrate = " << d.rate() << "\n";
      break;
  }
  os << "\n[discretization]\n"
     << "nx = " << cfg.nx << "\n"
     << "nt = " << cfg.nt << "\n"
     << "n_modes = " << cfg.n_modes << "\n\n";
  os << "[ensemble]\n"
     << "samples = " << cfg.samples << "\n"
     << "seed = " << cfg.seed << "\n\n";
  os << "[hum]\n"
     << "tol = " << cfg.tol << "\n"
     << "k_max = " << cfg.k_max << "\n"
     << "z_guess = " << cfg.z_guess << "\n\n";
  os << "[backend]\n"
     << "kind = "
     << (cfg.backend == BackendKind::spectral
             ? "spectral"
             : cfg.backend == BackendKind::mc_fd ? "mc_fd" : "both")
     << "\n"
     << "threads = " << cfg.threads << "\n";
  if (!cfg.probes.empty()) {
    os << "\n[probes]\nrun = ";
    for (std::size_t i = 0; i < cfg.probes.size(); ++i)
      os << (i ? ", " : "") << cfg.probes[i];
    os << "\n";
  }
  return os.str();
}

StateField named_field(const std::string& name, const SpatialGrid& grid) {
  StateField v(grid.interior(), Complex{});
  if (name == "zero") return v;
  if (name == "sin_pi") {
    for (int j = 0; j < grid.interior(); ++j)
      v[j] = std::sin(3.14159265358979323846 * grid.node(j) / grid.length);
    return v;
  }
  if (name.rfind("file:", 0) == 0) {
    std::string path = name.substr(5);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field file '" + path + "'");
    std::string header;
    std::getline(in, header);  // node,re,im
    int j;
    char c1, c2;
    double re, im;
    while (in >> j >> c1 >> re >> c2 >> im) {
      if (j < 1 || j > grid.interior())
        throw std::runtime_error("field file node index out of range");
      v[j - 1] = Complex(re, im);
    }
    return v;
  }
  throw std::invalid_argument("unknown field preset '" + name +
                              "' (use sin_pi, zero, or file:<path>)");
}

}  // namespace avgschro

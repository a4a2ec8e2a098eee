#include "iins/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace iins {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_real(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad numeric value for " + key + ": " + s);
  }
  if (pos != s.size())
    throw std::runtime_error("config: trailing junk in value for " + key + ": " + s);
  return v;
}

int to_int(const std::string& s, const std::string& key) {
  double v = to_real(s, key);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::runtime_error("config: expected integer for " + key + ": " + s);
  return i;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Config parse_config(const std::string& text) {
  Config c;
  using Setter = std::function<void(Config&, const std::string&, const std::string&)>;
  std::map<std::string, Setter> keys;
  auto real_key = [&](const std::string& name, double Config::* f) {
    keys[name] = [f](Config& cc, const std::string& k, const std::string& v) {
      cc.*f = to_real(v, k);
    };
  };
  auto int_key = [&](const std::string& name, int Config::* f) {
    keys[name] = [f](Config& cc, const std::string& k, const std::string& v) {
      cc.*f = to_int(v, k);
    };
  };
  auto str_key = [&](const std::string& name, std::string Config::* f) {
    keys[name] = [f](Config& cc, const std::string&, const std::string& v) {
      cc.*f = v;
    };
  };
  int_key("grid.nx", &Config::nx);
  int_key("grid.nz", &Config::nz);
  real_key("grid.Lx", &Config::Lx);
  real_key("grid.h", &Config::h);
  real_key("physics.nu", &Config::nu);
  real_key("physics.g", &Config::g);
  real_key("physics.f_offset", &Config::f_offset);
  real_key("physics.gamma", &Config::gamma);
  real_key("physics.beta", &Config::beta);
  str_key("physics.bc", &Config::bc);
  str_key("physics.limiter", &Config::limiter);
  str_key("profile.kind", &Config::profile_kind);
  real_key("profile.alpha1", &Config::alpha1);
  real_key("profile.alpha2", &Config::alpha2);
  real_key("profile.delta0", &Config::delta0);
  str_key("profile.seed", &Config::seed);
  real_key("profile.amplitude", &Config::amplitude);
  int_key("profile.mode_x", &Config::mode_x);
  int_key("profile.mode_z", &Config::mode_z);
  real_key("time.cfl", &Config::cfl);
  real_key("time.t_end", &Config::t_end);
  real_key("time.dt_max", &Config::dt_max);
  str_key("time.viscous", &Config::viscous);
  int_key("io.sample_every", &Config::sample_every);
  int_key("io.snapshot_every", &Config::snapshot_every);
  str_key("io.outdir", &Config::outdir);
  real_key("poisson.tol", &Config::tol);
  int_key("poisson.max_iter", &Config::max_iter);
  keys["physics.potential"] = [](Config&, const std::string&, const std::string&) {
    throw std::runtime_error(
        "config: external potential files are not supported; use physics.g");
  };

  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) {
      // the scenario label comment written by serialize_config round-trips
      std::string comment = trim(line.substr(hash + 1));
      if (comment.rfind("scenario:", 0) == 0)
        c.scenario = trim(comment.substr(9));
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config: malformed section header, line " +
                                 std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "physics" && section != "profile" &&
          section != "time" && section != "io" && section != "poisson")
        throw std::runtime_error("config: unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key = value, line " +
                               std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::runtime_error("config: key '" + key + "' outside any section");
    std::string full = section + "." + key;
    auto it = keys.find(full);
    if (it == keys.end())
      throw std::runtime_error("config: unknown key " + full);
    it->second(c, full, val);
  }

  auto one_of = [](const std::string& v, std::initializer_list<const char*> opts,
                   const std::string& key) {
    for (const char* o : opts)
      if (v == o) return;
    std::string msg = "config: " + key + " must be one of {";
    bool first = true;
    for (const char* o : opts) {
      if (!first) msg += ", ";
      msg += o;
      first = false;
    }
    throw std::runtime_error(msg + "}, got '" + v + "'");
  };
  one_of(c.bc, {"no-slip", "free-slip"}, "physics.bc");
  one_of(c.limiter, {"minmod", "superbee"}, "physics.limiter");
  one_of(c.profile_kind, {"linear", "exponential", "unstable-step"}, "profile.kind");
  one_of(c.seed, {"none", "solenoidal", "linstab"}, "profile.seed");
  one_of(c.viscous, {"explicit", "cn"}, "time.viscous");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const Config& c) {
  std::ostringstream os;
  if (!c.scenario.empty()) os << "# scenario: " << c.scenario << "\n";
  os << "[grid]\n"
     << "nx = " << c.nx << "\n"
     << "nz = " << c.nz << "\n"
     << "Lx = " << fmt17(c.Lx) << "\n"
     << "h = " << fmt17(c.h) << "\n"
     << "[physics]\n"
     << "nu = " << fmt17(c.nu) << "\n"
     << "g = " << fmt17(c.g) << "\n"
     << "f_offset = " << fmt17(c.f_offset) << "\n"
     << "gamma = " << fmt17(c.gamma) << "\n"
     << "beta = " << fmt17(c.beta) << "\n"
     << "bc = " << c.bc << "\n"
     << "limiter = " << c.limiter << "\n"
     << "[profile]\n"
     << "kind = " << c.profile_kind << "\n"
     << "alpha1 = " << fmt17(c.alpha1) << "\n"
     << "alpha2 = " << fmt17(c.alpha2) << "\n"
     << "delta0 = " << fmt17(c.delta0) << "\n"
     << "seed = " << c.seed << "\n"
     << "amplitude = " << fmt17(c.amplitude) << "\n"
     << "mode_x = " << c.mode_x << "\n"
     << "mode_z = " << c.mode_z << "\n"
     << "[time]\n"
     << "cfl = " << fmt17(c.cfl) << "\n"
     << "t_end = " << fmt17(c.t_end) << "\n"
     << "dt_max = " << fmt17(c.dt_max) << "\n"
     << "viscous = " << c.viscous << "\n"
     << "[io]\n"
     << "sample_every = " << c.sample_every << "\n"
     << "snapshot_every = " << c.snapshot_every << "\n"
     << "outdir = " << c.outdir << "\n"
     << "[poisson]\n"
     << "tol = " << fmt17(c.tol) << "\n"
     << "max_iter = " << c.max_iter << "\n";
  return os.str();
}

void save_config(const Config& c, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("config: cannot write " + path);
  os << serialize_config(c);
}

}  // namespace iins

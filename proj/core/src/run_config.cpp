#include "qmcpde/run_config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace qmcpde {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  return x;
}

std::int64_t to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad unsigned integer for " + key + ": '" + v + "'");
  }
}

template <typename T, typename Conv>
std::vector<T> to_list(const std::string& v, const std::string& key, Conv conv) {
  std::vector<T> out;
  std::istringstream ss(v);
  std::string tok;
  while (ss >> tok) out.push_back(conv(tok, key));
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

template <typename T>
std::string fmt_list(const std::vector<T>& xs,
                     const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += fmt(xs[i]);
  }
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"covariance", "sigma2",
       [](RunConfig& c, const std::string& v) { c.sigma2 = to_double(v, "sigma2"); },
       [](const RunConfig& c) { return fmt_double(c.sigma2); }},
      {"covariance", "lambda",
       [](RunConfig& c, const std::string& v) { c.lambda = to_double(v, "lambda"); },
       [](const RunConfig& c) { return fmt_double(c.lambda); }},
      {"covariance", "nu",
       [](RunConfig& c, const std::string& v) { c.nu = to_double(v, "nu"); },
       [](const RunConfig& c) { return fmt_double(c.nu); }},
      {"grid", "d",
       [](RunConfig& c, const std::string& v) { c.d = static_cast<int>(to_int(v, "d")); },
       [](const RunConfig& c) { return std::to_string(c.d); }},
      {"grid", "m0",
       [](RunConfig& c, const std::string& v) { c.m0 = static_cast<int>(to_int(v, "m0")); },
       [](const RunConfig& c) { return std::to_string(c.m0); }},
      {"embedding", "m_cap",
       [](RunConfig& c, const std::string& v) { c.m_cap = static_cast<int>(to_int(v, "m_cap")); },
       [](const RunConfig& c) { return std::to_string(c.m_cap); }},
      {"embedding", "growth",
       [](RunConfig& c, const std::string& v) { c.growth = v; },
       [](const RunConfig& c) { return c.growth; }},
      {"mesh", "k",
       [](RunConfig& c, const std::string& v) { c.mesh_k = static_cast<int>(to_int(v, "k")); },
       [](const RunConfig& c) { return std::to_string(c.mesh_k); }},
      {"mesh", "file",
       [](RunConfig& c, const std::string& v) { c.mesh_file = v; },
       [](const RunConfig& c) { return c.mesh_file; }},
      {"qoi", "box",
       [](RunConfig& c, const std::string& v) {
         c.qoi_box = (v == "full") ? std::vector<double>{}
                                   : to_list<double>(v, "box", to_double);
       },
       [](const RunConfig& c) {
         return c.qoi_box.empty()
                    ? std::string("full")
                    : fmt_list<double>(c.qoi_box, [](const double& x) {
                        return fmt_double(x);
                      });
       }},
      {"lattice", "kappa",
       [](RunConfig& c, const std::string& v) { c.kappa = to_double(v, "kappa"); },
       [](const RunConfig& c) { return fmt_double(c.kappa); }},
      {"lattice", "bj_mode",
       [](RunConfig& c, const std::string& v) { c.bj_mode = v; },
       [](const RunConfig& c) { return c.bj_mode; }},
      {"lattice", "n",
       [](RunConfig& c, const std::string& v) { c.n = to_int(v, "n"); },
       [](const RunConfig& c) { return std::to_string(c.n); }},
      {"estimate", "method",
       [](RunConfig& c, const std::string& v) { c.method = v; },
       [](const RunConfig& c) { return c.method; }},
      {"estimate", "q",
       [](RunConfig& c, const std::string& v) { c.q = static_cast<int>(to_int(v, "q")); },
       [](const RunConfig& c) { return std::to_string(c.q); }},
      {"estimate", "seed",
       [](RunConfig& c, const std::string& v) { c.seed = to_uint(v, "seed"); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"estimate", "mean",
       [](RunConfig& c, const std::string& v) { c.mean = to_double(v, "mean"); },
       [](const RunConfig& c) { return fmt_double(c.mean); }},
      {"estimate", "workers",
       [](RunConfig& c, const std::string& v) { c.workers = static_cast<int>(to_int(v, "workers")); },
       [](const RunConfig& c) { return std::to_string(c.workers); }},
      {"estimate", "N",
       [](RunConfig& c, const std::string& v) { c.mc_samples = to_int(v, "N"); },
       [](const RunConfig& c) { return std::to_string(c.mc_samples); }},
      {"estimate", "n_schedule",
       [](RunConfig& c, const std::string& v) {
         c.n_schedule = to_list<std::int64_t>(v, "n_schedule", to_int);
       },
       [](const RunConfig& c) {
         return fmt_list<std::int64_t>(c.n_schedule, [](const std::int64_t& x) {
           return std::to_string(x);
         });
       }},
      {"estimate", "N_schedule",
       [](RunConfig& c, const std::string& v) {
         c.N_schedule = to_list<std::int64_t>(v, "N_schedule", to_int);
       },
       [](const RunConfig& c) {
         return fmt_list<std::int64_t>(c.N_schedule, [](const std::int64_t& x) {
           return std::to_string(x);
         });
       }},
      {"output", "embedding",
       [](RunConfig& c, const std::string& v) { c.embedding_file = v; },
       [](const RunConfig& c) { return c.embedding_file; }},
      {"output", "gv",
       [](RunConfig& c, const std::string& v) { c.gv_file = v; },
       [](const RunConfig& c) { return c.gv_file; }},
      {"output", "csv",
       [](RunConfig& c, const std::string& v) { c.csv_file = v; },
       [](const RunConfig& c) { return c.csv_file; }},
  };
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields())
    if (section == f.section && key == f.key) return &f;
  return nullptr;
}

bool power_of_two(std::int64_t n) { return n >= 1 && (n & (n - 1)) == 0; }

}  // namespace

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string line, section;
  std::vector<std::string> seen;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* f = find_field(section, key);
    if (!f)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key [" + section + "] " + key);
    const std::string dotted = section + "." + key;
    if (std::find(seen.begin(), seen.end(), dotted) != seen.end())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key " + dotted);
    seen.push_back(dotted);
    f->set(cfg, value);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  return parse_config(is);
}

void apply_override(RunConfig& cfg, const std::string& dotted_key,
                    const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos)
    throw ConfigError("override: expected section.key, got '" + dotted_key + "'");
  const Field* f =
      find_field(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
  if (!f) throw ConfigError("override: unknown key '" + dotted_key + "'");
  f->set(cfg, value);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

void RunConfig::validate() const {
  if (!(sigma2 > 0.0)) throw ConfigError("config: sigma2 must be positive");
  if (!(lambda > 0.0)) throw ConfigError("config: lambda must be positive");
  if (!(nu >= 0.5)) throw ConfigError("config: nu must be >= 1/2");
  if (d < 1 || d > 3) throw ConfigError("config: d must be 1, 2 or 3");
  if (m0 < 1) throw ConfigError("config: m0 must be >= 1");
  if (m_cap != 0 && m_cap < m0) throw ConfigError("config: m_cap < m0");
  if (growth != "increment" && growth != "doubling")
    throw ConfigError("config: growth must be increment or doubling");
  if (mesh_k < 0) throw ConfigError("config: mesh k must be >= 1");
  if (!qoi_box.empty()) {
    if (static_cast<int>(qoi_box.size()) != 2 * d)
      throw ConfigError("config: qoi box needs lo/hi per axis (2d values)");
    for (int axis = 0; axis < d; ++axis) {
      const double lo = qoi_box[2 * axis], hi = qoi_box[2 * axis + 1];
      if (!(lo >= 0.0 && hi <= 1.0 && lo < hi))
        throw ConfigError("config: qoi box must satisfy 0 <= lo < hi <= 1");
    }
  }
  if (!(kappa > 0.5 && kappa < 1.0))
    throw ConfigError("config: kappa must lie in (1/2,1)");
  if (bj_mode != "exact" && bj_mode != "bound")
    throw ConfigError("config: bj_mode must be exact or bound");
  if (!power_of_two(n)) throw ConfigError("config: n must be a power of 2");
  if (method != "mc" && method != "qmc")
    throw ConfigError("config: method must be mc or qmc");
  if (q < 2) throw ConfigError("config: q must be >= 2");
  if (workers < 0) throw ConfigError("config: workers must be >= 0");
  if (mc_samples < 2) throw ConfigError("config: N must be >= 2");
  for (std::int64_t x : n_schedule)
    if (!power_of_two(x))
      throw ConfigError("config: n_schedule values must be powers of 2");
  for (std::int64_t x : N_schedule)
    if (x < 2) throw ConfigError("config: N_schedule values must be >= 2");
}

}  // namespace qmcpde

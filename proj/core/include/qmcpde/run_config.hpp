#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmcpde {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run configuration, read from a sectioned key-value text file.  Unknown
/// sections or keys are errors; all randomness flows from the one master
/// seed.
struct RunConfig {
  // [covariance]
  double sigma2 = 0.25;
  double lambda = 0.2;
  double nu = 0.5;

  // [grid]
  int d = 2;
  int m0 = 8;

  // [embedding]
  int m_cap = 0;                      // 0 means 64 * m0
  std::string growth = "increment";   // or "doubling"

  // [mesh]
  int mesh_k = 0;                     // 0 means m0 (h ~ sqrt(d) h0)
  std::string mesh_file;              // optional mesh import

  // [qoi]
  std::vector<double> qoi_box;        // lo/hi per axis; empty = full domain

  // [lattice]
  double kappa = 0.6;
  std::string bj_mode = "exact";      // or "bound"
  std::int64_t n = 256;               // points per shift (power of 2)

  // [estimate]
  std::string method = "qmc";         // or "mc"
  int q = 16;
  std::uint64_t seed = 1;
  double mean = 0.0;                  // constant mean field
  int workers = 1;
  std::int64_t mc_samples = 4096;     // N for a single mc run
  std::vector<std::int64_t> n_schedule;  // study, qmc
  std::vector<std::int64_t> N_schedule;  // study, mc

  // [output]
  std::string embedding_file;
  std::string gv_file;
  std::string csv_file;

  int effective_m_cap() const { return m_cap > 0 ? m_cap : 64 * m0; }
  int effective_mesh_k() const { return mesh_k > 0 ? mesh_k : m0; }

  void validate() const;
};

RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);

/// Override via "section.key = value" semantics, e.g. "grid.m0", "42".
void apply_override(RunConfig& cfg, const std::string& dotted_key,
                    const std::string& value);

/// Canonical text form; parse(serialize(parse(t))) == parse(t).
std::string serialize_config(const RunConfig& cfg);

}  // namespace qmcpde

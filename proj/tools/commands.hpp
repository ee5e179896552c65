#pragma once

#include "qmcpde/run_config.hpp"

#include <string>

namespace qmcpde::cli {

/// Build the minimal embedding, write the embedding file, print a report.
int cmd_embed(const RunConfig& cfg);

/// Load an embedding, derive weights from the sensitivity coefficients,
/// run the CBC construction, write the generating-vector file.
int cmd_cbc(const RunConfig& cfg);

/// Single estimate (method per config); one CSV row.
int cmd_run(const RunConfig& cfg);

/// Convergence study over the configured schedule; one CSV row per point.
int cmd_study(const RunConfig& cfg);

}  // namespace qmcpde::cli

#pragma once

#include <ostream>

#include "config.hpp"

namespace bchlab::cli {

/// Runs cfg.subcommand (profile, portrait, criterion, spectrum, evolve,
/// verify-all): writes its CSV/JSON files and report.json into the output
/// directory and returns 0 when every check passed, 1 otherwise. Progress
/// goes to `log`, failures to `err`. Throws ConfigError (or DomainError from
/// the library) for configurations that cannot be run.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace bchlab::cli

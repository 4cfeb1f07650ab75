#pragma once

#include <string>
#include <vector>

#include "sfl/io.hpp"

namespace sfl::runner {

// Subcommands in dispatch order: coherence-study, discretize-study, recover,
// oracle, taylor-check, pipeline, rates.
const std::vector<std::string>& subcommand_names();

// Merges a config file (optional) with flag overrides. With no file the base
// config is {"schema_version": 1}; a file must declare schema_version itself.
// Override keys replace file keys wholesale.
io::json resolve_config(const std::string& config_path, const io::json& flag_overrides);

// Validates the config against the subcommand's schema, runs it, and writes
// <subcommand>.csv (plus siblings) and <subcommand>_meta.json into out_dir.
// The metadata echoes the fully resolved config and the library version.
// Throws std::runtime_error on config errors; returns a process exit status.
int run(const std::string& subcommand, const io::json& config, const std::string& out_dir);

}  // namespace sfl::runner

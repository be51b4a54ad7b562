#pragma once

#include <map>
#include <string>
#include <vector>

#include "experiments.hpp"

namespace recurlab
{
//! Dotted key ("precision.kind") to raw value text.
using FlatConfig = std::map<std::string, std::string>;

/*!
 * Parse configuration text.
 *
 * Accepts key = value lines with [section] headers (TOML-style quoting,
 * lists written as [a, b], # or ; comments), or a JSON object; a JSON run
 * report is read through its "config" member so runs can be replayed.
 */
FlatConfig parse_config_text(std::string const& text);

//! Throws MissingFileError when the path does not exist.
FlatConfig load_config_file(std::string const& path);

std::vector<std::string> known_config_keys();

//! Set one key; ConfigError for unknown keys.
void apply_override(FlatConfig& flat, std::string const& key, std::string const& value);

//! Defaults overlaid with \c flat, then validated.
ExperimentConfig config_from_flat(FlatConfig const& flat);

//! Every key, with values that parse back to the same configuration.
FlatConfig config_to_flat(ExperimentConfig const& cfg);

}  // namespace recurlab

#pragma once

// The `bsnake` command line: train, arena, replay and serve.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
// Options can also be set through BSNAKE_<OPTION> environment variables
// (BSNAKE_CONFIG, BSNAKE_SEED, BSNAKE_OUT, BSNAKE_PARALLELISM, BSNAKE_PORT,
// ...); a flag on the command line wins over the environment, which wins
// over the config file.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsnake/config.h"

namespace bsnake {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Applies a `dotted.path=value` override to a config object. The value is
// read as JSON when it parses (numbers, booleans, objects), otherwise as a
// string.
void apply_override(Json& config, const std::string& assignment);

// Accepts either a config file or a manifest written by an earlier run, in
// which case the resolved config recorded in the manifest is used.
Json load_config_or_manifest(const std::string& path);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsnake

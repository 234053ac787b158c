/**
 * @file cli.hpp
 * @brief `rehand` command line: simulate, costs, anonymity.
 *
 * Exit codes: 0 success, 2 bad input (config, flags, log), 3 an internal
 * invariant failed during the run.
 */
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rehand::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInvariant = 3;

struct ManifestEntry {
    std::string name;
    std::string sha256;
};

/// Lists every file written by a run with its SHA-256.
struct RunManifest {
    std::string subcommand;
    std::string config;
    std::string seed;  // empty when the subcommand is not seeded
    std::string out;
    std::vector<ManifestEntry> files;

    std::string to_json() const;
};

std::string file_sha256(const std::filesystem::path& path);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rehand::cli

#pragma once

#include <filesystem>

#include "parallel_spectra/config.hpp"

namespace paraspec {

inline constexpr const char* kVersion = "0.1.0";

// Command entry points shared by the CLI binary and the test suites. Each
// writes its output files atomically under outdir and returns the process
// exit code (0 = success, 1 = verification/audit failure). Configuration
// problems throw; the binary maps them to exit code 2.

int cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& outdir, bool with_match);
int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& outdir);
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& outdir);
int cmd_zero_modes(const RunConfig& cfg, const std::filesystem::path& outdir);
int cmd_evolve(const RunConfig& cfg, const std::filesystem::path& outdir);

} // namespace paraspec

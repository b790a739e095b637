#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

namespace cise {

// Process-level exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitConfig = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitMissingFile = 66;

// Each command loads the config itself, performs its run, writes outputs, and
// maps every failure to one of the exit codes above; nothing escapes as an
// exception.  Results and diagnostics go to stdout/stderr.

int cmd_expand(const std::filesystem::path& config_path, const std::filesystem::path& out_dir);

int cmd_verify(const std::filesystem::path& config_path, const std::filesystem::path& boundary_csv);

int cmd_simulate(const std::filesystem::path& config_path,
                 const std::filesystem::path& boundary_csv, const std::filesystem::path& out_dir,
                 std::optional<std::uint64_t> seed_override = std::nullopt);

int cmd_kernel(const std::filesystem::path& config_path, const std::filesystem::path& out_dir);

int cmd_sdf(const std::filesystem::path& config_path, const std::filesystem::path& boundary_csv,
            const std::filesystem::path& out_dir);

}  // namespace cise

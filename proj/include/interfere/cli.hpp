#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace interfere::cli {

/// Environment variable naming the calibration file used when --calibration is absent.
inline constexpr const char* kCalibrationEnv = "INTERFERE_CALIBRATION";

/// Entry point of the `interfere` tool. Returns the process exit code: 0 on
/// success, 1 for usage errors, and error_exit_code() of the failure class
/// otherwise (after printing one `error: <class>: <message>` line to `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace interfere::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hrsearch/oracle.hpp"
#include "hrsearch/pipeline.hpp"

namespace hrsearch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMismatch = 3;

// Entry point of the command-line tool; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string record_to_json(const HrCaseRecord& r);
std::string record_to_csv(const HrCaseRecord& r);
std::string stats_to_csv(const PhaseStats& s);

}  // namespace hrsearch

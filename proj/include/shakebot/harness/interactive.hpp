#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "shakebot/harness/config.hpp"

namespace shakebot::harness {

/// Prompt loop: read "PGV/PGA PGA", run the motion, show the estimate, take
/// the outcome (oracle or operator), append a record and ask whether to go on.
/// Malformed input and infeasible motions re-prompt. End of input stops the
/// session; a run whose outcome was never entered is not recorded.
/// Returns the number of records appended.
std::size_t interactive_session(const ExperimentConfig& config, std::istream& in,
                                std::ostream& out, const std::filesystem::path& records_csv);

}  // namespace shakebot::harness

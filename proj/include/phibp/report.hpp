#pragma once
// Deterministic report artifacts: '#'-headed CSV tables and atomic file
// writes.  Every floating-point value is printed with %.17g so reruns with the
// same config and seed produce byte-identical files; nothing time-dependent
// belongs in an artifact (timings go to stderr).

#include <filesystem>
#include <span>
#include <string>
#include <utility>

#include "phibp/verify.hpp"

namespace phibp {

inline constexpr int kReportSchemaVersion = 1;

// %.17g: shortest text that round-trips the double bit pattern.
std::string format_double(double v);

// Writes to a sibling temp file, then renames over `path`, so a reader never
// sees a half-written artifact.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text);

// config_id,r,K_tilde,log_lhs,log_rhs,residual -- one row per enumerated
// configuration, plus the linear-scale probabilities for convenience.
std::string duality_csv(const DualitySweep& sweep);

// statistic,chi2,dof,p_value,tv_distance
std::string mc_csv(const McComparison& mc);

// law,sum,abs_error with abs_error = |sum - 1|.
std::string normalize_csv(
    std::span<const std::pair<std::string, double>> sums);

}  // namespace phibp

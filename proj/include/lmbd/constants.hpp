#pragma once

#include <string_view>

namespace lmbd {

inline constexpr std::string_view kVersion = "0.1.0";

/// Shared numeric tolerances.
namespace tolerance {
/// Identities evaluated in the log domain.
inline constexpr double kLogIdentity = 1e-12;
/// Relative agreement of ratios of exponentiated quantities.
inline constexpr double kRatio = 1e-10;
/// Relative slack when classifying tau1 against 1 (ties count as "<= 1").
inline constexpr double kTie = 1e-12;
/// Half-width of the neighbourhood of {psi = 1/2} U {psi = 1} U {omega = 1}
/// inside which the factor Delta is reported as singular.
inline constexpr double kSingularRadius = 1e-6;
}  // namespace tolerance

/// The enumeration oracle walks 2^n outcomes; refuse anything larger.
inline constexpr int kMaxOracleTrials = 20;

}  // namespace lmbd

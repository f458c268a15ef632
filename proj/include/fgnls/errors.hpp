#pragma once

#include <stdexcept>
#include <string>

namespace fgnls {

// Base class for all library failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- surface ---
struct OverlappingCuts : Error { using Error::Error; };
struct NonPositiveBandHeight : Error { using Error::Error; };
struct OrderingViolation : Error { using Error::Error; };
struct DuplicateBranchPoint : Error { using Error::Error; };
struct OnBranchCut : Error { using Error::Error; };
struct RootFindingFailure : Error { using Error::Error; };

// --- quadrature ---
struct QuadratureNonConvergence : Error { using Error::Error; };
struct PathCrossesCut : Error { using Error::Error; };

// --- periods ---
struct SingularAMatrix : Error { using Error::Error; };
struct TailNotConverged : Error { using Error::Error; };
struct SingularNormalizationSystem : Error { using Error::Error; };

// --- theta ---
struct TruncationOverflow : Error { using Error::Error; };

// --- amplitude ---
struct ThetaZeroDenominator : Error { using Error::Error; };
struct SingularLInfinity : Error { using Error::Error; };
struct FitNonConvergence : Error { using Error::Error; };

}  // namespace fgnls

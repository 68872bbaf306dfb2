#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rsel/core_state.hpp"
#include "rsel/special_functions.hpp"

namespace rsel {

enum class MeasureKind { APCS_B, AEOC_B, APCS_S };

std::string_view to_string(MeasureKind kind);

// Everything a measure depends on: per-design (count, mean, variance) and the
// design treated as best. Built from sample estimates, or from true means and
// variances (oracle mode) with the best design still taken from the sample.
struct MeasureInputs {
  std::vector<DesignMoments> designs;
  std::size_t best = 0;
};

MeasureInputs sample_inputs(const AllocationState& state);
MeasureInputs oracle_inputs(const AllocationState& state, std::span<const double> true_means,
                            std::span<const double> true_sds);

// APCS-B: 1 - sum_{i != b} Phi_nu(-d). Not clipped; may be negative.
double apcs_b(const MeasureInputs& in);
double apcs_b(const AllocationState& state);

// AEOC-B: sum_{i != b} sqrt(s) Psi_nu(d).
double aeoc_b(const MeasureInputs& in, double nu_floor = kPsiNuFloor);
double aeoc_b(const AllocationState& state, double nu_floor = kPsiNuFloor);

// APCS-S: prod_{i != b} Phi_nu(d), accumulated in log space.
double apcs_s(const MeasureInputs& in);
double apcs_s(const AllocationState& state);

double measure_value(MeasureKind kind, const MeasureInputs& in, double nu_floor = kPsiNuFloor);

// Entry j is the gain in the measure when design j receives one more sample:
// lookahead - current for APCS-B / APCS-S, current - lookahead for AEOC-B.
struct ImprovementVector {
  std::vector<double> values;
};

// Improvements expressed as values * exp(log_scale). The scaled values keep
// their relative size even when the true improvements underflow, so the
// argmax stays meaningful deep into the tails.
struct ScaledImprovements {
  std::vector<double> values;
  double log_scale = 0.0;
};

ScaledImprovements scaled_improvements(MeasureKind kind, const MeasureInputs& in,
                                       double nu_floor = kPsiNuFloor);

ImprovementVector improvements(MeasureKind kind, const MeasureInputs& in,
                               double nu_floor = kPsiNuFloor);
ImprovementVector improvements(MeasureKind kind, const AllocationState& state,
                               double nu_floor = kPsiNuFloor);

}  // namespace rsel

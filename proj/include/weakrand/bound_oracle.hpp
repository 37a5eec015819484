#pragma once

// Brute-force checks of the phase-error bounds. Every grid point is turned
// into a density matrix with quantum_core and its Bell-basis error rates are
// compared against the closed-form bound.

#include <cstddef>
#include <string>

#include "weakrand/keyrate.hpp"
#include "weakrand/quantum_core.hpp"

namespace weakrand {

inline constexpr double kViolationTol = 1e-9;

struct OracleGridPoint {
    PauliChannel channel;
    double p_x0 = 0.5;  // p(x0 = 0 | λ0)
    double p_z = 0.5;   // p(x1 = 0 | λ1); unused by the cross-basis check
};

enum class CrossRelation {
    RecPhaseVsDiaBit,  // |e_phase(ρ_Z) − e_bit(ρ_X)|
    DiaPhaseVsRecBit,  // |e_phase(ρ_X) − e_bit(ρ_Z)|
};

std::string to_string(CrossRelation r);

struct OracleReport {
    double bound = 0.0;
    double max_difference = 0.0;  // largest difference found on the grid
    /// max_difference − bound − kViolationTol; positive means the bound failed.
    double max_violation = 0.0;
    /// bound − max_difference.
    double tightness_gap = 0.0;
    OracleGridPoint max_gap_location;
    CrossRelation relation = CrossRelation::RecPhaseVsDiaBit;  // cross-basis reports only
    std::size_t points_checked = 0;

    bool passed() const { return max_violation <= 0.0; }
};

/// e_phase − e_bit of apply_channel(build_source_state(p_x0), channel, p_z).
double one_step_difference(const OracleGridPoint& point);

/// Absolute cross-basis difference at a point, computed from ρ_Z = apply_channel(·, ·, 1)
/// and ρ_X = apply_channel(·, ·, 0).
double cross_basis_difference(const OracleGridPoint& point, CrossRelation relation);

/// Enumerates channels q = (a,b,c,d)/grid_res with a+b+c+d = grid_res,
/// p(x0=0|λ0) and p(x1=0|λ1) over grid_res evenly spaced values covering
/// their ε bands (endpoints included), and compares max(e_phase − e_bit)
/// with one_step_delta(dev). grid_res must be >= 3.
OracleReport verify_one_step_bound(const DeviationParams& dev, int grid_res);

/// Same enumeration over channels and p(x0=0|λ0); compares both cross-basis
/// differences against cross_basis_gap(eps0).
OracleReport verify_cross_basis_bound(double eps0, int grid_res);

}  // namespace weakrand

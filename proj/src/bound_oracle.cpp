#include "weakrand/bound_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "weakrand/errors.hpp"

namespace weakrand {

namespace {

// grid_res evenly spaced values over [1/2 − eps, 1/2 + eps] ∩ [0, 1]; both
// endpoints are always present. For eps = 0 every value is 1/2.
std::vector<double> band_grid(double eps, int grid_res) {
    const double lo = std::max(0.0, 0.5 - eps);
    const double hi = std::min(1.0, 0.5 + eps);
    std::vector<double> out(static_cast<std::size_t>(grid_res));
    for (int k = 0; k < grid_res; ++k) {
        out[static_cast<std::size_t>(k)] =
            (k == grid_res - 1) ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_res - 1);
    }
    return out;
}

// Error rates of the unit channels X^u Z^v for a fixed source, in both
// preparation bases. error_rates(apply_channel(src, q, p_z)) is linear in q
// and p_z, so any grid point is a weighted sum of these eight entries.
struct UnitChannelRates {
    std::array<std::array<ErrorRatePair, 2>, 2> rec;  // p_z = 1
    std::array<std::array<ErrorRatePair, 2>, 2> dia;  // p_z = 0
};

UnitChannelRates unit_channel_rates(double p_x0) {
    const TwoQubitState src = build_source_state(p_x0);
    UnitChannelRates out;
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            out.rec[u][v] = error_rates(apply_channel(src, PauliChannel::unit(u, v), 1.0));
            out.dia[u][v] = error_rates(apply_channel(src, PauliChannel::unit(u, v), 0.0));
        }
    }
    return out;
}

ErrorRatePair combine(const std::array<std::array<ErrorRatePair, 2>, 2>& unit, const PauliChannel& ch) {
    ErrorRatePair out;
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            out.e_bit += ch.weight(u, v) * unit[u][v].e_bit;
            out.e_phase += ch.weight(u, v) * unit[u][v].e_phase;
        }
    }
    return out;
}

// Calls fn(channel) for every q = (a, b, c, d)/n with a + b + c + d = n.
template <typename Fn>
void for_each_simplex_point(int n, Fn&& fn) {
    const double dn = static_cast<double>(n);
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; a + b <= n; ++b) {
            for (int c = 0; a + b + c <= n; ++c) {
                const int d = n - a - b - c;
                fn(PauliChannel{a / dn, b / dn, c / dn, d / dn});
            }
        }
    }
}

void check_grid_res(int grid_res) {
    if (grid_res < 3) throw ValidationError("oracle: grid_res must be >= 3, got " + std::to_string(grid_res));
}

void finish(OracleReport& r) {
    r.max_violation = r.max_difference - r.bound - kViolationTol;
    r.tightness_gap = r.bound - r.max_difference;
}

}  // namespace

std::string to_string(CrossRelation r) {
    return r == CrossRelation::RecPhaseVsDiaBit ? "rec_phase_vs_dia_bit" : "dia_phase_vs_rec_bit";
}

double one_step_difference(const OracleGridPoint& point) {
    const ErrorRatePair e = error_rates(apply_channel(build_source_state(point.p_x0), point.channel, point.p_z));
    return e.e_phase - e.e_bit;
}

double cross_basis_difference(const OracleGridPoint& point, CrossRelation relation) {
    const TwoQubitState src = build_source_state(point.p_x0);
    const ErrorRatePair z = error_rates(apply_channel(src, point.channel, 1.0));
    const ErrorRatePair x = error_rates(apply_channel(src, point.channel, 0.0));
    return relation == CrossRelation::RecPhaseVsDiaBit ? std::abs(z.e_phase - x.e_bit)
                                                       : std::abs(x.e_phase - z.e_bit);
}

OracleReport verify_one_step_bound(const DeviationParams& dev, int grid_res) {
    check_grid_res(grid_res);
    dev.validate();

    OracleReport report;
    report.bound = one_step_delta(dev);
    report.max_difference = -std::numeric_limits<double>::infinity();

    const std::vector<double> p0_grid = band_grid(dev.eps0, grid_res);
    const std::vector<double> pz_grid = band_grid(dev.eps1, grid_res);

    for (double p0 : p0_grid) {
        const UnitChannelRates unit = unit_channel_rates(p0);
        for_each_simplex_point(grid_res, [&](const PauliChannel& ch) {
            const ErrorRatePair rec = combine(unit.rec, ch);
            const ErrorRatePair dia = combine(unit.dia, ch);
            for (double pz : pz_grid) {
                const double diff = pz * (rec.e_phase - rec.e_bit) + (1.0 - pz) * (dia.e_phase - dia.e_bit);
                ++report.points_checked;
                if (diff > report.max_difference) {
                    report.max_difference = diff;
                    report.max_gap_location = {ch, p0, pz};
                }
            }
        });
    }
    finish(report);
    return report;
}

OracleReport verify_cross_basis_bound(double eps0, int grid_res) {
    check_grid_res(grid_res);
    DeviationParams{eps0, 0.0}.validate();

    OracleReport report;
    report.bound = cross_basis_gap(eps0);
    report.max_difference = -std::numeric_limits<double>::infinity();

    for (double p0 : band_grid(eps0, grid_res)) {
        const UnitChannelRates unit = unit_channel_rates(p0);
        for_each_simplex_point(grid_res, [&](const PauliChannel& ch) {
            const ErrorRatePair z = combine(unit.rec, ch);
            const ErrorRatePair x = combine(unit.dia, ch);
            const double diffs[2] = {std::abs(z.e_phase - x.e_bit), std::abs(x.e_phase - z.e_bit)};
            ++report.points_checked;
            for (int k = 0; k < 2; ++k) {
                if (diffs[k] > report.max_difference) {
                    report.max_difference = diffs[k];
                    report.max_gap_location = {ch, p0, 0.5};
                    report.relation = k == 0 ? CrossRelation::RecPhaseVsDiaBit : CrossRelation::DiaPhaseVsRecBit;
                }
            }
        });
    }
    finish(report);
    return report;
}

}  // namespace weakrand

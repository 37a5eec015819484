#include "weakrand/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "weakrand/errors.hpp"
#include "weakrand/rng.hpp"

namespace weakrand {

namespace {

struct Candidate {
    double value;
    std::vector<double> point;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value < b.value;
    return std::lexicographical_compare(a.point.begin(), a.point.end(), b.point.begin(), b.point.end());
}

// Objective restricted to the free axes of the box, with evaluation counting
// and projection onto the box.
class ReducedProblem {
public:
    ReducedProblem(const Objective& f, std::span<const Interval> bounds, SolverReport& report)
        : f_(f), bounds_(bounds.begin(), bounds.end()), report_(report) {
        full_.resize(bounds_.size());
        for (std::size_t i = 0; i < bounds_.size(); ++i) {
            full_[i] = bounds_[i].lower;
            if (bounds_[i].width() > 0.0) free_.push_back(i);
        }
    }

    std::size_t dim() const { return free_.size(); }
    const Interval& axis(std::size_t k) const { return bounds_[free_[k]]; }

    void project(std::vector<double>& y) const {
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = std::clamp(y[k], axis(k).lower, axis(k).upper);
    }

    std::vector<double> expand(const std::vector<double>& y) const {
        std::vector<double> x = full_;
        for (std::size_t k = 0; k < free_.size(); ++k) x[free_[k]] = y[k];
        return x;
    }

    double operator()(const std::vector<double>& y) {
        ++report_.evaluations;
        const std::vector<double> x = expand(y);
        return f_(std::span<const double>(x));
    }

private:
    const Objective& f_;
    std::vector<Interval> bounds_;
    std::vector<double> full_;
    std::vector<std::size_t> free_;
    SolverReport& report_;
};

// Box-projected Nelder-Mead from y0 with per-axis initial steps.
Candidate nelder_mead(ReducedProblem& f, std::vector<double> y0, const std::vector<double>& steps,
                      const SolverOptions& opts, SolverReport& report) {
    const std::size_t n = f.dim();
    f.project(y0);

    std::vector<Candidate> simplex;
    simplex.reserve(n + 1);
    simplex.push_back({f(y0), y0});
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> y = y0;
        const Interval& ax = f.axis(k);
        y[k] = (y0[k] + steps[k] <= ax.upper) ? y0[k] + steps[k] : y0[k] - steps[k];
        f.project(y);
        simplex.push_back({f(y), y});
    }

    auto trial = [&](const std::vector<double>& centroid, const std::vector<double>& from, double coef) {
        std::vector<double> y(n);
        for (std::size_t k = 0; k < n; ++k) y[k] = centroid[k] + coef * (from[k] - centroid[k]);
        f.project(y);
        return Candidate{f(y), std::move(y)};
    };

    for (int it = 0; it < opts.max_iterations; ++it) {
        std::sort(simplex.begin(), simplex.end(), better);

        const double f_spread = simplex.back().value - simplex.front().value;
        double diameter = 0.0;
        for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t k = 0; k < n; ++k) {
                diameter = std::max(diameter, std::abs(simplex[v].point[k] - simplex[0].point[k]));
            }
        }
        if (f_spread <= opts.f_tol && diameter <= opts.x_tol) break;
        ++report.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[v].point[k] / static_cast<double>(n);
        }
        Candidate& worst = simplex.back();

        Candidate reflected = trial(centroid, worst.point, -1.0);
        if (better(reflected, simplex.front())) {
            Candidate expanded = trial(centroid, worst.point, -2.0);
            worst = better(expanded, reflected) ? std::move(expanded) : std::move(reflected);
            continue;
        }
        if (better(reflected, simplex[n - 1])) {
            worst = std::move(reflected);
            continue;
        }
        const bool outside = better(reflected, worst);
        Candidate contracted = outside ? trial(centroid, reflected.point, 0.5) : trial(centroid, worst.point, 0.5);
        if (better(contracted, outside ? reflected : worst)) {
            worst = std::move(contracted);
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t v = 1; v <= n; ++v) {
            std::vector<double> y(n);
            for (std::size_t k = 0; k < n; ++k) {
                y[k] = simplex[0].point[k] + 0.5 * (simplex[v].point[k] - simplex[0].point[k]);
            }
            simplex[v] = {f(y), std::move(y)};
        }
    }
    std::sort(simplex.begin(), simplex.end(), better);
    return simplex.front();
}

}  // namespace

void SolverOptions::validate() const {
    if (grid_points < 1) throw ValidationError("solver: grid_points must be >= 1");
    if (refine_starts < 0 || random_starts < 0 || max_restarts < 0) {
        throw ValidationError("solver: start and restart counts must be non-negative");
    }
    if (max_iterations < 1) throw ValidationError("solver: max_iterations must be >= 1");
    if (!(f_tol > 0.0) || !(x_tol > 0.0)) throw ValidationError("solver: tolerances must be positive");
}

BoxMinimum minimize_box(const Objective& objective, std::span<const Interval> bounds, const SolverOptions& opts) {
    opts.validate();
    if (bounds.empty()) throw ValidationError("minimize_box: at least one axis is required");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const Interval& b = bounds[i];
        if (!std::isfinite(b.lower) || !std::isfinite(b.upper)) {
            throw ValidationError("minimize_box: bounds of axis " + std::to_string(i) + " must be finite");
        }
        if (b.lower > b.upper) {
            throw ValidationError("minimize_box: empty box on axis " + std::to_string(i));
        }
    }

    BoxMinimum out;
    SolverReport& report = out.report;
    ReducedProblem f(objective, bounds, report);
    const std::size_t n = f.dim();

    if (n == 0) {
        out.point = f.expand({});
        out.value = f({});
        report.best_trace.push_back(out.value);
        return out;
    }

    // Grid phase.
    const std::size_t g = static_cast<std::size_t>(opts.grid_points);
    auto grid_coord = [&](std::size_t k, std::size_t idx) {
        const Interval& ax = f.axis(k);
        if (g == 1) return 0.5 * (ax.lower + ax.upper);
        if (idx == g - 1) return ax.upper;
        return ax.lower + ax.width() * static_cast<double>(idx) / static_cast<double>(g - 1);
    };
    std::size_t cells = 1;
    for (std::size_t k = 0; k < n; ++k) cells *= g;

    std::vector<Candidate> grid;
    grid.reserve(cells);
    std::vector<std::size_t> digits(n, 0);
    for (std::size_t c = 0; c < cells; ++c) {
        std::vector<double> y(n);
        for (std::size_t k = 0; k < n; ++k) y[k] = grid_coord(k, digits[k]);
        const double v = f(y);
        grid.push_back({v, std::move(y)});
        for (std::size_t k = n; k-- > 0;) {
            if (++digits[k] < g) break;
            digits[k] = 0;
        }
    }
    const std::size_t keep = std::min<std::size_t>(grid.size(), static_cast<std::size_t>(opts.refine_starts));
    std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(keep, 1)),
                      grid.end(), better);
    Candidate best = grid.front();
    report.best_trace.push_back(best.value);

    std::vector<std::vector<double>> starts;
    for (std::size_t s = 0; s < keep; ++s) starts.push_back(grid[s].point);
    SplitMix64 rng(opts.seed);
    for (int s = 0; s < opts.random_starts; ++s) {
        std::vector<double> y(n);
        for (std::size_t k = 0; k < n; ++k) y[k] = f.axis(k).lower + f.axis(k).width() * rng.uniform();
        starts.push_back(std::move(y));
    }

    std::vector<double> steps(n);
    for (std::size_t k = 0; k < n; ++k) {
        steps[k] = g > 1 ? 0.5 * f.axis(k).width() / static_cast<double>(g - 1) : 0.25 * f.axis(k).width();
    }

    for (const auto& start : starts) {
        ++report.starts;
        Candidate local = nelder_mead(f, start, steps, opts, report);
        for (int r = 0; r < opts.max_restarts; ++r) {
            Candidate again = nelder_mead(f, local.point, steps, opts, report);
            ++report.restarts;
            const bool improved = local.value - again.value > opts.f_tol;
            if (better(again, local)) local = std::move(again);
            if (!improved) break;
        }
        if (better(local, best)) best = std::move(local);
        report.best_trace.push_back(best.value);
    }

    out.point = f.expand(best.point);
    out.value = best.value;
    return out;
}

}  // namespace weakrand

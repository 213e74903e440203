#pragma once

#include <cmath>
#include <vector>

#include "fracsource/errors.hpp"

namespace fracsource::mesh {

// Graded spatial mesh x_i = (i h)^g, h = 1/N: nodes cluster toward x = 0
// where the solution carries the x^{beta-1} singularity.
struct SpatialMesh {
    int n_cells = 0;
    double grading_exponent = 1.0;
    std::vector<double> nodes;

    SpatialMesh() = default;
    SpatialMesh(int N, double g) : n_cells(N), grading_exponent(g) {
        if (N < 2) throw ValidationError("SpatialMesh: need at least 2 cells");
        if (!(g >= 1.0)) throw ValidationError("SpatialMesh: grading exponent must be >= 1");
        nodes.resize(static_cast<size_t>(N) + 1);
        for (int i = 0; i <= N; ++i) {
            nodes[static_cast<size_t>(i)] = std::pow(static_cast<double>(i) / N, g);
        }
        nodes.front() = 0.0;
        nodes.back() = 1.0;
    }

    int n_interior() const { return n_cells - 1; }
    double h(int cell) const { return nodes[static_cast<size_t>(cell)] - nodes[static_cast<size_t>(cell) - 1]; }
};

struct TimeGrid {
    int n_steps = 0;
    double tau = 0.0;

    TimeGrid() = default;
    TimeGrid(int steps, double dt) : n_steps(steps), tau(dt) {
        if (steps < 1) throw ValidationError("TimeGrid: need at least one step");
        if (!(dt > 0.0)) throw ValidationError("TimeGrid: tau must be positive");
    }

    double t(int k) const { return k * tau; }
    double T() const { return n_steps * tau; }
    int samples() const { return n_steps + 1; }
};

// Trapezoidal weights on the mesh nodes; the discrete L2 inner product uses
// them so the graded clustering near x = 0 does not skew norms.
inline std::vector<double> trapezoid_weights(const SpatialMesh& m) {
    std::vector<double> w(m.nodes.size(), 0.0);
    for (int c = 1; c <= m.n_cells; ++c) {
        double half = 0.5 * m.h(c);
        w[static_cast<size_t>(c) - 1] += half;
        w[static_cast<size_t>(c)] += half;
    }
    return w;
}

inline double weighted_l2(const std::vector<double>& values, const std::vector<double>& weights) {
    double acc = 0.0;
    for (size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i] * values[i];
    return std::sqrt(acc);
}

} // namespace fracsource::mesh

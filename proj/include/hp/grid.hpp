#pragma once

#include "hp/types.hpp"

#include <cstddef>
#include <vector>

namespace hp {

/// Periodic tangential grid on the torus [0, L)^{n-1} with N modes per axis.
/// Frequencies are xi_k = 2 pi k / L in FFT order (k = 0..N/2-1, -N/2..-1).
/// For n = 1 there are no tangential axes and a single node with xi' = ().
struct TangentialGrid {
    int axes = 1;
    int modes = 1;
    double length = 2.0 * pi;

    static TangentialGrid make(int axes, int modes, double length);

    std::size_t size() const;
    double frequency_1d(int k) const;
    std::vector<double> frequency(std::size_t index) const;
    double frequency_norm(std::size_t index) const;
    /// Flat index of the integer mode vector (entries may be negative).
    std::size_t index_of(const std::vector<int>& mode) const;
    std::vector<int> shape() const;
    double cell_volume() const;
    double volume() const;
};

/// Geometric normal grid x_i = x_min ratio^i up to x_max, optionally with a
/// leading x = 0 node that carries no quadrature weight.
struct NormalGrid {
    std::vector<double> nodes;
    bool has_zero = false;
    double x_min = 1e-6;
    double ratio = 1.1;

    static NormalGrid graded(double x_min, double ratio, double x_max, bool include_zero = false);
    /// Explicit node list, used for evaluation only (no quadrature).
    static NormalGrid points(std::vector<double> xs);

    std::size_t size() const { return nodes.size(); }
    double x_max() const { return nodes.back(); }
    std::size_t first_positive() const { return has_zero ? 1 : 0; }

    /// Weights w_i with sum_i w_i f(x_i) ~ int_0^inf f(x) x^r dx for f smooth
    /// at 0 and negligible beyond x_max: trapezoid in log x plus an analytic
    /// head correction on (0, x_min). Requires r > -1 and a graded grid.
    std::vector<double> weights(double r) const;
};

enum class Layout { Frequency, Space };

/// Complex samples with one row per tangential node (flattened, last axis
/// fastest) and one column per normal node.
struct GridFunction {
    CMatrix values;
    Layout layout = Layout::Frequency;
};

struct GridSpec {
    TangentialGrid tangential;
    NormalGrid normal;
};

} // namespace hp

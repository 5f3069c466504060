#include "hp/grid.hpp"

#include "hp/error.hpp"

#include <cmath>

namespace hp {

TangentialGrid TangentialGrid::make(int axes, int modes, double length) {
    require(axes >= 0, "tangential grid: axes must be >= 0");
    require(length > 0.0, "tangential grid: torus length must be positive");
    require(modes >= 1 && (modes & (modes - 1)) == 0, "tangential grid: modes must be a power of two");
    TangentialGrid g;
    g.axes = axes;
    g.modes = axes == 0 ? 1 : modes;
    g.length = length;
    return g;
}

std::size_t TangentialGrid::size() const {
    std::size_t s = 1;
    for (int a = 0; a < axes; ++a) s *= static_cast<std::size_t>(modes);
    return s;
}

double TangentialGrid::frequency_1d(int k) const {
    const int signed_k = k < modes / 2 ? k : k - modes;
    return 2.0 * pi * signed_k / length;
}

std::vector<double> TangentialGrid::frequency(std::size_t index) const {
    std::vector<double> xi(static_cast<std::size_t>(axes));
    for (int a = axes - 1; a >= 0; --a) {
        xi[static_cast<std::size_t>(a)] = frequency_1d(static_cast<int>(index % modes));
        index /= static_cast<std::size_t>(modes);
    }
    return xi;
}

double TangentialGrid::frequency_norm(std::size_t index) const {
    double s = 0.0;
    for (double v : frequency(index)) s += v * v;
    return std::sqrt(s);
}

std::size_t TangentialGrid::index_of(const std::vector<int>& mode) const {
    require(static_cast<int>(mode.size()) == axes, "tangential grid: mode vector has wrong length");
    std::size_t idx = 0;
    for (int k : mode) {
        require(k >= -modes / 2 && k < modes / 2, "tangential grid: mode outside the grid");
        idx = idx * static_cast<std::size_t>(modes) + static_cast<std::size_t>(k < 0 ? k + modes : k);
    }
    return idx;
}

std::vector<int> TangentialGrid::shape() const { return std::vector<int>(static_cast<std::size_t>(axes), modes); }

double TangentialGrid::cell_volume() const { return std::pow(length / modes, axes); }

double TangentialGrid::volume() const { return std::pow(length, axes); }

NormalGrid NormalGrid::graded(double x_min, double ratio, double x_max, bool include_zero) {
    require(x_min > 0.0, "normal grid: x_min must be positive");
    require(ratio > 1.0, "normal grid: ratio must exceed 1");
    require(x_max > x_min, "normal grid: x_max must exceed x_min");
    NormalGrid g;
    g.x_min = x_min;
    g.ratio = ratio;
    g.has_zero = include_zero;
    if (include_zero) g.nodes.push_back(0.0);
    const int count = static_cast<int>(std::ceil(std::log(x_max / x_min) / std::log(ratio))) + 1;
    for (int i = 0; i < count; ++i) g.nodes.push_back(x_min * std::pow(ratio, i));
    return g;
}

NormalGrid NormalGrid::points(std::vector<double> xs) {
    require(!xs.empty(), "normal grid: empty node list");
    for (double x : xs) require(x >= 0.0, "normal grid: nodes must be >= 0");
    NormalGrid g;
    g.nodes = std::move(xs);
    g.x_min = 0.0;
    g.ratio = 0.0;
    return g;
}

std::vector<double> NormalGrid::weights(double r) const {
    require(r > -1.0, "weighted quadrature requires r > -1");
    require(ratio > 1.0, "quadrature weights need a graded grid");
    const double h = std::log(ratio);
    const std::size_t first = first_positive();
    std::vector<double> w(nodes.size(), 0.0);
    for (std::size_t i = first; i < nodes.size(); ++i) w[i] = h * std::pow(nodes[i], 1.0 + r);
    w[first] *= 0.5;
    w.back() *= 0.5;
    // Near x_min the integrand in u = log x behaves like f(0) e^{(1+r)u}:
    // exact head plus the Euler-Maclaurin endpoint terms of the trapezoid.
    const double a = 1.0 + r;
    const double head = std::pow(nodes[first], a);
    w[first] += head * (1.0 / a + h * h * a / 12.0 - std::pow(h, 4) * a * a * a / 720.0);
    return w;
}

} // namespace hp

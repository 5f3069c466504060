#pragma once

#include "hp/grid.hpp"
#include "hp/model.hpp"
#include "hp/resolvent.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hp {

/// Periodic time grid t_i = i T_per / N_t on [0, T_per).
struct TimeGrid {
    int samples = 64;
    double period = 1.0;

    static TimeGrid make(int samples, double period);
    double t(int i) const { return i * period / samples; }
    /// Angular frequencies tau_k in FFT order.
    std::vector<double> frequencies() const;
};

/// Boundary data g_j(t, x'): one matrix per boundary operator with rows on the
/// time grid and columns on the tangential frequency grid.
using BoundarySeries = std::vector<CMatrix>;

/// Solution of the time-Fourier route: one tangential-frequency grid function
/// per time sample.
struct SpaceTime {
    std::vector<double> times;
    std::vector<GridFunction> slices;
};

/// Solves d_t u + sigma u - A(D) u = 0 on the time torus with B_j u = g_j:
/// u = sum_j F_t^{-1} Poi_j(sigma + i tau) F_t g_j.
SpaceTime parabolic_boundary_solve(const ModelProblem& problem, const BoundarySeries& g, double sigma,
                                   const TimeGrid& time, const TangentialGrid& tgrid, const NormalGrid& ngrid);

/// Same solution evaluated at arbitrary times through the trigonometric
/// interpolant of the time-Fourier representation.
SpaceTime parabolic_boundary_eval(const ModelProblem& problem, const BoundarySeries& g, double sigma,
                                  const TimeGrid& time, const TangentialGrid& tgrid, const NormalGrid& ngrid,
                                  const std::vector<double>& times);

struct TemporalSlope {
    std::vector<double> tau;
    std::vector<double> magnitude;
    double slope = 0.0;
    double predicted = 0.0;
};

/// For boundary data with temporal spectrum <tau>^{-l - 1/2} on one tangential
/// mode, |D_n^k u_hat(tau, x_n)| against tau on [tau_lo, tau_hi]; at x_n = 0 the
/// expected slope is -l - 1/2 + (k - m_j) / 2m.
TemporalSlope temporal_band_slope(const ModelProblem& problem, int j, int k, double sigma, double l,
                                  const std::vector<double>& xi_prime, double x_n, double tau_lo, double tau_hi,
                                  int points = 40);

/// Data of the initial-boundary value problem d_t u - A(D) u = f, B_j u = g_j
/// on (0, T], u(0) = u0, all on the uniform half-line in tangential frequency
/// layout. Empty callables mean zero data.
struct IbvpData {
    GridFunction u0;
    std::function<GridFunction(double)> forcing;
    std::function<std::vector<CVector>(double)> boundary; // one vector per j
};

struct IbvpOptions {
    double T = 1.0;
    double sigma = 1.0;
    int time_samples = 256;     // torus samples for the boundary part
    int gauss_per_unit = 16;    // Duhamel nodes per unit time
    ContourOptions contour;
    std::vector<double> output_times; // in (0, T]
};

struct IbvpResult {
    std::vector<double> times;
    std::vector<GridFunction> u;
    /// max_j |tr B_j u0 - g_j(0)| over the tangential nodes.
    double compatibility_defect = 0.0;
    bool compatibility_warning = false;

    /// Columns: t, x_n, mode, re, im (mode is the flat tangential index).
    std::string to_csv(const HalfLine& line) const;
};

/// Splitting solver: u = e^{sigma t} v1 + T(t)[u0 - v1(0)] + int_0^t T(t - s) f(s) ds
/// where v1 solves the torus problem with data e^{-sigma t} g extended from
/// [0, T] by reflection and a smooth taper.
IbvpResult ibvp_solve(const ModelProblem& problem, const IbvpData& data, const TangentialGrid& tgrid,
                      const HalfLine& line, const IbvpOptions& options);

/// Extends a function on [0, T] to the torus of period 3T, sampled at
/// t_i = 3T i / samples: the values on (T, 2T) and [2T, 3T) are reflections
/// about T and 0 matching two derivatives, tapered to zero in between.
std::vector<Complex> extend_time_series(const std::function<Complex(double)>& g, double T, int samples);

} // namespace hp

#pragma once

#include <Eigen/Dense>

#include "rfh/spectrum.hpp"

namespace rfh {

using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Spectral-coefficient representation of z = (u, v) in E_s over the
/// truncated D-eigenbasis. Coefficient i belongs to the mode spec.modes[i].
struct PairField {
    VectorXcd u;
    VectorXcd v;
    double s = 0.5;

    static PairField zero(const Spectrum& spec, double s);
};

/// Point of the extended space E = E_s x R.
struct ExtendedPoint {
    PairField z;
    double lambda = 0.0;
};

/// Samples of (u, v) on the uniform circle grid t_m = m / num_points.
struct GridSampling {
    int num_points = 0;
    VectorXcd u;
    VectorXcd v;
};

double l2_norm_sq(const PairField& z);
double es_norm_sq(const Spectrum& spec, const PairField& z);

/// Real part of the Hermitian L^2 product.
double l2_inner(const PairField& a, const PairField& b);
/// E_s inner product induced by |D|^s on u and |D|^{1-s} on v.
double es_inner(const Spectrum& spec, const PairField& a, const PairField& b);
/// Inner product of E = E_s x R (sum of the E_s product and lambda product).
double e_inner(const Spectrum& spec, const ExtendedPoint& a, const ExtendedPoint& b);
double e_norm(const Spectrum& spec, const ExtendedPoint& a);

/// Coefficientwise |D|^r: a_k -> |lambda_k|^r a_k.
VectorXcd fractional_power_apply(const Spectrum& spec, const VectorXcd& coeffs, double r);

/// D_s = diag(|D|^{-2s}, |D|^{-2(1-s)}).
PairField ds_apply(const Spectrum& spec, const PairField& z);

/// L(u, v) = (Dv, Du) in coefficients.
PairField l_apply(const Spectrum& spec, const PairField& z);

/// Projections P+- = 1/2 [[I, +-|D|^{-2s}D], [+-|D|^{-2(1-s)}D, I]] onto the
/// eigenspaces of D_s L, which split E_s = E+ (+) E-.
PairField p_plus_apply(const Spectrum& spec, const PairField& z);
PairField p_minus_apply(const Spectrum& spec, const PairField& z);

/// Evaluates a band-limited field on the uniform circle grid (circle model
/// only). Throws DomainError if num_points < 2 * spec.num_modes.
GridSampling to_grid(const Spectrum& spec, const PairField& z, int num_points);

/// Projects grid samples back onto the truncated eigenbasis by exact
/// trapezoid quadrature of the twisted Fourier coefficients.
PairField from_grid(const Spectrum& spec, const GridSampling& grid, double s);

/// Trapezoid quadrature over the circle of pointwise values (exact for
/// trigonometric polynomials resolved by the grid).
double grid_quadrature(const Eigen::VectorXd& values);

}  // namespace rfh

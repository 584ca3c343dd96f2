#pragma once

#include "rfh/nonlinearity.hpp"

namespace rfh {

/// Everything needed to evaluate A_H: spectrum, fractional exponent s, the
/// nonlinearity and the quadrature grid resolution. The grid defaults to 4x
/// oversampling of the band to control aliasing of power nonlinearities.
struct FunctionalContext {
    Spectrum spectrum;
    double s = 0.5;
    NonlinearitySpec nonlin;
    int grid_points = 0;

    FunctionalContext(Spectrum spec, double s_, NonlinearitySpec nl, int grid = 0);

    int effective_grid() const { return grid_points; }
};

/// Real E-orthonormal coordinates of the truncation: each complex D-mode
/// contributes two u-directions (scaled by |lambda|^{-s}) and two
/// v-directions (scaled by |lambda|^{-(1-s)}); the last coordinate is lambda.
/// In these coordinates the E inner product is the Euclidean dot product.
struct EBasis {
    const FunctionalContext* ctx;

    explicit EBasis(const FunctionalContext& c) : ctx(&c) {}

    int dim() const { return 4 * ctx->spectrum.mode_count() + 1; }
    VectorXd to_coords(const ExtendedPoint& w) const;
    ExtendedPoint from_coords(const VectorXd& x) const;
    /// i-th basis vector as an ExtendedPoint.
    ExtendedPoint unit(int i) const;
};

/// Symmetric bilinear form h(xi, eta) = (Hess A_H xi, eta)_E expressed in the
/// E-orthonormal basis above.
struct HessianForm {
    Eigen::MatrixXd matrix;
    double kernel_tolerance = 1e-8;
};

/// A_H(z, lambda) = (Lz, z)_{L^2}/2 - lambda (\int H - 1).
double action(const FunctionalContext& ctx, const ExtendedPoint& w);

/// The unconstrained functional L_H(z) = \int (<Du, v> - H) dx.
double action_unconstrained(const FunctionalContext& ctx, const PairField& z);

/// Gradient of A_H with respect to the E metric:
/// (D_s{Lz - lambda H_z}, -\int(H - 1) dx).
ExtendedPoint gradient(const FunctionalContext& ctx, const ExtendedPoint& w);

/// Hessian operator applied to a tangent vector.
ExtendedPoint hessian_apply(const FunctionalContext& ctx, const ExtendedPoint& w,
                            const ExtendedPoint& xi);

HessianForm hessian_form(const FunctionalContext& ctx, const ExtendedPoint& w);

/// Reference operator A = D_s L (+) Id_R as a form in the same basis;
/// diagonalizable with eigenvalues +-1 and +1 on the lambda direction.
HessianForm reference_operator(const FunctionalContext& ctx);

/// Negative-eigenvalue count of a symmetric form, excluding the kernel
/// (|mu| < kernel_tolerance).
int negative_count(const HessianForm& form);
/// Kernel dimension (|mu| < kernel_tolerance).
int kernel_dim(const HessianForm& form);

}  // namespace rfh

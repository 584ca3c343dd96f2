#pragma once

#include "rfh/functional.hpp"

namespace rfh {

/// Finite-rank operator K w = sum_i (w, x_i)_E y_i, symmetric with respect
/// to the E inner product.
struct FiniteRankOperator {
    struct Term {
        ExtendedPoint left;   // y_i
        ExtendedPoint right;  // x_i
    };
    std::vector<Term> terms;

    ExtendedPoint apply(const FunctionalContext& ctx, const ExtendedPoint& w) const;
    /// Upper bound sum_i ||y_i|| ||x_i|| on the operator norm.
    double norm_bound(const FunctionalContext& ctx) const;
    bool empty() const { return terms.empty(); }
};

/// Finite-rank symmetric operator with K(x) = y: rank one
/// K w = (w,y) y / (x,y) when (x,y) != 0, otherwise the two-term formula
/// through an auxiliary direction xi with (x, xi) != 0.
FiniteRankOperator make_hitting_operator(const FunctionalContext& ctx,
                                         const ExtendedPoint& x, const ExtendedPoint& y);

/// State-dependent perturbation K(w) = factor(w) * k0 with
/// factor = rho(||w - w0||) and optionally the global Gaussian e^{-||w||^2}.
/// rho(t) = exp(-1/(1-t^2)) for t < 1 and 0 otherwise.
struct PerturbationMap {
    FiniteRankOperator k0;
    ExtendedPoint center;       // w0
    bool use_bump = true;       // rho profile around w0
    bool use_gaussian = false;  // e^{-||w||^2} factor

    double profile_factor(const FunctionalContext& ctx, const ExtendedPoint& w) const;
    /// K(w) xi at the state w.
    ExtendedPoint apply(const FunctionalContext& ctx, const ExtendedPoint& w,
                        const ExtendedPoint& xi) const;
    /// sup_w of the operator-norm upper bound; must stay below 1/2.
    double operator_norm_bound(const FunctionalContext& ctx) const;
};

double bump_profile(double t);

/// (I + K(w)) grad A_H(w). Throws DomainError if the norm gate
/// operator_norm_bound >= 1/2 fails.
ExtendedPoint perturbed_gradient(const FunctionalContext& ctx, const PerturbationMap& pert,
                                 const ExtendedPoint& w);

/// The perturbed-metric pairing g^K_w(xi, eta) = (xi, (I+K(w))^{-1} eta)_E,
/// evaluated by a dense solve in the truncation basis.
double gk_pairing(const FunctionalContext& ctx, const PerturbationMap& pert,
                  const ExtendedPoint& w, const ExtendedPoint& xi, const ExtendedPoint& eta);

std::string perturbation_to_json(const FunctionalContext& ctx, const PerturbationMap& pert);

}  // namespace rfh

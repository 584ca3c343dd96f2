#pragma once

#include "rfh/functional.hpp"

namespace rfh {

/// Newton failed to reach the residual tolerance; carries diagnostics.
struct NonconvergenceError : std::runtime_error {
    double residual;
    int iterations;
    NonconvergenceError(const std::string& msg, double res, int iters)
        : std::runtime_error(msg), residual(res), iterations(iters) {}
};

struct CriticalPoint {
    ExtendedPoint w;
    double residual = 0.0;   // ||grad A_H||_E
    int kernel_dim = 0;      // numerical Hessian kernel
    int manifold_k = 0;      // H0 component index, 0 if not applicable
    int sphere_dim = -1;     // 2 m_k - 1 for H0 components
};

/// Damped Newton on F(w) = grad A_H(w) with an SVD least-squares step that
/// projects out degenerate directions (S^1 orbit, critical-manifold tangents).
CriticalPoint newton_solve(const FunctionalContext& ctx, const ExtendedPoint& guess,
                           double tol = 1e-11, int max_iter = 50);

/// One connected component of Crit(A_{H0}): the sphere of normalized
/// L-eigenvectors at eigenvalue lambda_k, scaled so \int H0 = 1.
struct CriticalComponent {
    int k = 0;
    double lambda = 0.0;
    int multiplicity = 0;
    int sphere_dim = 0;  // 2 m_k - 1
    std::vector<PairField> eigenvectors;  // L^2-norm sqrt(2), orthogonal
    CriticalPoint rep_minus;  // minimum of the height Morse function
    CriticalPoint rep_plus;   // maximum (antipodal point)
};

/// Critical manifolds of A_{H0} for every L-eigenvalue in the truncation.
std::vector<CriticalComponent> h0_critical_manifolds(const FunctionalContext& ctx);

struct IndexReport {
    struct Row {
        int truncation = 0;      // complex D-mode count
        int n_neg_hess = 0;
        int n_neg_ref = 0;
        int i_rel = 0;
        int kernel_dim = 0;
        double kernel_gap = 0.0;  // smallest non-kernel |eigenvalue|
    };
    std::vector<Row> rows;
    bool stabilized = false;
    int i_rel = 0;        // value at the largest truncation
    int kernel_dim = 0;
    int nu_plus = 0, nu_minus = 0;  // set when sphere_dim is known
};

/// Sub-spectrum keeping the n complex modes of smallest |lambda|.
Spectrum truncate_spectrum(const Spectrum& spec, int n_complex_modes);
/// Restriction of a field to a sub-spectrum (levels matched by eigenvalue).
PairField restrict_field(const Spectrum& full, const Spectrum& truncated,
                         const PairField& z);

/// Relative index i_rel = n_-(Hess) - n_-(reference) across a truncation
/// schedule (complex D-mode counts); stabilized when the top two agree.
IndexReport relative_index(const FunctionalContext& ctx, const CriticalPoint& cp,
                           const std::vector<int>& truncation_schedule);

/// Closed-form Case 1 / Case 2 index formulas for the H0 critical manifolds.
/// which = +1 for the maximum p_k^+, -1 for the minimum p_k^-.
struct AnalyticIndex {
    int i_rel = 0;
    int nu = 0;
};
AnalyticIndex analytic_index_oracle(const LSpectrum& lspec, int k, int which);

struct DiracSolution {
    PairField z0;
    double exponent_a = 0.0;  // (q+1)/(pq-1)
    double exponent_b = 0.0;  // (p+1)/(pq-1)
    double sup_residual = 0.0;
};

/// Rescales a PowerType critical point (z*, lambda* > 0) to a solution of the
/// coupled Dirac system Du = g|v|^{q-1}v, Dv = f|u|^{p-1}u and measures the
/// grid sup-residual. use_inverted_sign selects the (1-pq) denominator
/// variant, kept only as a regression probe (its residual does not vanish).
DiracSolution rescale_to_dirac_solution(const FunctionalContext& ctx, const CriticalPoint& cp,
                                        bool use_inverted_sign = false);

std::string critical_point_to_json(const FunctionalContext& ctx, const CriticalPoint& cp);
std::string index_report_to_json(const IndexReport& report);

}  // namespace rfh

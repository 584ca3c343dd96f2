#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rfh/field.hpp"

namespace rfh {

enum class NonlinKind { Quadratic, PowerType, Custom };

/// Pointwise fiber derivative (H_u, H_v) at a fiber point (u, v).
struct FiberGradient {
    cplx hu;
    cplx hv;
};

/// A Hamiltonian H(x, u, v) with fiber derivatives.
///
/// Quadratic is H0 = (|u|^2 + |v|^2)/2. PowerType is
/// f(x)|u|^{p+1}/(p+1) + g(x)|v|^{q+1}/(q+1) with f, g > 0. Custom supplies
/// evaluation callbacks (x-independent fiber maps).
struct NonlinearitySpec {
    NonlinKind kind = NonlinKind::Quadratic;
    double p = 1.0, q = 1.0;
    std::function<double(double)> f;  // position t in [0,1); nullptr means 1
    std::function<double(double)> g;

    // hypothesis metadata
    double c0 = 1.0;     // (H1), in (0,2)
    double c1 = 2.0;     // (H2)
    double c2 = 10.0;    // (H3)
    double delta = 0.1;  // (H3) excluded ball radius

    // Custom callbacks
    std::function<double(cplx, cplx)> eval;
    std::function<FiberGradient(cplx, cplx)> eval_grad;
    // real-linear fiber Hessian applied to a tangent (wu, wv)
    std::function<FiberGradient(cplx, cplx, cplx, cplx)> eval_hess;

    static NonlinearitySpec quadratic();
    static NonlinearitySpec power_type(double p, double q,
                                       std::function<double(double)> f = nullptr,
                                       std::function<double(double)> g = nullptr);
};

double evaluate_H(const NonlinearitySpec& spec, double t, cplx u, cplx v);
FiberGradient evaluate_Hz(const NonlinearitySpec& spec, double t, cplx u, cplx v);
/// Fiber Hessian as a real-linear map applied to the tangent (wu, wv).
FiberGradient evaluate_Hzz(const NonlinearitySpec& spec, double t, cplx u, cplx v,
                           cplx wu, cplx wv);

/// The interval of s in (0,1) satisfying p < (n+2s)/(n-2s) and
/// q < (n+2-2s)/(n+2s-2), with the chosen midpoint.
struct ExponentWitness {
    int n = 1;
    double p = 0.0, q = 0.0;
    double s_lo = 0.0, s_hi = 0.0;  // open feasible interval
    double s = 0.0;                 // chosen value (midpoint)
};

/// Solves the exponent condition for s. Throws DomainError with a diagnostic
/// naming the failed inequality if (p, q, n) is infeasible.
ExponentWitness select_s(int n, double p, double q);

/// Quadrature of H over the circle. For Quadratic the value is computed
/// spectrally and works for any spectrum model.
double integral_H(const Spectrum& spec, const NonlinearitySpec& nl, const PairField& z,
                  int grid_points);

/// H_z evaluated on the grid and projected back to coefficients
/// (the L^2 representative of the derivative of \int H).
PairField integral_H_gradient(const Spectrum& spec, const NonlinearitySpec& nl,
                              const PairField& z, int grid_points);

struct HypothesisReport {
    struct Item {
        std::string name;
        bool passed = true;
        bool heuristic = false;
        double worst_margin = 0.0;
        std::string witness;  // nonempty on failure
    };
    std::vector<Item> items;
    bool all_passed() const;
};

/// Samples random fiber points in [-box, box]^4 (real coordinates) and checks
/// (H1)-(H3); (H4) is a sampled boundedness check over random fields and is
/// reported as heuristic.
HypothesisReport check_hypotheses(const NonlinearitySpec& nl, int sample_count,
                                  double box, unsigned seed,
                                  const Spectrum* field_spec = nullptr,
                                  double s = 0.5, int grid_points = 0);

}  // namespace rfh

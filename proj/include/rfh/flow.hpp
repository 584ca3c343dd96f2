#pragma once

#include <optional>

#include "rfh/perturbation.hpp"

namespace rfh {

struct FlowOptions {
    double horizon = 1.0;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double initial_step = 1e-3;
    double max_step = 0.25;
    double stationary_threshold = 1e-9;  // ||grad A||_E below this ...
    int stationary_steps = 10;           // ... for this many accepted steps
    double divergence_bound = 1e6;
};

struct FlowStats {
    int accepted = 0;
    int rejected = 0;
    bool converged = false;   // hit the stationary threshold
    bool diverged = false;    // ||w||_E exceeded the divergence bound
    bool stiff = false;       // step-size underflow
    double final_grad_norm = 0.0;
};

/// Time-sampled negative-gradient trajectory with per-step diagnostics.
/// States are stored as E-orthonormal coordinates (see EBasis).
struct FlowTrajectory {
    std::vector<double> t;
    std::vector<VectorXd> states;
    std::vector<double> action_values;
    std::vector<double> grad_norm;     // ||grad A_H||_E
    std::vector<double> gk_norm_sq;    // ||grad^K A_H||^2_{g^K}
    std::vector<double> lambda;
    std::vector<double> z_norm_es;
    std::vector<double> energy_accum;  // running integral of gk_norm_sq
    FlowStats stats;

    ExtendedPoint state_at(const FunctionalContext& ctx, std::size_t i) const;
};

/// Integrates dw/dt = -(I + K(w)) grad A_H(w) with an embedded
/// Dormand-Prince 5(4) pair. pert may be null (unperturbed flow).
FlowTrajectory integrate_flow(const FunctionalContext& ctx, const PerturbationMap* pert,
                              const ExtendedPoint& w_start, const FlowOptions& opts);

struct EnergyReport {
    double action_drop = 0.0;       // A(w(t0)) - A(w(tN))
    double energy_integral = 0.0;   // integral of ||grad^K A||^2_{g^K}
    double relative_defect = 0.0;
};

/// Checks the energy identity action drop = integral of the squared
/// g^K-gradient norm along the trajectory.
EnergyReport energy_identity_check(const FlowTrajectory& traj);

/// Monotone smooth step: 0 for t <= 0, 1 for t >= 1, derivative bounded by 2.
double smooth_step(double t);
double smooth_step_derivative(double t);

/// Endpoints (H0, K0) -> (H1, K1) interpolated by the smooth step profile.
/// The two contexts must share spectrum, s and grid.
struct HomotopySchedule {
    const FunctionalContext* ctx0 = nullptr;
    const FunctionalContext* ctx1 = nullptr;
    const PerturbationMap* pert0 = nullptr;
    const PerturbationMap* pert1 = nullptr;
    double budget = 0.0;  // perturbation budget A; 0 = not asserted
};

struct HomotopyReport {
    FlowTrajectory trajectory;
    double sup_z_norm = 0.0;
    double sup_lambda = 0.0;
    double measured_budget = 0.0;  // integral of |dH/dt| along the trajectory
    bool budget_ok = true;
};

HomotopyReport integrate_homotopy(const HomotopySchedule& schedule,
                                  const ExtendedPoint& w_start, const FlowOptions& opts);

struct PsDiagnostics {
    struct Row {
        double action = 0.0;
        double grad_norm = 0.0;
        double z_norm_es = 0.0;
        double lambda = 0.0;
        bool suspect = false;  // small gradient but large norm
    };
    std::vector<Row> rows;
    bool any_suspect = false;
};

/// Palais-Smale pattern report: flags points with small gradient but a norm
/// disproportionate to the bound pattern of the action estimates.
PsDiagnostics ps_diagnostics(const FunctionalContext& ctx,
                             const std::vector<ExtendedPoint>& points,
                             double grad_small = 1e-3, double norm_large = 1e3);

/// Trajectory dump with columns t, action, grad_norm, lambda, z_norm_Es.
std::string trajectory_to_csv(const FlowTrajectory& traj);

}  // namespace rfh

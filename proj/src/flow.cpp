#include "rfh/flow.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace rfh {

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct StepSample {
    double action;
    double grad_norm;
    double gk_norm_sq;
    double lambda;
    double z_norm_es;
};

// The right-hand side acts on the flow state augmented by one trailing
// component: the running integral of ||grad^K A||^2_{g^K}, integrated to the
// same accuracy as the state itself.
using Rhs = std::function<VectorXd(double, const VectorXd&)>;
using Sampler = std::function<StepSample(double, const VectorXd&)>;

FlowTrajectory integrate(const Rhs& rhs, const Sampler& sampler, const VectorXd& y0,
                         const FlowOptions& opts) {
    FlowTrajectory traj;
    const int n = static_cast<int>(y0.size());
    double t = 0.0;
    VectorXd y(n + 1);
    y.head(n) = y0;
    y[n] = 0.0;
    double h = std::min(opts.initial_step, opts.horizon);
    int stationary_run = 0;

    auto record = [&](double time, const VectorXd& state) {
        StepSample s = sampler(time, state.head(n));
        traj.t.push_back(time);
        traj.states.push_back(state.head(n));
        traj.action_values.push_back(s.action);
        traj.grad_norm.push_back(s.grad_norm);
        traj.gk_norm_sq.push_back(s.gk_norm_sq);
        traj.lambda.push_back(s.lambda);
        traj.z_norm_es.push_back(s.z_norm_es);
        traj.energy_accum.push_back(state[n]);
        return s;
    };
    StepSample last = record(t, y);

    VectorXd k1 = rhs(t, y);
    while (t < opts.horizon) {
        h = std::min(h, opts.horizon - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            traj.stats.stiff = true;
            break;
        }
        VectorXd k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        VectorXd k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        VectorXd k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        VectorXd k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        VectorXd k6 =
            rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        VectorXd ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        VectorXd k7 = rhs(t + h, ynew);
        VectorXd err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]),
                                                                  std::abs(ynew[i]));
            err = std::max(err, std::abs(err_vec[i]) / scale);
        }

        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            ++traj.stats.accepted;
            last = record(t, y);

            if (y.head(n).norm() > opts.divergence_bound) {
                traj.stats.diverged = true;
                break;
            }
            if (last.grad_norm < opts.stationary_threshold) {
                if (++stationary_run >= opts.stationary_steps) {
                    traj.stats.converged = true;
                    break;
                }
            } else {
                stationary_run = 0;
            }
        } else {
            ++traj.stats.rejected;
        }
        double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        h = std::min(h, opts.max_step);
    }
    traj.stats.final_grad_norm = last.grad_norm;
    return traj;
}

}  // namespace

ExtendedPoint FlowTrajectory::state_at(const FunctionalContext& ctx, std::size_t i) const {
    EBasis basis(ctx);
    return basis.from_coords(states.at(i));
}

FlowTrajectory integrate_flow(const FunctionalContext& ctx, const PerturbationMap* pert,
                              const ExtendedPoint& w_start, const FlowOptions& opts) {
    EBasis basis(ctx);
    const int n = basis.dim();
    auto rhs = [&, n](double, const VectorXd& y) {
        ExtendedPoint w = basis.from_coords(y.head(n));
        ExtendedPoint g = gradient(ctx, w);
        ExtendedPoint gk = pert ? perturbed_gradient(ctx, *pert, w) : g;
        VectorXd out(n + 1);
        out.head(n) = -basis.to_coords(gk);
        out[n] = e_inner(ctx.spectrum, gk, g);  // energy density ||grad^K||^2_{g^K}
        return out;
    };
    auto sampler = [&](double, const VectorXd& y) {
        ExtendedPoint w = basis.from_coords(y);
        ExtendedPoint g = gradient(ctx, w);
        ExtendedPoint gk = pert ? perturbed_gradient(ctx, *pert, w) : g;
        StepSample s;
        s.action = action(ctx, w);
        s.grad_norm = e_norm(ctx.spectrum, g);
        // ||grad^K A||^2_{g^K} = ((I+K) grad A, grad A)_E
        s.gk_norm_sq = e_inner(ctx.spectrum, gk, g);
        s.lambda = w.lambda;
        s.z_norm_es = std::sqrt(es_norm_sq(ctx.spectrum, w.z));
        return s;
    };
    return integrate(rhs, sampler, basis.to_coords(w_start), opts);
}

EnergyReport energy_identity_check(const FlowTrajectory& traj) {
    EnergyReport rep;
    if (traj.t.size() < 2) return rep;
    rep.action_drop = traj.action_values.front() - traj.action_values.back();

    double integral = 0.0;
    if (traj.energy_accum.size() == traj.t.size()) {
        // the integrator carries the energy integral as an auxiliary state
        integral = traj.energy_accum.back() - traj.energy_accum.front();
    } else {
        // composite Simpson on the stored (nonuniform) grid, trapezoid tail
        const auto& t = traj.t;
        const auto& f = traj.gk_norm_sq;
        std::size_t i = 0;
        while (i + 2 < t.size()) {
            double h0 = t[i + 1] - t[i];
            double h1 = t[i + 2] - t[i + 1];
            double hs = h0 + h1;
            integral += hs / 6.0 *
                        ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] +
                         (2.0 - h0 / h1) * f[i + 2]);
            i += 2;
        }
        if (i + 1 < t.size())
            integral += 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
    }

    rep.energy_integral = integral;
    double spread = std::max(std::abs(rep.action_drop), 1e-30);
    rep.relative_defect = std::abs(rep.action_drop - integral) / spread;
    return rep;
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double smooth_step_derivative(double t) {
    const double h = 1e-6;
    return (smooth_step(t + h) - smooth_step(t - h)) / (2.0 * h);
}

HomotopyReport integrate_homotopy(const HomotopySchedule& schedule,
                                  const ExtendedPoint& w_start, const FlowOptions& opts) {
    const FunctionalContext& ctx0 = *schedule.ctx0;
    const FunctionalContext& ctx1 = *schedule.ctx1;
    EBasis basis(ctx0);

    auto blended_gradient = [&](double t, const ExtendedPoint& w) {
        double beta = smooth_step(t);
        ExtendedPoint g0 = gradient(ctx0, w);
        ExtendedPoint g1 = gradient(ctx1, w);
        ExtendedPoint g;
        g.z = g0.z;
        g.z.u = (1.0 - beta) * g0.z.u + beta * g1.z.u;
        g.z.v = (1.0 - beta) * g0.z.v + beta * g1.z.v;
        g.lambda = (1.0 - beta) * g0.lambda + beta * g1.lambda;

        ExtendedPoint out = g;
        if (schedule.pert0) {
            ExtendedPoint k0 = schedule.pert0->apply(ctx0, w, g);
            out.z.u += (1.0 - beta) * k0.z.u;
            out.z.v += (1.0 - beta) * k0.z.v;
            out.lambda += (1.0 - beta) * k0.lambda;
        }
        if (schedule.pert1) {
            ExtendedPoint k1 = schedule.pert1->apply(ctx1, w, g);
            out.z.u += beta * k1.z.u;
            out.z.v += beta * k1.z.v;
            out.lambda += beta * k1.lambda;
        }
        return out;
    };

    const int n = basis.dim();
    auto rhs = [&, n](double t, const VectorXd& y) {
        ExtendedPoint w = basis.from_coords(y.head(n));
        double beta = smooth_step(t);
        ExtendedPoint g0 = gradient(ctx0, w);
        ExtendedPoint g1 = gradient(ctx1, w);
        ExtendedPoint g = g0;
        g.z.u = (1.0 - beta) * g0.z.u + beta * g1.z.u;
        g.z.v = (1.0 - beta) * g0.z.v + beta * g1.z.v;
        g.lambda = (1.0 - beta) * g0.lambda + beta * g1.lambda;
        ExtendedPoint gk = blended_gradient(t, w);
        VectorXd out(n + 1);
        out.head(n) = -basis.to_coords(gk);
        out[n] = e_inner(ctx0.spectrum, gk, g);
        return out;
    };
    auto sampler = [&](double t, const VectorXd& y) {
        ExtendedPoint w = basis.from_coords(y);
        double beta = smooth_step(t);
        ExtendedPoint g0 = gradient(ctx0, w);
        ExtendedPoint g1 = gradient(ctx1, w);
        ExtendedPoint g = g0;
        g.z.u = (1.0 - beta) * g0.z.u + beta * g1.z.u;
        g.z.v = (1.0 - beta) * g0.z.v + beta * g1.z.v;
        g.lambda = (1.0 - beta) * g0.lambda + beta * g1.lambda;
        ExtendedPoint gk = blended_gradient(t, w);
        StepSample s;
        s.action = (1.0 - beta) * action(ctx0, w) + beta * action(ctx1, w);
        s.grad_norm = e_norm(ctx0.spectrum, g);
        s.gk_norm_sq = e_inner(ctx0.spectrum, gk, g);
        s.lambda = w.lambda;
        s.z_norm_es = std::sqrt(es_norm_sq(ctx0.spectrum, w.z));
        return s;
    };

    HomotopyReport rep;
    rep.trajectory = integrate(rhs, sampler, basis.to_coords(w_start), opts);

    // measured budget: integral of beta'(t) * |\int (H1 - H0) dx| along the path
    const auto& traj = rep.trajectory;
    for (std::size_t i = 0; i + 1 < traj.t.size(); ++i) {
        double tm = 0.5 * (traj.t[i] + traj.t[i + 1]);
        double dt = traj.t[i + 1] - traj.t[i];
        ExtendedPoint w = traj.state_at(ctx0, i);
        double dH = std::abs(integral_H(ctx1.spectrum, ctx1.nonlin, w.z, ctx1.grid_points) -
                             integral_H(ctx0.spectrum, ctx0.nonlin, w.z, ctx0.grid_points));
        rep.measured_budget += smooth_step_derivative(tm) * dH * dt;
    }
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        rep.sup_z_norm = std::max(rep.sup_z_norm, traj.z_norm_es[i]);
        rep.sup_lambda = std::max(rep.sup_lambda, std::abs(traj.lambda[i]));
    }
    if (schedule.budget > 0.0) rep.budget_ok = rep.measured_budget <= schedule.budget;
    return rep;
}

PsDiagnostics ps_diagnostics(const FunctionalContext& ctx,
                             const std::vector<ExtendedPoint>& points, double grad_small,
                             double norm_large) {
    PsDiagnostics diag;
    for (const auto& w : points) {
        PsDiagnostics::Row row;
        row.action = action(ctx, w);
        row.grad_norm = e_norm(ctx.spectrum, gradient(ctx, w));
        row.z_norm_es = std::sqrt(es_norm_sq(ctx.spectrum, w.z));
        row.lambda = w.lambda;
        row.suspect = row.grad_norm < grad_small &&
                      (row.z_norm_es > norm_large || std::abs(row.lambda) > norm_large);
        diag.any_suspect = diag.any_suspect || row.suspect;
        diag.rows.push_back(row);
    }
    return diag;
}

std::string trajectory_to_csv(const FlowTrajectory& traj) {
    std::ostringstream os;
    os.precision(17);
    os << "t,action,grad_norm,lambda,z_norm_Es\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i)
        os << traj.t[i] << ',' << traj.action_values[i] << ',' << traj.grad_norm[i] << ','
           << traj.lambda[i] << ',' << traj.z_norm_es[i] << '\n';
    return os.str();
}

}  // namespace rfh

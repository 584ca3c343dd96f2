#include "rfh/critical.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace rfh {

CriticalPoint newton_solve(const FunctionalContext& ctx, const ExtendedPoint& guess,
                           double tol, int max_iter) {
    EBasis basis(ctx);
    VectorXd x = basis.to_coords(guess);
    double residual = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        ExtendedPoint w = basis.from_coords(x);
        VectorXd f = basis.to_coords(gradient(ctx, w));
        residual = f.norm();
        if (residual < tol) {
            CriticalPoint cp;
            cp.w = w;
            cp.residual = residual;
            HessianForm h = hessian_form(ctx, w);
            cp.kernel_dim = kernel_dim(h);
            return cp;
        }

        Eigen::MatrixXd jac = hessian_form(ctx, w).matrix;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-8);
        VectorXd step = -svd.solve(f);

        if (step.norm() < 1e-14 * std::max(1.0, x.norm()))
            throw NonconvergenceError(
                "newton_solve: structurally singular point (no descent direction; "
                "residual " + std::to_string(residual) + ")",
                residual, iter);

        // backtracking damping on the residual norm
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            VectorXd trial = x + alpha * step;
            VectorXd ft = basis.to_coords(gradient(ctx, basis.from_coords(trial)));
            if (ft.norm() < residual * (1.0 - 0.25 * alpha) || ft.norm() < tol) {
                x = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw NonconvergenceError(
                "newton_solve: damping stalled at residual " + std::to_string(residual),
                residual, iter);
    }
    throw NonconvergenceError("newton_solve: max iterations exceeded", residual, max_iter);
}

std::vector<CriticalComponent> h0_critical_manifolds(const FunctionalContext& ctx) {
    if (ctx.nonlin.kind != NonlinKind::Quadratic)
        throw DomainError("h0_critical_manifolds: requires the quadratic nonlinearity H0");
    const Spectrum& spec = ctx.spectrum;
    LSpectrum ls = l_spectrum(spec);

    std::vector<CriticalComponent> components;
    for (const auto& level : ls.levels) {
        CriticalComponent comp;
        comp.k = level.k;
        comp.lambda = level.lambda;
        comp.multiplicity = level.multiplicity;
        comp.sphere_dim = 2 * level.multiplicity - 1;
        // eigenvectors (phi, phi) for D phi = lb phi and (phi, -phi) for
        // D phi = -lb phi; each has L^2 norm sqrt(2), hence \int H0 = 1
        for (int i = 0; i < spec.mode_count(); ++i) {
            if (spec.modes[i] == level.lambda) {
                PairField z = PairField::zero(spec, ctx.s);
                z.u[i] = 1.0;
                z.v[i] = 1.0;
                comp.eigenvectors.push_back(z);
            } else if (spec.modes[i] == -level.lambda) {
                PairField z = PairField::zero(spec, ctx.s);
                z.u[i] = 1.0;
                z.v[i] = -1.0;
                comp.eigenvectors.push_back(z);
            }
        }
        if (static_cast<int>(comp.eigenvectors.size()) != level.multiplicity)
            throw DomainError("h0_critical_manifolds: multiplicity mismatch");

        auto make_rep = [&](const PairField& z, double sign) {
            CriticalPoint cp;
            cp.w.z = z;
            cp.w.z.u *= sign;
            cp.w.z.v *= sign;
            cp.w.lambda = level.lambda;
            cp.residual = e_norm(spec, gradient(ctx, cp.w));
            cp.manifold_k = level.k;
            cp.sphere_dim = comp.sphere_dim;
            return cp;
        };
        comp.rep_minus = make_rep(comp.eigenvectors.front(), 1.0);
        comp.rep_plus = make_rep(comp.eigenvectors.front(), -1.0);
        components.push_back(std::move(comp));
    }
    return components;
}

Spectrum truncate_spectrum(const Spectrum& spec, int n_complex_modes) {
    if (n_complex_modes < 1 || n_complex_modes > spec.mode_count())
        throw DomainError("truncate_spectrum: invalid mode count");
    if (spec.model == SpectrumModel::Circle) {
        if (n_complex_modes % 2 != 0)
            throw DomainError("truncate_spectrum: circle truncation must be even");
        return build_circle_spectrum(n_complex_modes / 2);
    }
    // keep the levels of smallest |lambda| until the budget is filled
    std::vector<const DLevel*> order;
    for (const auto& lv : spec.levels) order.push_back(&lv);
    std::sort(order.begin(), order.end(), [](const DLevel* a, const DLevel* b) {
        return std::abs(a->lambda) < std::abs(b->lambda);
    });
    std::vector<DLevel> kept;
    int budget = n_complex_modes;
    for (const DLevel* lv : order) {
        if (budget <= 0) break;
        int take = std::min(budget, lv->multiplicity);
        kept.push_back({lv->lambda, take});
        budget -= take;
    }
    return build_synthetic_spectrum(kept);
}

PairField restrict_field(const Spectrum& full, const Spectrum& truncated, const PairField& z) {
    PairField out = PairField::zero(truncated, z.s);
    // per-level offsets into the flattened mode arrays
    auto offsets = [](const Spectrum& s) {
        std::vector<int> off;
        int acc = 0;
        for (const auto& lv : s.levels) {
            off.push_back(acc);
            acc += lv.multiplicity;
        }
        return off;
    };
    std::vector<int> off_full = offsets(full);
    std::vector<int> off_trunc = offsets(truncated);
    for (std::size_t lt = 0; lt < truncated.levels.size(); ++lt) {
        const auto& lv = truncated.levels[lt];
        auto it = std::find_if(full.levels.begin(), full.levels.end(),
                               [&](const DLevel& f) { return f.lambda == lv.lambda; });
        if (it == full.levels.end())
            throw DomainError("restrict_field: truncated level not found in full spectrum");
        int lf = static_cast<int>(it - full.levels.begin());
        for (int m = 0; m < lv.multiplicity; ++m) {
            out.u[off_trunc[lt] + m] = z.u[off_full[lf] + m];
            out.v[off_trunc[lt] + m] = z.v[off_full[lf] + m];
        }
    }
    return out;
}

IndexReport relative_index(const FunctionalContext& ctx, const CriticalPoint& cp,
                           const std::vector<int>& truncation_schedule) {
    if (truncation_schedule.empty())
        throw DomainError("relative_index: empty truncation schedule");
    IndexReport report;

    for (int size : truncation_schedule) {
        Spectrum sub = truncate_spectrum(ctx.spectrum, size);
        FunctionalContext subctx(sub, ctx.s, ctx.nonlin,
                                 sub.model == SpectrumModel::Circle ? 8 * sub.num_modes : 0);
        ExtendedPoint w;
        w.z = restrict_field(ctx.spectrum, sub, cp.w.z);
        w.lambda = cp.w.lambda;

        HessianForm hess = hessian_form(subctx, w);
        HessianForm ref = reference_operator(subctx);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hess.matrix,
                                                              Eigen::EigenvaluesOnly);
        Eigen::VectorXd ev = solver.eigenvalues();
        IndexReport::Row row;
        row.truncation = size;
        row.kernel_gap = 1e300;
        for (int i = 0; i < ev.size(); ++i) {
            if (ev[i] < -hess.kernel_tolerance) ++row.n_neg_hess;
            if (std::abs(ev[i]) < hess.kernel_tolerance)
                ++row.kernel_dim;
            else
                row.kernel_gap = std::min(row.kernel_gap, std::abs(ev[i]));
        }
        // The comparison splitting orients the multiplier direction with the
        // sign of lambda at the critical point: for lambda < 0 it belongs to
        // the negative cone, so it counts toward n_neg(ref). This keeps the
        // inertia difference equal to analytic_index_oracle on both halves of
        // the spectrum.
        row.n_neg_ref = negative_count(ref) + (w.lambda < 0.0 ? 1 : 0);
        row.i_rel = row.n_neg_hess - row.n_neg_ref;
        report.rows.push_back(row);
    }

    const auto& last = report.rows.back();
    report.i_rel = last.i_rel;
    report.kernel_dim = last.kernel_dim;
    report.stabilized = report.rows.size() < 2 ||
                        report.rows[report.rows.size() - 2].i_rel == last.i_rel;
    if (cp.sphere_dim >= 0) {
        report.nu_minus = report.i_rel;
        report.nu_plus = report.i_rel + cp.sphere_dim;
    }
    return report;
}

AnalyticIndex analytic_index_oracle(const LSpectrum& lspec, int k, int which) {
    if (k == 0) throw DomainError("analytic_index_oracle: k must be nonzero");
    if (which != 1 && which != -1)
        throw DomainError("analytic_index_oracle: which must be +1 or -1");
    auto mult = [&](int l) { return lspec.level(l).multiplicity; };

    AnalyticIndex out;
    if (k > 0) {
        int sum_below = 0;
        for (int l = 1; l < k; ++l) sum_below += mult(l);
        out.i_rel = 1 + 2 * sum_below;
        out.nu = which == 1 ? 2 * (sum_below + mult(k)) : out.i_rel;
    } else {
        int sum_window = 0;
        for (int l = k; l < 0; ++l) sum_window += mult(l);
        out.i_rel = -2 * sum_window;
        out.nu = which == 1 ? -1 - 2 * (sum_window - mult(k)) : out.i_rel;
    }
    return out;
}

DiracSolution rescale_to_dirac_solution(const FunctionalContext& ctx, const CriticalPoint& cp,
                                        bool use_inverted_sign) {
    if (ctx.nonlin.kind != NonlinKind::PowerType)
        throw DomainError("rescale_to_dirac_solution: requires a PowerType nonlinearity");
    double lambda = cp.w.lambda;
    if (lambda <= 0.0)
        throw DomainError("rescale_to_dirac_solution: lambda* <= 0 branch is unsupported");
    if (l2_norm_sq(cp.w.z) == 0.0)
        throw DomainError("rescale_to_dirac_solution: trivial critical point");

    double p = ctx.nonlin.p, q = ctx.nonlin.q;
    double denom = use_inverted_sign ? (1.0 - p * q) : (p * q - 1.0);
    DiracSolution sol;
    sol.exponent_a = (q + 1.0) / denom;
    sol.exponent_b = (p + 1.0) / denom;
    sol.z0 = cp.w.z;
    sol.z0.u *= std::pow(lambda, sol.exponent_a);
    sol.z0.v *= std::pow(lambda, sol.exponent_b);

    // sup-residual of Du0 = g|v0|^{q-1}v0, Dv0 = f|u0|^{p-1}u0 on the grid
    PairField dz = sol.z0;
    dz.u = fractional_power_apply(ctx.spectrum, sol.z0.u, 0.0);  // copy sized
    for (int i = 0; i < ctx.spectrum.mode_count(); ++i) {
        dz.u[i] = ctx.spectrum.modes[i] * sol.z0.u[i];
        dz.v[i] = ctx.spectrum.modes[i] * sol.z0.v[i];
    }
    GridSampling gd = to_grid(ctx.spectrum, dz, ctx.grid_points);
    GridSampling gz = to_grid(ctx.spectrum, sol.z0, ctx.grid_points);
    double sup = 0.0;
    for (int m = 0; m < gd.num_points; ++m) {
        double t = static_cast<double>(m) / gd.num_points;
        FiberGradient fg = evaluate_Hz(ctx.nonlin, t, gz.u[m], gz.v[m]);
        sup = std::max(sup, std::abs(gd.u[m] - fg.hv));
        sup = std::max(sup, std::abs(gd.v[m] - fg.hu));
    }
    sol.sup_residual = sup;
    return sol;
}

std::string critical_point_to_json(const FunctionalContext& ctx, const CriticalPoint& cp) {
    nlohmann::ordered_json j;
    auto coeffs = [](const VectorXcd& c) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (int i = 0; i < c.size(); ++i) arr.push_back({c[i].real(), c[i].imag()});
        return arr;
    };
    j["u"] = coeffs(cp.w.z.u);
    j["v"] = coeffs(cp.w.z.v);
    j["lambda"] = cp.w.lambda;
    j["residual"] = cp.residual;
    j["kernel_dim"] = cp.kernel_dim;
    j["action"] = action(ctx, cp.w);
    if (cp.manifold_k != 0) {
        j["manifold_k"] = cp.manifold_k;
        j["sphere_dim"] = cp.sphere_dim;
    }
    return j.dump();
}

std::string index_report_to_json(const IndexReport& report) {
    nlohmann::ordered_json j;
    j["i_rel"] = report.i_rel;
    j["stabilized"] = report.stabilized;
    j["kernel_dim"] = report.kernel_dim;
    j["nu_plus"] = report.nu_plus;
    j["nu_minus"] = report.nu_minus;
    auto& rows = j["truncations"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows)
        rows.push_back({{"modes", row.truncation},
                        {"n_neg_hess", row.n_neg_hess},
                        {"n_neg_ref", row.n_neg_ref},
                        {"i_rel", row.i_rel},
                        {"kernel_dim", row.kernel_dim},
                        {"kernel_gap", row.kernel_gap}});
    return j.dump();
}

}  // namespace rfh

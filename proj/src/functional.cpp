#include "rfh/functional.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace rfh {

FunctionalContext::FunctionalContext(Spectrum spec, double s_, NonlinearitySpec nl, int grid)
    : spectrum(std::move(spec)), s(s_), nonlin(std::move(nl)), grid_points(grid) {
    if (s <= 0.0 || s >= 1.0) throw DomainError("FunctionalContext: s must lie in (0,1)");
    if (grid_points == 0 && spectrum.model == SpectrumModel::Circle)
        grid_points = 8 * spectrum.num_modes;  // 4x oversampling of the 2M-mode band
    if (spectrum.model != SpectrumModel::Circle && nonlin.kind != NonlinKind::Quadratic)
        throw DomainError("FunctionalContext: non-quadratic nonlinearities need the circle model");
}

VectorXd EBasis::to_coords(const ExtendedPoint& w) const {
    const Spectrum& spec = ctx->spectrum;
    const int k = spec.mode_count();
    VectorXd x(dim());
    for (int i = 0; i < k; ++i) {
        double wu = std::pow(std::abs(spec.modes[i]), ctx->s);
        double wv = std::pow(std::abs(spec.modes[i]), 1.0 - ctx->s);
        x[4 * i + 0] = w.z.u[i].real() * wu;
        x[4 * i + 1] = w.z.u[i].imag() * wu;
        x[4 * i + 2] = w.z.v[i].real() * wv;
        x[4 * i + 3] = w.z.v[i].imag() * wv;
    }
    x[4 * k] = w.lambda;
    return x;
}

ExtendedPoint EBasis::from_coords(const VectorXd& x) const {
    const Spectrum& spec = ctx->spectrum;
    const int k = spec.mode_count();
    if (x.size() != dim()) throw DomainError("EBasis::from_coords: size mismatch");
    ExtendedPoint w;
    w.z = PairField::zero(spec, ctx->s);
    for (int i = 0; i < k; ++i) {
        double wu = std::pow(std::abs(spec.modes[i]), -ctx->s);
        double wv = std::pow(std::abs(spec.modes[i]), -(1.0 - ctx->s));
        w.z.u[i] = cplx(x[4 * i + 0], x[4 * i + 1]) * wu;
        w.z.v[i] = cplx(x[4 * i + 2], x[4 * i + 3]) * wv;
    }
    w.lambda = x[4 * k];
    return w;
}

ExtendedPoint EBasis::unit(int i) const {
    VectorXd x = VectorXd::Zero(dim());
    x[i] = 1.0;
    return from_coords(x);
}

double action(const FunctionalContext& ctx, const ExtendedPoint& w) {
    // (Lz, z)_{L^2} = 2 * sum_k lambda_k Re(conj(u_k) v_k)
    double quad = 0.0;
    for (int i = 0; i < ctx.spectrum.mode_count(); ++i)
        quad += ctx.spectrum.modes[i] * (std::conj(w.z.u[i]) * w.z.v[i]).real();
    double ih = integral_H(ctx.spectrum, ctx.nonlin, w.z, ctx.grid_points);
    return quad - w.lambda * (ih - 1.0);
}

double action_unconstrained(const FunctionalContext& ctx, const PairField& z) {
    double quad = 0.0;
    for (int i = 0; i < ctx.spectrum.mode_count(); ++i)
        quad += ctx.spectrum.modes[i] * (std::conj(z.u[i]) * z.v[i]).real();
    return quad - integral_H(ctx.spectrum, ctx.nonlin, z, ctx.grid_points);
}

ExtendedPoint gradient(const FunctionalContext& ctx, const ExtendedPoint& w) {
    PairField hz = integral_H_gradient(ctx.spectrum, ctx.nonlin, w.z, ctx.grid_points);
    PairField lz = l_apply(ctx.spectrum, w.z);
    PairField res = lz;
    res.u = lz.u - w.lambda * hz.u;
    res.v = lz.v - w.lambda * hz.v;
    ExtendedPoint g;
    g.z = ds_apply(ctx.spectrum, res);
    g.lambda = -(integral_H(ctx.spectrum, ctx.nonlin, w.z, ctx.grid_points) - 1.0);
    return g;
}

ExtendedPoint hessian_apply(const FunctionalContext& ctx, const ExtendedPoint& w,
                            const ExtendedPoint& xi) {
    const Spectrum& spec = ctx.spectrum;
    PairField hz = integral_H_gradient(spec, ctx.nonlin, w.z, ctx.grid_points);

    // H_zz(z) xi_z, pointwise on the grid for non-quadratic H
    PairField hzz_xi;
    if (ctx.nonlin.kind == NonlinKind::Quadratic) {
        hzz_xi = xi.z;
    } else {
        GridSampling gz = to_grid(spec, w.z, ctx.grid_points);
        GridSampling gxi = to_grid(spec, xi.z, ctx.grid_points);
        GridSampling out;
        out.num_points = gz.num_points;
        out.u.resize(gz.num_points);
        out.v.resize(gz.num_points);
        for (int m = 0; m < gz.num_points; ++m) {
            double t = static_cast<double>(m) / gz.num_points;
            FiberGradient fg =
                evaluate_Hzz(ctx.nonlin, t, gz.u[m], gz.v[m], gxi.u[m], gxi.v[m]);
            out.u[m] = fg.hu;
            out.v[m] = fg.hv;
        }
        hzz_xi = from_grid(spec, out, ctx.s);
    }

    PairField first = l_apply(spec, xi.z);
    first.u -= w.lambda * hzz_xi.u + xi.lambda * hz.u;
    first.v -= w.lambda * hzz_xi.v + xi.lambda * hz.v;

    ExtendedPoint out;
    out.z = ds_apply(spec, first);
    out.lambda = -l2_inner(hz, xi.z);
    return out;
}

HessianForm hessian_form(const FunctionalContext& ctx, const ExtendedPoint& w) {
    EBasis basis(ctx);
    const int n = basis.dim();
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        m.col(j) = basis.to_coords(hessian_apply(ctx, w, basis.unit(j)));
    // symmetrize; the assembly is symmetric up to quadrature roundoff
    m = 0.5 * (m + m.transpose()).eval();
    return HessianForm{std::move(m), 1e-8};
}

HessianForm reference_operator(const FunctionalContext& ctx) {
    EBasis basis(ctx);
    const int n = basis.dim();
    const Spectrum& spec = ctx.spectrum;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    // (A xi, eta)_E = (L xi_z, eta_z)_{L^2} + xi_lambda eta_lambda; per mode
    // the u/v blocks couple with weight lambda |lambda|^{-1}.
    for (int i = 0; i < spec.mode_count(); ++i) {
        double c = spec.modes[i] / std::abs(spec.modes[i]);
        m(4 * i + 0, 4 * i + 2) = c;
        m(4 * i + 2, 4 * i + 0) = c;
        m(4 * i + 1, 4 * i + 3) = c;
        m(4 * i + 3, 4 * i + 1) = c;
    }
    m(n - 1, n - 1) = 1.0;
    return HessianForm{std::move(m), 1e-8};
}

namespace {
Eigen::VectorXd symmetric_eigenvalues(const HessianForm& form) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(form.matrix,
                                                          Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}
}  // namespace

int negative_count(const HessianForm& form) {
    Eigen::VectorXd ev = symmetric_eigenvalues(form);
    int count = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (ev[i] < -form.kernel_tolerance) ++count;
    return count;
}

int kernel_dim(const HessianForm& form) {
    Eigen::VectorXd ev = symmetric_eigenvalues(form);
    int count = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i]) < form.kernel_tolerance) ++count;
    return count;
}

}  // namespace rfh

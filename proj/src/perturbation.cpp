#include "rfh/perturbation.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "json.hpp"

namespace rfh {

namespace {
ExtendedPoint scaled(const ExtendedPoint& w, double c) {
    ExtendedPoint out = w;
    out.z.u *= c;
    out.z.v *= c;
    out.lambda *= c;
    return out;
}

ExtendedPoint sum(const ExtendedPoint& a, const ExtendedPoint& b) {
    ExtendedPoint out = a;
    out.z.u += b.z.u;
    out.z.v += b.z.v;
    out.lambda += b.lambda;
    return out;
}
}  // namespace

ExtendedPoint FiniteRankOperator::apply(const FunctionalContext& ctx,
                                        const ExtendedPoint& w) const {
    ExtendedPoint out;
    out.z = PairField::zero(ctx.spectrum, ctx.s);
    out.lambda = 0.0;
    for (const auto& term : terms)
        out = sum(out, scaled(term.left, e_inner(ctx.spectrum, w, term.right)));
    return out;
}

double FiniteRankOperator::norm_bound(const FunctionalContext& ctx) const {
    double bound = 0.0;
    for (const auto& term : terms)
        bound += e_norm(ctx.spectrum, term.left) * e_norm(ctx.spectrum, term.right);
    return bound;
}

FiniteRankOperator make_hitting_operator(const FunctionalContext& ctx,
                                         const ExtendedPoint& x, const ExtendedPoint& y) {
    double xn = e_norm(ctx.spectrum, x);
    if (xn == 0.0) throw DomainError("make_hitting_operator: x must be nonzero");
    double xy = e_inner(ctx.spectrum, x, y);
    double yn = e_norm(ctx.spectrum, y);
    FiniteRankOperator k;
    // The rank-one formula divides by (x, y); when x and y are nearly
    // orthogonal the division amplifies the cancellation error in the inner
    // product, so treat small relative values as the orthogonal case.
    if (std::abs(xy) > 1e-8 * xn * yn) {
        // K w = (w, y) y / (x, y)
        k.terms.push_back({y, scaled(y, 1.0 / xy)});
        return k;
    }
    // (x, y) ~ 0: pick xi = x and split off the (tiny) component of y along
    // x, so that K(x) = y holds exactly. With y_perp = y - (x, y) x / ||x||^2,
    //   K w = (w, x) y / ||x||^2 + (w, y_perp) x / ||x||^2
    // is symmetric (y - y_perp is parallel to x) and K(x) = y.
    double xxi = xn * xn;
    ExtendedPoint y_perp = sum(y, scaled(x, -xy / xxi));
    k.terms.push_back({y, scaled(x, 1.0 / xxi)});
    k.terms.push_back({x, scaled(y_perp, 1.0 / xxi)});
    return k;
}

double bump_profile(double t) {
    if (t >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

double PerturbationMap::profile_factor(const FunctionalContext& ctx,
                                       const ExtendedPoint& w) const {
    double factor = 1.0;
    if (use_bump) {
        ExtendedPoint d = sum(w, scaled(center, -1.0));
        factor *= bump_profile(e_norm(ctx.spectrum, d));
    }
    if (use_gaussian) {
        double n = e_norm(ctx.spectrum, w);
        factor *= std::exp(-n * n);
    }
    return factor;
}

ExtendedPoint PerturbationMap::apply(const FunctionalContext& ctx, const ExtendedPoint& w,
                                     const ExtendedPoint& xi) const {
    return scaled(k0.apply(ctx, xi), profile_factor(ctx, w));
}

double PerturbationMap::operator_norm_bound(const FunctionalContext& ctx) const {
    // rho and the Gaussian are bounded by rho(0) = e^{-1} and 1 respectively
    double sup_factor = use_bump ? bump_profile(0.0) : 1.0;
    return sup_factor * k0.norm_bound(ctx);
}

ExtendedPoint perturbed_gradient(const FunctionalContext& ctx, const PerturbationMap& pert,
                                 const ExtendedPoint& w) {
    if (pert.operator_norm_bound(ctx) >= 0.5)
        throw DomainError("perturbed_gradient: perturbation norm bound >= 1/2");
    ExtendedPoint g = gradient(ctx, w);
    return sum(g, pert.apply(ctx, w, g));
}

double gk_pairing(const FunctionalContext& ctx, const PerturbationMap& pert,
                  const ExtendedPoint& w, const ExtendedPoint& xi, const ExtendedPoint& eta) {
    EBasis basis(ctx);
    const int n = basis.dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    double factor = pert.profile_factor(ctx, w);
    for (const auto& term : pert.k0.terms) {
        VectorXd l = basis.to_coords(term.left);
        VectorXd r = basis.to_coords(term.right);
        m += factor * l * r.transpose();
    }
    VectorXd rhs = basis.to_coords(eta);
    VectorXd solved = m.partialPivLu().solve(rhs);
    return basis.to_coords(xi).dot(solved);
}

std::string perturbation_to_json(const FunctionalContext& ctx, const PerturbationMap& pert) {
    EBasis basis(ctx);
    nlohmann::ordered_json j;
    j["use_bump"] = pert.use_bump;
    j["use_gaussian"] = pert.use_gaussian;
    auto coords = [&](const ExtendedPoint& w) {
        VectorXd x = basis.to_coords(w);
        return std::vector<double>(x.data(), x.data() + x.size());
    };
    j["center"] = coords(pert.center);
    auto& terms = j["terms"] = nlohmann::ordered_json::array();
    for (const auto& term : pert.k0.terms)
        terms.push_back({{"left", coords(term.left)}, {"right", coords(term.right)}});
    j["norm_bound"] = pert.operator_norm_bound(ctx);
    return j.dump();
}

}  // namespace rfh

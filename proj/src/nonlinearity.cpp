#include "rfh/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rfh {

namespace {

double coeff_at(const std::function<double(double)>& fn, double t) {
    return fn ? fn(t) : 1.0;
}

// d/du [ |u|^{e-1} u ] applied to tangent w (real-linear), guarded at u = 0.
cplx power_derivative(cplx u, double e, cplx w) {
    double r = std::abs(u);
    if (r == 0.0) return 0.0;
    return std::pow(r, e - 1.0) * w +
           (e - 1.0) * std::pow(r, e - 3.0) * (std::conj(u) * w).real() * u;
}

}  // namespace

NonlinearitySpec NonlinearitySpec::quadratic() {
    NonlinearitySpec nl;
    nl.kind = NonlinKind::Quadratic;
    return nl;
}

NonlinearitySpec NonlinearitySpec::power_type(double p, double q,
                                              std::function<double(double)> f,
                                              std::function<double(double)> g) {
    if (p <= 1.0 || q <= 1.0) throw DomainError("power_type: exponents must satisfy p, q > 1");
    NonlinearitySpec nl;
    nl.kind = NonlinKind::PowerType;
    nl.p = p;
    nl.q = q;
    nl.f = std::move(f);
    nl.g = std::move(g);
    return nl;
}

double evaluate_H(const NonlinearitySpec& spec, double t, cplx u, cplx v) {
    switch (spec.kind) {
        case NonlinKind::Quadratic:
            return 0.5 * (std::norm(u) + std::norm(v));
        case NonlinKind::PowerType:
            return coeff_at(spec.f, t) * std::pow(std::abs(u), spec.p + 1.0) / (spec.p + 1.0) +
                   coeff_at(spec.g, t) * std::pow(std::abs(v), spec.q + 1.0) / (spec.q + 1.0);
        case NonlinKind::Custom:
            if (!spec.eval) throw DomainError("evaluate_H: missing Custom eval callback");
            return spec.eval(u, v);
    }
    throw DomainError("evaluate_H: unknown kind");
}

FiberGradient evaluate_Hz(const NonlinearitySpec& spec, double t, cplx u, cplx v) {
    switch (spec.kind) {
        case NonlinKind::Quadratic:
            return {u, v};
        case NonlinKind::PowerType: {
            cplx hu = u == 0.0 ? cplx(0.0)
                               : coeff_at(spec.f, t) * std::pow(std::abs(u), spec.p - 1.0) * u;
            cplx hv = v == 0.0 ? cplx(0.0)
                               : coeff_at(spec.g, t) * std::pow(std::abs(v), spec.q - 1.0) * v;
            return {hu, hv};
        }
        case NonlinKind::Custom:
            if (!spec.eval_grad) throw DomainError("evaluate_Hz: missing Custom eval_grad callback");
            return spec.eval_grad(u, v);
    }
    throw DomainError("evaluate_Hz: unknown kind");
}

FiberGradient evaluate_Hzz(const NonlinearitySpec& spec, double t, cplx u, cplx v,
                           cplx wu, cplx wv) {
    switch (spec.kind) {
        case NonlinKind::Quadratic:
            return {wu, wv};
        case NonlinKind::PowerType:
            return {coeff_at(spec.f, t) * power_derivative(u, spec.p, wu),
                    coeff_at(spec.g, t) * power_derivative(v, spec.q, wv)};
        case NonlinKind::Custom:
            if (!spec.eval_hess) throw DomainError("evaluate_Hzz: missing Custom eval_hess callback");
            return spec.eval_hess(u, v, wu, wv);
    }
    throw DomainError("evaluate_Hzz: unknown kind");
}

ExponentWitness select_s(int n, double p, double q) {
    if (n < 1) throw DomainError("select_s: n must be >= 1");
    if (p <= 1.0 || q <= 1.0) throw DomainError("select_s: p, q must be > 1");
    ExponentWitness w;
    w.n = n;
    w.p = p;
    w.q = q;
    // p < (n+2s)/(n-2s)  <=>  s > n(p-1)/(2(p+1))   (auto for n <= 2s)
    // q < (n+2-2s)/(n+2s-2)  <=>  s < (n+2-q(n-2))/(2(q+1))   (auto for n+2s <= 2)
    w.s_lo = std::max(0.0, n * (p - 1.0) / (2.0 * (p + 1.0)));
    w.s_hi = std::min(1.0, (n + 2.0 - q * (n - 2.0)) / (2.0 * (q + 1.0)));
    if (w.s_lo >= w.s_hi) {
        std::ostringstream os;
        double lhs = 1.0 / (p + 1.0) + 1.0 / (q + 1.0);
        double rhs = (n - 1.0) / static_cast<double>(n);
        os << "select_s: no admissible s in (0,1): need s > " << w.s_lo << " from p < (n+2s)/(n-2s)"
           << " and s < " << w.s_hi << " from q < (n+2-2s)/(n+2s-2)"
           << " (exponent condition 1/(p+1)+1/(q+1) = " << lhs
           << (lhs > rhs ? " > " : " <= ") << rhs << " = (n-1)/n)";
        throw DomainError(os.str());
    }
    w.s = 0.5 * (w.s_lo + w.s_hi);
    return w;
}

double integral_H(const Spectrum& spec, const NonlinearitySpec& nl, const PairField& z,
                  int grid_points) {
    if (nl.kind == NonlinKind::Quadratic) return 0.5 * l2_norm_sq(z);
    GridSampling grid = to_grid(spec, z, grid_points);
    double sum = 0.0;
    for (int m = 0; m < grid.num_points; ++m) {
        double t = static_cast<double>(m) / grid.num_points;
        sum += evaluate_H(nl, t, grid.u[m], grid.v[m]);
    }
    return sum / grid.num_points;
}

PairField integral_H_gradient(const Spectrum& spec, const NonlinearitySpec& nl,
                              const PairField& z, int grid_points) {
    if (nl.kind == NonlinKind::Quadratic) return z;
    GridSampling grid = to_grid(spec, z, grid_points);
    GridSampling hz;
    hz.num_points = grid.num_points;
    hz.u.resize(grid.num_points);
    hz.v.resize(grid.num_points);
    for (int m = 0; m < grid.num_points; ++m) {
        double t = static_cast<double>(m) / grid.num_points;
        FiberGradient fg = evaluate_Hz(nl, t, grid.u[m], grid.v[m]);
        hz.u[m] = fg.hu;
        hz.v[m] = fg.hv;
    }
    return from_grid(spec, hz, z.s);
}

bool HypothesisReport::all_passed() const {
    return std::all_of(items.begin(), items.end(),
                       [](const Item& it) { return it.passed; });
}

HypothesisReport check_hypotheses(const NonlinearitySpec& nl, int sample_count, double box,
                                  unsigned seed, const Spectrum* field_spec, double s,
                                  int grid_points) {
    if (sample_count < 1) throw DomainError("check_hypotheses: sample_count must be >= 1");
    HypothesisReport report;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-box, box);

    HypothesisReport::Item h1{"H1", true, false, 1e300, ""};
    HypothesisReport::Item h2{"H2", true, false, 1e300, ""};
    HypothesisReport::Item h3{"H3", true, false, 1e300, ""};
    const double tol = 1e-12;

    for (int i = 0; i < sample_count; ++i) {
        cplx u(coord(rng), coord(rng));
        cplx v(coord(rng), coord(rng));
        double t = 0.5 * (coord(rng) / box + 1.0);  // position in [0,1)
        double H = evaluate_H(nl, t, u, v);
        FiberGradient fg = evaluate_Hz(nl, t, u, v);
        double pairing = (std::conj(fg.hu) * u).real() + (std::conj(fg.hv) * v).real();

        double m1 = pairing - 2.0 * H + nl.c0;
        if (m1 < h1.worst_margin) {
            h1.worst_margin = m1;
            if (m1 < -tol && h1.passed) {
                h1.passed = false;
                std::ostringstream os;
                os << "u=" << u << " v=" << v << " <Hz,z>=" << pairing << " 2H-c0="
                   << 2.0 * H - nl.c0;
                h1.witness = os.str();
            }
        }

        double bound_u = nl.c1 * (1.0 + std::pow(std::abs(u), nl.p) +
                                  std::pow(std::abs(v), nl.p * (nl.q + 1.0) / (nl.p + 1.0)));
        double bound_v = nl.c1 * (1.0 + std::pow(std::abs(u), nl.q * (nl.p + 1.0) / (nl.q + 1.0)) +
                                  std::pow(std::abs(v), nl.q));
        double m2 = std::min(bound_u - std::abs(fg.hu), bound_v - std::abs(fg.hv));
        if (m2 < h2.worst_margin) {
            h2.worst_margin = m2;
            if (m2 < -tol && h2.passed) {
                h2.passed = false;
                std::ostringstream os;
                os << "u=" << u << " v=" << v << " |Hu|=" << std::abs(fg.hu)
                   << " |Hv|=" << std::abs(fg.hv);
                h2.witness = os.str();
            }
        }

        // (H3) only outside the delta-ball where H need not be C^2
        if (std::sqrt(std::norm(u) + std::norm(v)) > nl.delta) {
            double huu = 0.0, hvv = 0.0, hmix = 0.0;
            for (cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
                FiberGradient du = evaluate_Hzz(nl, t, u, v, dir, 0.0);
                FiberGradient dv = evaluate_Hzz(nl, t, u, v, 0.0, dir);
                huu = std::max(huu, std::abs(du.hu));
                hvv = std::max(hvv, std::abs(dv.hv));
                hmix = std::max({hmix, std::abs(du.hv), std::abs(dv.hu)});
            }
            double m3 = std::min({nl.c2 * (1.0 + std::pow(std::abs(u), nl.p - 1.0)) - huu,
                                  nl.c2 * (1.0 + std::pow(std::abs(v), nl.q - 1.0)) - hvv,
                                  nl.c2 - hmix});
            if (m3 < h3.worst_margin) {
                h3.worst_margin = m3;
                if (m3 < -tol && h3.passed) {
                    h3.passed = false;
                    std::ostringstream os;
                    os << "u=" << u << " v=" << v << " |Huu|=" << huu << " |Hvv|=" << hvv;
                    h3.witness = os.str();
                }
            }
        }
    }

    report.items.push_back(h1);
    report.items.push_back(h2);
    report.items.push_back(h3);

    // (H4): sampled boundedness of z -> (H_u, H_v) in dual Lebesgue norms
    // over random fields with \int H <= a. Heuristic by construction.
    HypothesisReport::Item h4{"H4", true, true, 0.0, ""};
    if (field_spec && field_spec->model == SpectrumModel::Circle) {
        const double a = 10.0;
        const int n_fields = std::min(sample_count, 64);
        int gp = grid_points > 0 ? grid_points : 8 * field_spec->num_modes;
        std::normal_distribution<double> gauss(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < n_fields; ++i) {
            PairField z = PairField::zero(*field_spec, s);
            for (int k = 0; k < field_spec->mode_count(); ++k) {
                z.u[k] = cplx(gauss(rng), gauss(rng));
                z.v[k] = cplx(gauss(rng), gauss(rng));
            }
            for (int it = 0; it < 16; ++it) {
                double ih = integral_H(*field_spec, nl, z, gp);
                if (ih <= a) break;
                double scale = std::sqrt(a / ih);
                z.u *= scale;
                z.v *= scale;
            }
            GridSampling grid = to_grid(*field_spec, z, gp);
            double ru = 2.0 / (1.0 + 2.0 * s);          // 2n/(n+2s), n = 1
            double rv = 2.0 / (1.0 + 2.0 * (1.0 - s));  // 2n/(n+2(1-s))
            double su = 0.0, sv = 0.0;
            for (int m = 0; m < gp; ++m) {
                double t = static_cast<double>(m) / gp;
                FiberGradient fg = evaluate_Hz(nl, t, grid.u[m], grid.v[m]);
                su += std::pow(std::abs(fg.hu), ru);
                sv += std::pow(std::abs(fg.hv), rv);
            }
            double norm = std::pow(su / gp, 1.0 / ru) + std::pow(sv / gp, 1.0 / rv);
            worst = std::max(worst, norm);
        }
        h4.worst_margin = worst;
    } else {
        h4.witness = "skipped: no circle spectrum supplied";
    }
    report.items.push_back(h4);
    return report;
}

}  // namespace rfh

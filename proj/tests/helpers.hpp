#pragma once

#include <random>

#include "rfh/config.hpp"
#include "rfh/critical.hpp"
#include "rfh/homology.hpp"

namespace rfh::testing {

inline PairField random_field(const Spectrum& spec, double s, std::mt19937_64& rng,
                              double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    PairField z = PairField::zero(spec, s);
    for (int i = 0; i < spec.mode_count(); ++i) {
        z.u[i] = scale * cplx(gauss(rng), gauss(rng));
        z.v[i] = scale * cplx(gauss(rng), gauss(rng));
    }
    return z;
}

inline ExtendedPoint random_point(const Spectrum& spec, double s, std::mt19937_64& rng,
                                  double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    return {random_field(spec, s, rng, scale), scale * gauss(rng)};
}

/// H = (1 + eps) * (|u|^2 + |v|^2) / 2 as a Custom nonlinearity.
inline NonlinearitySpec scaled_quadratic(double eps) {
    NonlinearitySpec nl;
    nl.kind = NonlinKind::Custom;
    double c = 1.0 + eps;
    nl.eval = [c](cplx u, cplx v) { return 0.5 * c * (std::norm(u) + std::norm(v)); };
    nl.eval_grad = [c](cplx u, cplx v) { return FiberGradient{c * u, c * v}; };
    nl.eval_hess = [c](cplx, cplx, cplx wu, cplx wv) {
        return FiberGradient{c * wu, c * wv};
    };
    return nl;
}

}  // namespace rfh::testing

#include "rfh/field.hpp"

#include <cmath>

namespace rfh {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

void check_sizes(const Spectrum& spec, const PairField& z, const char* where) {
    if (z.u.size() != spec.mode_count() || z.v.size() != spec.mode_count())
        throw DomainError(std::string(where) + ": field size does not match spectrum truncation");
}
}  // namespace

PairField PairField::zero(const Spectrum& spec, double s) {
    PairField z;
    z.u = VectorXcd::Zero(spec.mode_count());
    z.v = VectorXcd::Zero(spec.mode_count());
    z.s = s;
    return z;
}

double l2_norm_sq(const PairField& z) {
    return z.u.squaredNorm() + z.v.squaredNorm();
}

double es_norm_sq(const Spectrum& spec, const PairField& z) {
    double sum = 0.0;
    for (int i = 0; i < spec.mode_count(); ++i) {
        double al = std::abs(spec.modes[i]);
        sum += std::pow(al, 2.0 * z.s) * std::norm(z.u[i]);
        sum += std::pow(al, 2.0 * (1.0 - z.s)) * std::norm(z.v[i]);
    }
    return sum;
}

double l2_inner(const PairField& a, const PairField& b) {
    return (a.u.dot(b.u) + a.v.dot(b.v)).real();
}

double es_inner(const Spectrum& spec, const PairField& a, const PairField& b) {
    double sum = 0.0;
    for (int i = 0; i < spec.mode_count(); ++i) {
        double al = std::abs(spec.modes[i]);
        sum += std::pow(al, 2.0 * a.s) * (std::conj(a.u[i]) * b.u[i]).real();
        sum += std::pow(al, 2.0 * (1.0 - a.s)) * (std::conj(a.v[i]) * b.v[i]).real();
    }
    return sum;
}

double e_inner(const Spectrum& spec, const ExtendedPoint& a, const ExtendedPoint& b) {
    return es_inner(spec, a.z, b.z) + a.lambda * b.lambda;
}

double e_norm(const Spectrum& spec, const ExtendedPoint& a) {
    return std::sqrt(e_inner(spec, a, a));
}

VectorXcd fractional_power_apply(const Spectrum& spec, const VectorXcd& coeffs, double r) {
    if (coeffs.size() != spec.mode_count())
        throw DomainError("fractional_power_apply: size mismatch");
    VectorXcd out(coeffs.size());
    for (int i = 0; i < coeffs.size(); ++i)
        out[i] = std::pow(std::abs(spec.modes[i]), r) * coeffs[i];
    return out;
}

PairField ds_apply(const Spectrum& spec, const PairField& z) {
    check_sizes(spec, z, "ds_apply");
    PairField out = z;
    out.u = fractional_power_apply(spec, z.u, -2.0 * z.s);
    out.v = fractional_power_apply(spec, z.v, -2.0 * (1.0 - z.s));
    return out;
}

PairField l_apply(const Spectrum& spec, const PairField& z) {
    check_sizes(spec, z, "l_apply");
    PairField out = z;
    out.u.resize(z.u.size());
    out.v.resize(z.v.size());
    for (int i = 0; i < spec.mode_count(); ++i) {
        out.u[i] = spec.modes[i] * z.v[i];
        out.v[i] = spec.modes[i] * z.u[i];
    }
    return out;
}

namespace {
PairField p_apply(const Spectrum& spec, const PairField& z, double sign) {
    PairField out = z;
    for (int i = 0; i < spec.mode_count(); ++i) {
        double lam = spec.modes[i];
        double al = std::abs(lam);
        cplx cross_u = sign * std::pow(al, -2.0 * z.s) * lam * z.v[i];
        cplx cross_v = sign * std::pow(al, -2.0 * (1.0 - z.s)) * lam * z.u[i];
        out.u[i] = 0.5 * (z.u[i] + cross_u);
        out.v[i] = 0.5 * (z.v[i] + cross_v);
    }
    return out;
}
}  // namespace

PairField p_plus_apply(const Spectrum& spec, const PairField& z) {
    check_sizes(spec, z, "p_plus_apply");
    return p_apply(spec, z, +1.0);
}

PairField p_minus_apply(const Spectrum& spec, const PairField& z) {
    check_sizes(spec, z, "p_minus_apply");
    return p_apply(spec, z, -1.0);
}

GridSampling to_grid(const Spectrum& spec, const PairField& z, int num_points) {
    if (spec.model != SpectrumModel::Circle)
        throw DomainError("to_grid: grid sampling requires the circle model");
    check_sizes(spec, z, "to_grid");
    if (num_points < 2 * spec.num_modes)
        throw DomainError("to_grid: grid too coarse for band (need >= 2*num_modes points)");
    GridSampling grid;
    grid.num_points = num_points;
    grid.u = VectorXcd::Zero(num_points);
    grid.v = VectorXcd::Zero(num_points);
    for (int m = 0; m < num_points; ++m) {
        double t = static_cast<double>(m) / num_points;
        for (int i = 0; i < spec.mode_count(); ++i) {
            // basis function exp(2*pi*i*(j+1/2)*t)
            cplx phase = std::polar(1.0, kTwoPi * (spec.freqs[i] + 0.5) * t);
            grid.u[m] += z.u[i] * phase;
            grid.v[m] += z.v[i] * phase;
        }
    }
    return grid;
}

PairField from_grid(const Spectrum& spec, const GridSampling& grid, double s) {
    if (spec.model != SpectrumModel::Circle)
        throw DomainError("from_grid: grid sampling requires the circle model");
    if (grid.num_points < 2 * spec.num_modes)
        throw DomainError("from_grid: grid too coarse for band");
    PairField z = PairField::zero(spec, s);
    const int n = grid.num_points;
    for (int i = 0; i < spec.mode_count(); ++i) {
        cplx au = 0.0, av = 0.0;
        for (int m = 0; m < n; ++m) {
            double t = static_cast<double>(m) / n;
            cplx phase = std::polar(1.0, -kTwoPi * (spec.freqs[i] + 0.5) * t);
            au += grid.u[m] * phase;
            av += grid.v[m] * phase;
        }
        z.u[i] = au / static_cast<double>(n);
        z.v[i] = av / static_cast<double>(n);
    }
    return z;
}

double grid_quadrature(const Eigen::VectorXd& values) {
    if (values.size() == 0) return 0.0;
    return values.sum() / static_cast<double>(values.size());
}

}  // namespace rfh

#include "rfh/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"

namespace rfh {

namespace {
constexpr double kPi = 3.14159265358979323846;

void flatten_modes(Spectrum& spec) {
    spec.modes.clear();
    for (const auto& lv : spec.levels)
        for (int i = 0; i < lv.multiplicity; ++i) spec.modes.push_back(lv.lambda);
}
}  // namespace

const LLevel& LSpectrum::level(int k) const {
    for (const auto& lv : levels)
        if (lv.k == k) return lv;
    throw DomainError("l_spectrum: no level with index k=" + std::to_string(k));
}

bool LSpectrum::has_level(int k) const {
    return std::any_of(levels.begin(), levels.end(),
                       [k](const LLevel& lv) { return lv.k == k; });
}

Spectrum build_circle_spectrum(int num_modes) {
    if (num_modes < 1) throw DomainError("build_circle_spectrum: num_modes must be >= 1");
    Spectrum spec;
    spec.model = SpectrumModel::Circle;
    spec.num_modes = num_modes;
    // frequencies j = -num_modes .. num_modes-1, eigenvalue 2*pi*(j+1/2)
    for (long j = -num_modes; j < num_modes; ++j) {
        spec.levels.push_back({2.0 * kPi * (static_cast<double>(j) + 0.5), 1});
        spec.freqs.push_back(j);
    }
    flatten_modes(spec);
    return spec;
}

Spectrum build_synthetic_spectrum(const std::vector<DLevel>& levels) {
    if (levels.empty()) throw DomainError("build_synthetic_spectrum: empty level list");
    std::map<double, int> merged;
    for (const auto& lv : levels) {
        if (lv.lambda == 0.0)
            throw DomainError("build_synthetic_spectrum: 0 is not allowed in Spec(D)");
        if (lv.multiplicity < 1)
            throw DomainError("build_synthetic_spectrum: multiplicity must be >= 1");
        merged[lv.lambda] += lv.multiplicity;
    }
    Spectrum spec;
    spec.model = SpectrumModel::Synthetic;
    for (const auto& [lambda, m] : merged) spec.levels.push_back({lambda, m});
    flatten_modes(spec);
    return spec;
}

LSpectrum l_spectrum(const Spectrum& spec) {
    // m_L(lb) = m_D(lb) + m_D(-lb); eigenvectors (phi, phi) and (phi, -phi).
    std::map<double, int> mult;
    for (const auto& lv : spec.levels) {
        mult[lv.lambda] += lv.multiplicity;
        mult[-lv.lambda] += 0;  // ensure the mirrored eigenvalue is present
    }
    for (const auto& lv : spec.levels) mult[-lv.lambda] += lv.multiplicity;

    LSpectrum ls;
    std::vector<std::pair<double, int>> ordered(mult.begin(), mult.end());
    int n_neg = 0;
    for (const auto& [lambda, m] : ordered)
        if (lambda < 0 && m > 0) ++n_neg;
    int k = -n_neg;
    for (const auto& [lambda, m] : ordered) {
        if (m == 0) continue;
        if (k == 0) ++k;  // skip index 0
        ls.levels.push_back({k, lambda, m});
        ++k;
    }
    return ls;
}

std::string spectrum_to_json(const Spectrum& spec) {
    nlohmann::ordered_json j;
    j["model"] = spec.model == SpectrumModel::Circle ? "circle" : "synthetic";
    if (spec.model == SpectrumModel::Circle) j["num_modes"] = spec.num_modes;
    auto& evs = j["eigenvalues"] = nlohmann::ordered_json::array();
    for (const auto& lv : spec.levels) evs.push_back({lv.lambda, lv.multiplicity});
    return j.dump();
}

Spectrum spectrum_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::string model = j.at("model").get<std::string>();
    if (model == "circle") return build_circle_spectrum(j.at("num_modes").get<int>());
    if (model != "synthetic") throw DomainError("spectrum_from_json: unknown model " + model);
    std::vector<DLevel> levels;
    for (const auto& e : j.at("eigenvalues"))
        levels.push_back({e.at(0).get<double>(), e.at(1).get<int>()});
    return build_synthetic_spectrum(levels);
}

}  // namespace rfh

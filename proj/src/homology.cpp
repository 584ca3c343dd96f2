#include "rfh/homology.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rfh {

std::vector<int> ChainComplexZ2::generators_in_degree(int degree) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(generators.size()); ++i)
        if (generators[i].degree == degree) out.push_back(i);
    return out;
}

void ChainComplexZ2::add_generator(std::string label, int degree, int component_k) {
    generators.push_back({std::move(label), degree, component_k});
}

void ChainComplexZ2::set_entry(int from, int to, int bit, EntryProvenance prov) {
    if (generators.at(from).degree != generators.at(to).degree + 1)
        throw DomainError("ChainComplexZ2: boundary entry must drop degree by one");
    for (auto& e : entries) {
        if (e.from == from && e.to == to) {
            e.bit = bit;
            e.provenance = prov;
            return;
        }
    }
    entries.push_back({from, to, bit, prov});
}

const HomologyResult::Row* HomologyResult::row(int degree) const {
    for (const auto& r : rows)
        if (r.degree == degree) return &r;
    return nullptr;
}

ChainComplexZ2 assemble_h0_complex(const LSpectrum& lspec, int nu_min, int nu_max) {
    ChainComplexZ2 cx;
    struct Gen {
        int index;
        int component_k;
        bool is_plus;
    };
    for (const auto& level : lspec.levels) {
        for (int which : {-1, +1}) {
            AnalyticIndex ai = analytic_index_oracle(lspec, level.k, which);
            if (ai.nu < nu_min || ai.nu > nu_max) continue;
            std::string label = "p_" + std::to_string(level.k) + (which == 1 ? "+" : "-");
            cx.add_generator(label, ai.nu, level.k);
        }
    }

    // within-component boundary p_k^+ -> p_k^- is zero: two flow lines when
    // m_k = 1, degree gap >= 3 otherwise (no entry needed in the latter case)
    for (const auto& level : lspec.levels) {
        if (level.multiplicity != 1) continue;
        int from = -1, to = -1;
        for (int i = 0; i < static_cast<int>(cx.generators.size()); ++i) {
            if (cx.generators[i].component_k != level.k) continue;
            if (cx.generators[i].label.back() == '+') from = i;
            if (cx.generators[i].label.back() == '-') to = i;
        }
        if (from >= 0 && to >= 0 &&
            cx.generators[from].degree == cx.generators[to].degree + 1)
            cx.set_entry(from, to, 0, EntryProvenance::Analytic);
    }

    // cross-component adjacent-degree pairs are not determined analytically
    for (int i = 0; i < static_cast<int>(cx.generators.size()); ++i) {
        for (int j = 0; j < static_cast<int>(cx.generators.size()); ++j) {
            if (cx.generators[i].component_k == cx.generators[j].component_k) continue;
            if (cx.generators[i].degree != cx.generators[j].degree + 1) continue;
            bool present = std::any_of(cx.entries.begin(), cx.entries.end(),
                                       [&](const ChainComplexZ2::Entry& e) {
                                           return e.from == i && e.to == j;
                                       });
            if (!present) cx.entries.push_back({i, j, 0, EntryProvenance::Unknown});
        }
    }
    return cx;
}

namespace {

int gf2_rank(std::vector<std::vector<int>> m) {
    if (m.empty()) return 0;
    int rows = static_cast<int>(m.size());
    int cols = static_cast<int>(m[0].size());
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][c]) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(m[rank], m[pivot]);
        for (int r = 0; r < rows; ++r)
            if (r != rank && m[r][c])
                for (int cc = 0; cc < cols; ++cc) m[r][cc] ^= m[rank][cc];
        ++rank;
    }
    return rank;
}

}  // namespace

HomologyResult homology(const ChainComplexZ2& cx) {
    std::set<int> degrees;
    for (const auto& g : cx.generators) degrees.insert(g.degree);

    auto entry_for = [&](int from, int to) -> const ChainComplexZ2::Entry* {
        for (const auto& e : cx.entries)
            if (e.from == from && e.to == to) return &e;
        return nullptr;
    };

    // d^2 = 0 on fully specified compositions
    for (int from = 0; from < static_cast<int>(cx.generators.size()); ++from) {
        int d = cx.generators[from].degree;
        for (int to : cx.generators_in_degree(d - 2)) {
            int sum = 0;
            bool all_specified = true;
            for (int mid : cx.generators_in_degree(d - 1)) {
                const auto* e1 = entry_for(from, mid);
                const auto* e2 = entry_for(mid, to);
                int b1 = e1 ? e1->bit : 0;
                int b2 = e2 ? e2->bit : 0;
                bool u1 = e1 && e1->provenance == EntryProvenance::Unknown;
                bool u2 = e2 && e2->provenance == EntryProvenance::Unknown;
                if ((u1 && (u2 || b2)) || (u2 && b1)) {
                    all_specified = false;
                    break;
                }
                sum ^= (u1 || u2) ? 0 : (b1 & b2);
            }
            if (all_specified && sum != 0)
                throw DomainError("homology: d^2 != 0 between " + cx.generators[from].label +
                                  " and " + cx.generators[to].label);
        }
    }

    auto boundary_info = [&](int degree, int& rank, bool& has_unknown) {
        // matrix of d_degree : C_degree -> C_{degree-1}
        std::vector<int> from = cx.generators_in_degree(degree);
        std::vector<int> to = cx.generators_in_degree(degree - 1);
        has_unknown = false;
        std::vector<std::vector<int>> m(from.size(), std::vector<int>(to.size(), 0));
        for (std::size_t i = 0; i < from.size(); ++i)
            for (std::size_t j = 0; j < to.size(); ++j) {
                const auto* e = entry_for(from[i], to[j]);
                if (!e) continue;  // structural zero
                if (e->provenance == EntryProvenance::Unknown)
                    has_unknown = true;
                else
                    m[i][j] = e->bit & 1;
            }
        rank = to.empty() || from.empty() ? 0 : gf2_rank(std::move(m));
    };

    HomologyResult result;
    for (int d : degrees) {
        int dim_c = static_cast<int>(cx.generators_in_degree(d).size());
        int rank_out = 0, rank_in = 0;
        bool unknown_out = false, unknown_in = false;
        boundary_info(d, rank_out, unknown_out);
        boundary_info(d + 1, rank_in, unknown_in);
        HomologyResult::Row row;
        row.degree = d;
        row.dim = dim_c - rank_out - rank_in;
        row.confidence = (unknown_out || unknown_in)
                             ? DegreeConfidence::ConditionalOnUnknownEntries
                             : DegreeConfidence::Exact;
        result.rows.push_back(row);
    }
    return result;
}

ShootingReport shoot_connecting_orbits(const FunctionalContext& ctx,
                                       const PerturbationMap* pert,
                                       const CriticalPoint& cp_from,
                                       const CriticalPoint& cp_to, int bundle_size,
                                       double horizon, unsigned seed, double eps,
                                       double delta) {
    ShootingReport rep;
    if (bundle_size < 1) return rep;
    EBasis basis(ctx);

    double dist_from_to =
        std::abs(action(ctx, cp_from.w) - action(ctx, cp_to.w));
    if (dist_from_to == 0.0 && e_norm(ctx.spectrum, cp_from.w) == e_norm(ctx.spectrum, cp_to.w)) {
        // same point (or same component at equal action): no nonconstant
        // orbit is sought; the R-action quotient is empty
        VectorXd d = basis.to_coords(cp_from.w) - basis.to_coords(cp_to.w);
        if (d.norm() < 1e-12) return rep;
    }
    if (action(ctx, cp_to.w) > action(ctx, cp_from.w) + 1e-12) return rep;

    HessianForm hess = hessian_form(ctx, cp_from.w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hess.matrix);
    std::vector<int> negative;
    for (int i = 0; i < solver.eigenvalues().size(); ++i)
        if (solver.eigenvalues()[i] < -hess.kernel_tolerance) negative.push_back(i);
    if (negative.empty()) return rep;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorXd x0 = basis.to_coords(cp_from.w);
    VectorXd xt = basis.to_coords(cp_to.w);

    FlowOptions opts;
    opts.horizon = horizon;
    opts.abs_tol = opts.rel_tol = 1e-9;
    opts.stationary_threshold = 1e-10;

    for (int b = 0; b < bundle_size; ++b) {
        VectorXd dir = VectorXd::Zero(basis.dim());
        for (int i : negative) dir += gauss(rng) * solver.eigenvectors().col(i);
        if (dir.norm() == 0.0) continue;
        dir *= eps / dir.norm();
        ++rep.launched;
        FlowTrajectory traj = integrate_flow(ctx, pert, basis.from_coords(x0 + dir), opts);
        if (traj.states.empty()) continue;
        if (!traj.stats.converged && !traj.stats.diverged) rep.budget_exhausted = true;
        VectorXd final = traj.states.back();
        if ((final - xt).norm() < delta ||
            (cp_to.manifold_k != 0 && std::abs(traj.lambda.back() - cp_to.w.lambda) < delta &&
             std::abs(traj.z_norm_es.back() -
                      std::sqrt(es_norm_sq(ctx.spectrum, cp_to.w.z))) < delta))
            ++rep.arrived;
    }
    rep.mod2 = rep.arrived % 2;
    return rep;
}

std::string complex_to_json(const ChainComplexZ2& cx) {
    nlohmann::ordered_json j;
    auto& gens = j["generators"] = nlohmann::ordered_json::array();
    for (const auto& g : cx.generators)
        gens.push_back({{"label", g.label}, {"nu", g.degree}, {"component", g.component_k}});
    auto prov_name = [](EntryProvenance p) {
        switch (p) {
            case EntryProvenance::StructuralZero: return "structural-zero";
            case EntryProvenance::Analytic: return "analytic";
            case EntryProvenance::Numerical: return "numerical";
            case EntryProvenance::Unknown: return "unknown";
        }
        return "unknown";
    };
    auto& entries = j["boundary"] = nlohmann::ordered_json::array();
    for (const auto& e : cx.entries)
        entries.push_back({{"from", cx.generators[e.from].label},
                           {"to", cx.generators[e.to].label},
                           {"bit", e.bit},
                           {"provenance", prov_name(e.provenance)}});
    return j.dump();
}

std::string homology_to_json(const HomologyResult& result) {
    nlohmann::ordered_json j;
    auto& rows = j["homology"] = nlohmann::ordered_json::array();
    for (const auto& r : result.rows)
        rows.push_back({{"degree", r.degree},
                        {"dim", r.dim},
                        {"confidence", r.confidence == DegreeConfidence::Exact
                                           ? "exact"
                                           : "conditional-on-unknown-entries"}});
    return j.dump();
}

}  // namespace rfh

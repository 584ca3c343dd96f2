#pragma once

#include <map>

#include "rfh/critical.hpp"
#include "rfh/flow.hpp"

namespace rfh {

enum class EntryProvenance { StructuralZero, Analytic, Numerical, Unknown };

/// Graded Z2 chain complex on labeled generators with per-entry provenance.
/// Entries not stored are structural zeros (no adjacent-degree pair).
struct ChainComplexZ2 {
    struct Generator {
        std::string label;
        int degree = 0;      // grading nu
        int component_k = 0; // H0 component tag, 0 if none
    };
    struct Entry {
        int from = 0;  // generator index, degree d
        int to = 0;    // generator index, degree d-1
        int bit = 0;   // value mod 2 (ignored when provenance Unknown)
        EntryProvenance provenance = EntryProvenance::Unknown;
    };
    std::vector<Generator> generators;
    std::vector<Entry> entries;

    std::vector<int> generators_in_degree(int degree) const;
    void add_generator(std::string label, int degree, int component_k = 0);
    void set_entry(int from, int to, int bit, EntryProvenance prov);
};

enum class DegreeConfidence { Exact, ConditionalOnUnknownEntries };

struct HomologyResult {
    struct Row {
        int degree = 0;
        int dim = 0;
        DegreeConfidence confidence = DegreeConfidence::Exact;
    };
    std::vector<Row> rows;

    const Row* row(int degree) const;
};

/// Assembles the H0 Morse-Bott complex: generators p_k^+- with degrees from
/// the analytic index formulas. Within-component boundaries p_k^+ -> p_k^-
/// are zero (two flow lines for m_k = 1, degree gap >= 3 otherwise);
/// cross-component adjacent-degree entries are marked unknown.
ChainComplexZ2 assemble_h0_complex(const LSpectrum& lspec, int nu_min, int nu_max);

/// Mod-2 homology per degree via Gaussian elimination. Degrees whose
/// incoming and outgoing boundaries are fully determined are exact; degrees
/// touching unknown entries are conditional. Throws DomainError if the
/// specified entries violate d^2 = 0.
HomologyResult homology(const ChainComplexZ2& cx);

struct ShootingReport {
    int launched = 0;
    int arrived = 0;
    int mod2 = 0;
    bool heuristic = true;   // always: shooting counts never feed exact entries
    bool budget_exhausted = false;
};

/// Experimental connecting-orbit counter: launches flow trajectories from an
/// epsilon-sphere in the negative-eigenvector span at cp_from and counts
/// arrivals in a delta-ball around cp_to.
ShootingReport shoot_connecting_orbits(const FunctionalContext& ctx,
                                       const PerturbationMap* pert,
                                       const CriticalPoint& cp_from,
                                       const CriticalPoint& cp_to, int bundle_size,
                                       double horizon, unsigned seed,
                                       double eps = 1e-2, double delta = 1e-3);

std::string complex_to_json(const ChainComplexZ2& cx);
std::string homology_to_json(const HomologyResult& result);

}  // namespace rfh

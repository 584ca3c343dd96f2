#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfh {

using cplx = std::complex<double>;

/// Thrown when a configuration or argument violates a documented precondition.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SpectrumModel { Circle, Synthetic };

/// One eigenvalue of D with its complex multiplicity.
struct DLevel {
    double lambda = 0.0;
    int multiplicity = 1;
};

/// Eigenvalue data of the Dirac operator D, truncated to a finite window.
///
/// The circle model (circumference 1, antiperiodic spin structure) has
/// eigenvalues 2*pi*(j + 1/2), j in Z, each simple. A synthetic spectrum is
/// an arbitrary list of nonzero eigenvalues with multiplicities; it carries
/// no grid realization and is used for index/homology machinery only.
struct Spectrum {
    SpectrumModel model = SpectrumModel::Synthetic;
    int num_modes = 0;                 // circle parameter; 0 for synthetic
    std::vector<DLevel> levels;        // strictly increasing, all nonzero
    std::vector<double> modes;         // one entry per complex mode (flattened)
    std::vector<long> freqs;           // circle only: frequency j per mode

    int mode_count() const { return static_cast<int>(modes.size()); }
};

/// One eigenvalue of the doubled operator L = [[0,D],[D,0]].
struct LLevel {
    int k = 0;           // index in Z \ {0}, ordered by eigenvalue
    double lambda = 0.0;
    int multiplicity = 1;
};

struct LSpectrum {
    std::vector<LLevel> levels;  // ordered by eigenvalue; k runs -N..-1, 1..N

    const LLevel& level(int k) const;
    bool has_level(int k) const;
};

/// Circle spectrum with eigenvalues {±2*pi*(j+1/2) : 0 <= j < num_modes}.
Spectrum build_circle_spectrum(int num_modes);

/// Synthetic spectrum from (eigenvalue, multiplicity) pairs. Eigenvalues must
/// be nonzero; the list is sorted and merged.
Spectrum build_synthetic_spectrum(const std::vector<DLevel>& levels);

/// Spectrum of L: each eigenvalue lb appears with multiplicity
/// m_D(lb) + m_D(-lb), from the eigenvectors (phi, phi) and (phi, -phi).
LSpectrum l_spectrum(const Spectrum& spec);

std::string spectrum_to_json(const Spectrum& spec);
Spectrum spectrum_from_json(const std::string& text);

}  // namespace rfh

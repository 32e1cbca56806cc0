#ifndef DDRSIM_ATOMIC_HPP
#define DDRSIM_ATOMIC_HPP

#include <array>
#include <complex>
#include <optional>

#include "ddrsim/errors.hpp"

namespace ddr {

using complexd = std::complex<double>;

/// Medium constants. Rates are in units of the radiative branch rate gamma
/// (so gamma itself is 1 by default); lengths are in cm.
struct AtomicParams {
    double gamma = 1.0;      ///< radiative decay rate of each branch |4> -> |i>
    double Gamma_c = 1e-4;   ///< ground-state dephasing rate (Gamma = gamma_c)
    double r = 0.0;          ///< incoherent pump rate on |1> <-> |4>
    double density_N = 5e11; ///< atoms per cm^3
    double lambda1 = 780e-7; ///< probe wavelength, cm
    double lambda2 = 780e-7; ///< control wavelength, cm
    /// Dimensionless susceptibility prefactor N |d41|^2 / (hbar gamma).
    /// Left unset it is derived from the Einstein-A relation, 3 N lambda1^3 / (32 pi^3).
    std::optional<double> coupling_C0;

    double coupling() const;
    double k1() const;
    double k2() const;
    void validate() const; // throws std::invalid_argument
};

/// Optical driving at one point: Rabi amplitudes and detunings, all in gamma units.
struct DriveConfig {
    complexd G{1.0, 0.0};     ///< control Rabi frequency
    complexd Omega{0.0, 0.0}; ///< microwave Rabi frequency
    double delta1 = 0.0;      ///< probe detuning
    double delta2 = 0.0;      ///< control detuning
    double delta3 = 0.0;      ///< microwave detuning
    void validate() const;
};

/// Complex damping+detuning rates of the six independent coherences.
struct ComplexRates {
    complexd g21, g23, g24, g31, g34, g41;
};

/// Zeroth-order (probe-free) level occupations and the closed-form denominator.
struct Populations0 {
    double rho11 = 0, rho22 = 0, rho33 = 0, rho44 = 0;
    double denom = 0; ///< closed-form D; 0 marks an oracle-sourced result
};

/// First-order probe response: coherence rho41^(+) (units 1/gamma) and chi41.
struct Susceptibility {
    complexd chi;
    complexd rho41;
};

using DensityMatrix = std::array<std::array<complexd, 4>, 4>;

ComplexRates complex_rates(const AtomicParams& p, const DriveConfig& d);

/// Closed-form zeroth-order populations. Throws DegenerateParameters when the
/// shared denominator falls below denom_floor (the Omega=0 && r=0 or G-degenerate
/// regimes); callers fall back to oracle_populations.
Populations0 zeroth_order_populations(const AtomicParams& p, const DriveConfig& d,
                                      double denom_floor = 1e-30);

/// Full steady-state density matrix from the 16-equation linear solve with the
/// trace constraint replacing the redundant population row. g is the probe Rabi
/// amplitude (gamma units).
DensityMatrix steady_state_oracle(const AtomicParams& p, const DriveConfig& d, complexd g);

/// Zeroth-order populations from the g=0 oracle solve. r=0 short-circuits to
/// the exact limit (1,0,0,0); other rank-deficient corners with a unique limit
/// branch are pinned; anything else throws SingularSystem.
Populations0 oracle_populations(const AtomicParams& p, const DriveConfig& d);

/// First-order coherence rho41^(+) with explicitly supplied populations.
complexd rho41_plus(const AtomicParams& p, const DriveConfig& d, const Populations0& pop);

/// rho41^(+) using the closed-form populations, falling back to the oracle on
/// degeneracy. Propagates SingularSystem when no branch applies.
complexd rho41_plus(const AtomicParams& p, const DriveConfig& d);

/// Linear probe susceptibility chi41 = C0 * gamma * rho41^(+).
Susceptibility chi41(const AtomicParams& p, const DriveConfig& d);

} // namespace ddr

#endif

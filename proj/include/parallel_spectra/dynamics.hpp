#pragma once

#include <string>
#include <vector>

#include "parallel_spectra/correspondence.hpp"
#include "parallel_spectra/lattice.hpp"
#include "parallel_spectra/types.hpp"

namespace paraspec {

// Schroedinger time evolution under the triple and the probability audit.

/// exp(-i M t) by scaling-and-squaring (Pade); no eigendecomposition, so it
/// stays exact-capable at exceptional points.
Matrix matrix_exponential(const Matrix& m, double t);

struct Propagator {
    Matrix matrix; ///< exp(-i M dt)
    std::string generator;
    double dt = 0.0;
};

Propagator make_propagator(const Matrix& m, double dt, std::string generator_tag = "");

/// Per-site Dirac probabilities of one evolving state.
struct StateTrack {
    std::string label;
    RealMatrix site_probabilities; ///< n_times x n_sites
    Eigen::VectorXd norm_sq;       ///< n_times
};

struct EvolutionTrace {
    std::vector<double> times;
    std::vector<StateTrack> tracks;
    /// Filled by parallel_evolve only:
    std::vector<Complex> overlap_phi_phitilde; ///< <phi(t)|phi_tilde(t)>
    std::vector<double> superposition_defect;  ///< ||psi(t) - phi(t) - phi_tilde(t)||
};

/// Evolves `state` under M through the given non-decreasing time grid
/// (starting from t = 0). Exponentials are cached per distinct step size, so
/// a uniform grid costs a single one.
EvolutionTrace evolve(const StateVector& state, const Matrix& m,
                      const std::vector<double>& times, std::string label = "state");

struct ExpansionCoefficients {
    Eigen::VectorXcd c; ///< c_n = <psi_n|psi(0)>
    double truncation_residual = 0.0; ///< ||psi(0) - sum c_n psi_n||
    StateVector psi0;       ///< projection sum c_n psi_n
    StateVector phi0;       ///< sum c_n phi_n
    StateVector phi_tilde0; ///< sum c_n phi_tilde_n
};

ExpansionCoefficients expand_in_common_subspace(const StateVector& psi0,
                                                const std::vector<CorrespondenceTriplet>& family);

/// Evolves phi under Hn, phi_tilde under HnDag and psi under H on a shared
/// grid, recording the superposition defect per time.
EvolutionTrace parallel_evolve(const HamiltonianTriple& triple, const StateVector& phi0,
                               const StateVector& phi_tilde0, const StateVector& psi0,
                               const std::vector<double>& times);

/// Max-over-time deviations of the conservation identities.
struct AuditReport {
    double psi_norm_dev = 0.0;       ///< | ||psi||^2 - 1 |
    double phi_norm_dev = 0.0;       ///< | ||phi||^2 - ||phi(0)||^2 |
    double phi_tilde_norm_dev = 0.0; ///< same for phi_tilde
    double overlap_dev = 0.0;        ///< | <phi|phi_tilde> - theta |
    double identity_dev = 0.0;       ///< | ||psi||^2 - ||phi||^2 - ||phi_tilde||^2 - 2 Re<phi|phi_tilde> |
    double balance_dev = 0.0;        ///< | ||phi||^2 - ||phi_tilde||^2 |
    double max_defect = 0.0;         ///< max ||psi - phi - phi_tilde||
    Complex theta = 0.0;             ///< <phi(0)|phi_tilde(0)>
};

AuditReport probability_audit(const EvolutionTrace& trace);

/// {0, dt, 2 dt, ...} up to and including t_max (within half a step).
std::vector<double> uniform_time_grid(double dt, double t_max);

} // namespace paraspec

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "parallel_spectra/lattice.hpp"
#include "parallel_spectra/spectral.hpp"
#include "parallel_spectra/types.hpp"

namespace paraspec {

// Superposition machinery: endpoint conditions, the (V, kappa) constraint
// system, and the three-family gauge psi_n = phi_n + phi_tilde_n.

/// Eigenvector entries of the non-Hermitian member at the endpoint sites.
struct EndpointAmplitudes {
    Complex phi_a;
    Complex phi_b;
    double re_a() const { return phi_a.real(); }
    double im_a() const { return phi_a.imag(); }
    double re_b() const { return phi_b.real(); }
    double im_b() const { return phi_b.imag(); }
};

enum class ConstraintKind { Unique, Line, Any, Infeasible };

/// Solution set of the endpoint condition system in the (V, kappa) plane.
struct ParamConstraint {
    ConstraintKind kind = ConstraintKind::Any;
    double V = 0.0;     ///< unique solution, or the symmetric default point on a line
    double kappa = 0.0;
    double dir_v = 0.0; ///< unit direction along the line
    double dir_kappa = 0.0;
    std::string combination; ///< "V+kappa" or "V-kappa" when kind == Line
    double value = 0.0;      ///< the conserved combination equals this
    double residual = 0.0;   ///< consistency defect of the linear system

    bool satisfied_by(double v, double k, double tol) const;
};

/// The consistent gauge: psi = phi + phi_tilde with phi_tilde = conj(phi) and
/// psi rescaled to unit Dirac norm.
struct CorrespondenceTriplet {
    double energy = 0.0;
    StateVector psi, phi, phi_tilde;
    SpectralMatch match;
    int pt_sector = +1; ///< +1: P conj(phi) = phi pattern; -1: anti-symmetric
};

struct CorrespondenceReport {
    double energy = 0.0;
    ParamConstraint constraint;
    Complex proportionality = 0.0;      ///< c minimizing ||s - c psi_ref||
    double reference_defect = 0.0;      ///< that minimum (0 when no reference)
    double superposition_residual = 0.0; ///< ||H s - eps s|| / ||s||
    std::string gauge_note;
    bool verified = false;
};

/// Residuals of the two endpoint conditions
///   |V psi_A + kappa psi_B + i gamma (phi_A - phi_tilde_A)| and
///   |V psi_B + kappa psi_A - i gamma (phi_B - phi_tilde_B)|.
std::pair<double, double> endpoint_condition_residual(const StateVector& psi,
                                                      const StateVector& phi,
                                                      const StateVector& phi_tilde,
                                                      const CouplingParams& params,
                                                      Index site_a, Index site_b);

/// Solves V Re(phi_A) + kappa Re(phi_B) = gamma Im(phi_A),
///        kappa Re(phi_A) + V Re(phi_B) = -gamma Im(phi_B)
/// for (V, kappa). Components below zero_tol count as zero.
ParamConstraint solve_hermitian_params(const EndpointAmplitudes& amp, double gamma,
                                       double zero_tol = 1e-12);

/// Builds one verified triplet for a spectral match. Throws
/// DegenerateGaugeError when the matched eigenvalue is not simple in the
/// non-Hermitian system, GaugeError on broken PT, CorrespondenceError when
/// the superposition fails its H residual.
CorrespondenceTriplet build_correspondence_state(const HamiltonianTriple& triple,
                                                 const TripleEigensystems& systems,
                                                 const SpectralMatch& match,
                                                 const ParityOperator& p,
                                                 const Tolerances& tol);

std::vector<CorrespondenceTriplet> build_correspondence(const HamiltonianTriple& triple,
                                                        const TripleEigensystems& systems,
                                                        const std::vector<SpectralMatch>& matches,
                                                        const ParityOperator& p,
                                                        const Tolerances& tol);
/// Convenience overload that recomputes the eigensystems.
std::vector<CorrespondenceTriplet> build_correspondence(const HamiltonianTriple& triple,
                                                        const std::vector<SpectralMatch>& matches,
                                                        const ParityOperator& p,
                                                        const Tolerances& tol);

/// Forms s = phi + phi_tilde and reports its eigen-residual against H at the
/// given energy; when a reference psi is supplied, also reports the best
/// proportionality constant and the remaining defect.
CorrespondenceReport verify_superposition(const StateVector& phi,
                                          const StateVector& phi_tilde, const Matrix& h,
                                          double energy, const Tolerances& tol,
                                          const StateVector* reference_psi = nullptr);

} // namespace paraspec

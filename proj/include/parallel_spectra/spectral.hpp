#pragma once

#include <string>
#include <vector>

#include "parallel_spectra/lattice.hpp"
#include "parallel_spectra/types.hpp"

namespace paraspec {

/// Full eigendecomposition of one matrix with residual certificates.
/// Eigenvalues are sorted by (Re, Im) ascending; each right vector has unit
/// Dirac norm and its largest-magnitude entry rotated to the positive real
/// axis, which makes repeated runs byte-identical.
struct EigenSystem {
    Eigen::VectorXcd values;
    Matrix vectors;           ///< columns align with values
    Eigen::VectorXd residuals; ///< ||M v - lambda v||_2 per pair
    double matrix_norm = 0.0;  ///< Frobenius norm of the source matrix
    std::string source;        ///< "H" | "N" | "NDAG" | free-form
};

/// One energy shared by all three members of the triple.
struct SpectralMatch {
    double energy = 0.0;
    Index idx_h = -1;
    Index idx_n = -1;
    Index idx_ndag = -1;
    double residual = 0.0; ///< max pairwise eigenvalue distance
};

struct TripleEigensystems {
    EigenSystem h, n, ndag;
};

/// Cluster of (near-)equal eigenvalues flagged as an exceptional point.
struct CoalescenceReport {
    Complex value;            ///< cluster mean
    int size = 0;
    double min_overlap = 0.0; ///< min |<left|right>| over paired members
    int span_rank = 0;        ///< numerical rank of the right-vector span
};

EigenSystem eig_general(const Matrix& m, const Tolerances& tol, std::string source_tag = "");

/// Indices of eigenvalues with |Im| <= tol.real, ascending in Re.
std::vector<Index> real_eigen_subset(const EigenSystem& es, const Tolerances& tol);

TripleEigensystems eig_triple(const HamiltonianTriple& triple, const Tolerances& tol);

/// Greedy one-to-one matching of the three real spectra in ascending order;
/// only complete triples are kept. Deterministic (smallest index first).
std::vector<SpectralMatch> match_spectra(const TripleEigensystems& systems,
                                         const Tolerances& tol);
std::vector<SpectralMatch> match_spectra(const HamiltonianTriple& triple,
                                         const Tolerances& tol);

/// Rephase v onto the PT-symmetric ray, P conj(v') = v', leaving the overall
/// sign free. Throws GaugeError when v is not PT-definite (broken phase).
StateVector pt_phase_align(const StateVector& v, const ParityOperator& p,
                           const Tolerances& tol);

/// pt_phase_align plus the sign convention: the largest-magnitude entry of
/// Re(v') is made positive. A vanishing real part (anti-symmetric sector)
/// leaves the sign undefined and raises DegenerateGaugeError.
StateVector pt_gauge_fix(const StateVector& v, const ParityOperator& p, const Tolerances& tol);

/// <u|w> with u a left-eigenvector representative (right eigenvector of the
/// conjugate-transpose matrix) and w a right eigenvector.
Complex biorthogonal_overlap(const StateVector& u, const StateVector& w);

/// Scan for eigenvalue clusters whose left/right eigenvectors have (near-)zero
/// overlap. `left` must be the eigensystem of the conjugate transpose of the
/// matrix behind `right`. Only flagged clusters are returned.
std::vector<CoalescenceReport> detect_coalescence(const EigenSystem& right,
                                                  const EigenSystem& left,
                                                  const Tolerances& tol);

} // namespace paraspec

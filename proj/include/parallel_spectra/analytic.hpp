#pragma once

#include <array>
#include <map>
#include <string>

#include "parallel_spectra/lattice.hpp"
#include "parallel_spectra/types.hpp"

namespace paraspec {

// Closed-form eigenstates. Every constructor re-verifies its output against
// the matching Hamiltonian at kOracleTol relative residual before returning,
// so these states can serve as independent oracles for the numeric stack.

inline constexpr double kOracleTol = 1e-12;

struct ClosedFormState {
    StateVector vector;
    Complex energy;
    std::string formula; ///< short tag, e.g. "phi1", "Phi-", "psi0"
    std::map<std::string, std::string> required_params;
};

/// The four eigenstates of the 4-site non-Hermitian member (basis [A,1,2,B]):
/// phi1/phi2 at energies +-J*sqrt(4-(gamma/J)^2), phi3/phi4 at -J/+J.
/// Requires gamma^2 <= 4 J^2 so all four energies are real.
std::array<ClosedFormState, 4> n2_nonhermitian_eigensystem(double gamma, double J);

/// The four eigenstates of the 4-site Hermitian member, obtained by parity
/// sector reduction: even block [[V+kappa, -sqrt2 J], [-sqrt2 J, -J]] and odd
/// block [[V-kappa, -sqrt2 J], [-sqrt2 J, +J]], lifted to the full basis and
/// normalized to unit Dirac norm. Order: even-, even+, odd-, odd+.
std::array<ClosedFormState, 4> n2_hermitian_even_odd_spectrum(double V, double kappa,
                                                              double J);

struct UniformZeroModes {
    ClosedFormState phi_minus; ///< annihilated by Hn at gamma = -2J
    ClosedFormState phi_plus;  ///< conj(phi_minus), annihilated by HnDag
    ClosedFormState psi;       ///< unit kernel vector of H (kappa = V)
    double proportionality;    ///< c with phi_plus + phi_minus = c * psi
};

/// Coalescing zero modes of the uniform chain with N_total = 4m+3 sites,
/// pinned to gamma = -2J and kappa = V = 0.
UniformZeroModes uniform_zero_modes(int m, double J);

struct SSHZeroModes {
    double kappa_c;    ///< signed critical coupling (-1)^(N/2) J (1+delta) Delta^(N/2)
    double gamma_c;    ///< equals kappa_c
    double delta_ratio; ///< Delta = (1-delta)/(1+delta)
    double norm_const;  ///< Omega = sqrt(2 delta J^2 / (J^2 (1+delta)^2 - kappa_c^2))
    ClosedFormState psi1, psi2;         ///< kernel vectors of H(kappa_c), odd/even sites
    ClosedFormState psi_plus, psi_minus; ///< (psi1 +- psi2)/sqrt2
    ClosedFormState phi_zm, eta_zm;      ///< zero modes of Hn / HnDag at gamma_c
};

SSHZeroModes ssh_zero_modes(int site_count, double J, double delta);

/// Band-edge eigenstate of the uniform H at energy -2J; requires V + kappa = 0.
/// n_total counts all sites including the two endpoints.
ClosedFormState uniform_band_edge_state(int n_total, double J, const CouplingParams& params);

/// Unit-norm Gaussian packet exp(-alpha^2 (j-center)^2) exp(i k j) over sites
/// j = 1..n_total.
StateVector gaussian_packet(int n_total, double center, double momentum, double alpha);

/// (v + P v) renormalized to unit Dirac norm; parity-even by construction.
StateVector symmetrize_state(const StateVector& v, const ParityOperator& p);

} // namespace paraspec

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "parallel_spectra/types.hpp"

namespace paraspec {

// Lattice models and the Hamiltonian triple {H, Hn, Hn^dag}.
//
// Basis conventions (0-based indices internally):
//   uniform chain: [A, 1..chain_length, B], dim = chain_length + 2.
//     The "relabeled" 1..N_total site view used by the closed-form states is
//     simply site j <-> index j-1 (A is site 1, B is site N_total).
//   SSH chain:     [1..N]; gain/loss sit directly on sites 1 and N.
//   custom graph:  [A, sub sites 1..n, B]; A occupies index 0 and B the last
//     index so that a chain-shaped graph reproduces the uniform builder
//     bit-identically.

struct UniformChainSpec {
    int chain_length = 0; ///< interior sites (N_total = chain_length + 2)
    double hopping = 1.0; ///< J
};

struct SSHChainSpec {
    int site_count = 0;        ///< N, even
    double hopping = 1.0;      ///< J
    double dimerization = 0.0; ///< delta in (-1, 1)
};

/// One undirected bond; sites are 0-based sub-graph indices.
struct GraphEdge {
    int a = 0;
    int b = 0;
    double amplitude = 0.0;
};

struct CustomGraphSpec {
    int site_count = 0;
    std::vector<GraphEdge> edges;
    int attach_a = 0; ///< sub-graph site coupled to A
    int attach_b = 0; ///< sub-graph site coupled to B
    double endpoint_coupling = 0.0; ///< g
    /// Optional mirror map on sub-graph sites (0-based, involutive) for
    /// parity_operator; required only when parity of a custom graph is used.
    std::optional<std::vector<int>> mirror;
};

using ModelSpec = std::variant<UniformChainSpec, SSHChainSpec, CustomGraphSpec>;

/// Gain/loss strength and the Hermitian endpoint parameters.
struct CouplingParams {
    double gamma = 0.0;
    double kappa = 0.0;
    double V = 0.0;
};

struct HamiltonianTriple {
    ModelSpec spec;
    CouplingParams params;
    Matrix H;       ///< Hermitian member
    Matrix Hn;      ///< non-Hermitian member (script H)
    Matrix HnDag;   ///< conjugate transpose of Hn
    Index site_a = 0;
    Index site_b = 0;
    Index dim() const { return H.rows(); }
};

/// Site-mirror permutation; P^2 = 1.
class ParityOperator {
  public:
    explicit ParityOperator(std::vector<Index> permutation);

    Index dim() const { return static_cast<Index>(perm_.size()); }
    Index mirror(Index i) const { return perm_[static_cast<size_t>(i)]; }
    const std::vector<Index>& permutation() const { return perm_; }

    StateVector apply(const StateVector& v) const;
    Matrix conjugate(const Matrix& m) const; ///< P * M * P
    RealMatrix matrix() const;

  private:
    std::vector<Index> perm_;
};

HamiltonianTriple build_uniform_triple(int chain_length, double J,
                                       const CouplingParams& params);
HamiltonianTriple build_ssh_triple(int site_count, double J, double delta,
                                   const CouplingParams& params);
HamiltonianTriple build_custom_triple(const CustomGraphSpec& spec,
                                      const CouplingParams& params);
/// Dispatch over the variant.
HamiltonianTriple build_triple(const ModelSpec& spec, const CouplingParams& params);

/// Mirror permutation of the model. For custom graphs the CustomGraphSpec must carry a
/// valid mirror map; the result is validated against P H P = H entrywise.
ParityOperator parity_operator(const HamiltonianTriple& triple);

/// max-abs entry of P conj(Hn) P - Hn (and the same check on HnDag);
/// zero certifies PT symmetry of the non-Hermitian pair.
double pt_symmetry_residual(const HamiltonianTriple& triple, const ParityOperator& p);

} // namespace paraspec

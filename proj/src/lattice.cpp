#include "parallel_spectra/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace paraspec {

namespace {

void check_finite(const CouplingParams& p) {
    if (!std::isfinite(p.gamma) || !std::isfinite(p.kappa) || !std::isfinite(p.V))
        throw InvalidSpecError("coupling parameters must be finite");
}

/// Adds the gain/loss and Hermitian endpoint terms shared by all builders.
///   Hn    = skeleton - i*gamma |A><A| + i*gamma |B><B|
///   H     = skeleton + kappa_sign*kappa (|A><B| + h.c.) + V (|A><A| + |B><B|)
HamiltonianTriple assemble(Matrix skeleton, ModelSpec spec, const CouplingParams& params,
                           Index site_a, Index site_b, double kappa_sign, bool with_V) {
    const Complex i(0.0, 1.0);
    HamiltonianTriple t;
    t.spec = std::move(spec);
    t.params = params;
    t.site_a = site_a;
    t.site_b = site_b;

    t.Hn = skeleton;
    t.Hn(site_a, site_a) -= i * params.gamma;
    t.Hn(site_b, site_b) += i * params.gamma;
    t.HnDag = t.Hn.adjoint();

    t.H = std::move(skeleton);
    t.H(site_a, site_b) += kappa_sign * params.kappa;
    t.H(site_b, site_a) += kappa_sign * params.kappa;
    if (with_V) {
        t.H(site_a, site_a) += params.V;
        t.H(site_b, site_b) += params.V;
    }
    return t;
}

} // namespace

ParityOperator::ParityOperator(std::vector<Index> permutation) : perm_(std::move(permutation)) {
    const Index n = static_cast<Index>(perm_.size());
    for (Index i = 0; i < n; ++i) {
        const Index j = perm_[static_cast<size_t>(i)];
        if (j < 0 || j >= n)
            throw InvalidSpecError("parity permutation: index out of range");
        if (perm_[static_cast<size_t>(j)] != i)
            throw InvalidSpecError("parity permutation: not an involution");
    }
}

StateVector ParityOperator::apply(const StateVector& v) const {
    if (v.size() != dim()) throw Error("ParityOperator::apply: dimension mismatch");
    StateVector out(v.size());
    for (Index i = 0; i < v.size(); ++i) out(perm_[static_cast<size_t>(i)]) = v(i);
    return out;
}

Matrix ParityOperator::conjugate(const Matrix& m) const {
    if (m.rows() != dim() || m.cols() != dim())
        throw Error("ParityOperator::conjugate: dimension mismatch");
    Matrix out(m.rows(), m.cols());
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c)
            out(perm_[static_cast<size_t>(r)], perm_[static_cast<size_t>(c)]) = m(r, c);
    return out;
}

RealMatrix ParityOperator::matrix() const {
    RealMatrix p = RealMatrix::Zero(dim(), dim());
    for (Index i = 0; i < dim(); ++i) p(perm_[static_cast<size_t>(i)], i) = 1.0;
    return p;
}

HamiltonianTriple build_uniform_triple(int chain_length, double J,
                                       const CouplingParams& params) {
    if (chain_length < 1)
        throw InvalidSpecError("uniform chain: chain_length must be >= 1");
    if (!std::isfinite(J) || J == 0.0)
        throw InvalidSpecError("uniform chain: J must be finite and nonzero");
    check_finite(params);

    const Index dim = chain_length + 2;
    Matrix skel = Matrix::Zero(dim, dim);
    for (Index l = 1; l + 1 <= chain_length; ++l) {
        skel(l, l + 1) = -J;
        skel(l + 1, l) = -J;
    }
    const double g = -std::sqrt(2.0) * J;
    skel(0, 1) = skel(1, 0) = g;
    skel(dim - 2, dim - 1) = skel(dim - 1, dim - 2) = g;

    return assemble(std::move(skel), UniformChainSpec{chain_length, J}, params, 0, dim - 1,
                    /*kappa_sign=*/1.0, /*with_V=*/true);
}

HamiltonianTriple build_ssh_triple(int site_count, double J, double delta,
                                   const CouplingParams& params) {
    if (site_count < 2 || site_count % 2 != 0)
        throw InvalidSpecError("SSH chain: site count must be even and >= 2");
    if (!(std::abs(delta) < 1.0))
        throw InvalidSpecError("SSH chain: |delta| must be < 1");
    if (!std::isfinite(J) || J == 0.0)
        throw InvalidSpecError("SSH chain: J must be finite and nonzero");
    check_finite(params);

    const Index n = site_count;
    Matrix skel = Matrix::Zero(n, n);
    const double weak = -(J - J * delta);   // bonds (2j-1, 2j)
    const double strong = -(J + J * delta); // bonds (2j, 2j+1)
    for (Index j = 1; 2 * j <= n; ++j) {
        skel(2 * j - 2, 2 * j - 1) = weak;
        skel(2 * j - 1, 2 * j - 2) = weak;
    }
    for (Index j = 1; 2 * j + 1 <= n; ++j) {
        skel(2 * j - 1, 2 * j) = strong;
        skel(2 * j, 2 * j - 1) = strong;
    }

    // H couples the ends with -kappa; no on-site potential in this model.
    return assemble(std::move(skel), SSHChainSpec{site_count, J, delta}, params, 0, n - 1,
                    /*kappa_sign=*/-1.0, /*with_V=*/false);
}

HamiltonianTriple build_custom_triple(const CustomGraphSpec& spec,
                                      const CouplingParams& params) {
    if (spec.site_count < 1)
        throw InvalidSpecError("custom graph: site_count must be >= 1");
    if (spec.attach_a == spec.attach_b)
        throw InvalidSpecError("custom graph: attachment sites a and b must differ");
    auto in_range = [&](int s) { return s >= 0 && s < spec.site_count; };
    if (!in_range(spec.attach_a) || !in_range(spec.attach_b))
        throw InvalidSpecError("custom graph: attachment site out of range");
    if (!std::isfinite(spec.endpoint_coupling))
        throw InvalidSpecError("custom graph: endpoint coupling must be finite");
    check_finite(params);

    std::set<std::pair<int, int>> seen;
    for (const auto& e : spec.edges) {
        if (!in_range(e.a) || !in_range(e.b))
            throw InvalidSpecError("custom graph: edge site out of range");
        if (e.a == e.b)
            throw InvalidSpecError("custom graph: self-loops are not allowed");
        if (!std::isfinite(e.amplitude))
            throw InvalidSpecError("custom graph: edge amplitude must be finite");
        auto key = std::minmax(e.a, e.b);
        if (!seen.insert(key).second)
            throw InvalidSpecError("custom graph: undirected edge listed twice");
    }
    if (spec.mirror) {
        if (static_cast<int>(spec.mirror->size()) != spec.site_count)
            throw InvalidSpecError("custom graph: mirror map size mismatch");
        for (int s = 0; s < spec.site_count; ++s) {
            const int ms = (*spec.mirror)[static_cast<size_t>(s)];
            if (!in_range(ms) || (*spec.mirror)[static_cast<size_t>(ms)] != s)
                throw InvalidSpecError("custom graph: mirror map is not an involution");
        }
    }

    // Global basis [A, sub 0..n-1, B]: sub site s sits at index s + 1.
    const Index dim = spec.site_count + 2;
    const Index site_a = 0;
    const Index site_b = dim - 1;
    Matrix skel = Matrix::Zero(dim, dim);
    for (const auto& e : spec.edges) {
        skel(e.a + 1, e.b + 1) = e.amplitude;
        skel(e.b + 1, e.a + 1) = e.amplitude;
    }
    const double g = spec.endpoint_coupling;
    skel(spec.attach_a + 1, site_a) = g;
    skel(site_a, spec.attach_a + 1) = g;
    skel(spec.attach_b + 1, site_b) = g;
    skel(site_b, spec.attach_b + 1) = g;

    return assemble(std::move(skel), spec, params, site_a, site_b,
                    /*kappa_sign=*/1.0, /*with_V=*/true);
}

HamiltonianTriple build_triple(const ModelSpec& spec, const CouplingParams& params) {
    return std::visit(
        [&](const auto& s) -> HamiltonianTriple {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UniformChainSpec>)
                return build_uniform_triple(s.chain_length, s.hopping, params);
            else if constexpr (std::is_same_v<T, SSHChainSpec>)
                return build_ssh_triple(s.site_count, s.hopping, s.dimerization, params);
            else
                return build_custom_triple(s, params);
        },
        spec);
}

ParityOperator parity_operator(const HamiltonianTriple& triple) {
    const Index n = triple.dim();
    std::vector<Index> perm(static_cast<size_t>(n));

    if (const auto* custom = std::get_if<CustomGraphSpec>(&triple.spec)) {
        if (!custom->mirror)
            throw SymmetryError("parity_operator: custom graph carries no mirror map");
        perm[0] = n - 1;
        perm[static_cast<size_t>(n - 1)] = 0;
        for (int s = 0; s < custom->site_count; ++s)
            perm[static_cast<size_t>(s + 1)] = (*custom->mirror)[static_cast<size_t>(s)] + 1;
    } else {
        for (Index i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = n - 1 - i;
    }

    ParityOperator p(std::move(perm));
    if ((p.conjugate(triple.H) - triple.H).cwiseAbs().maxCoeff() != 0.0)
        throw SymmetryError("parity_operator: P H P != H (model is not mirror-symmetric)");
    return p;
}

double pt_symmetry_residual(const HamiltonianTriple& triple, const ParityOperator& p) {
    const double rn = (p.conjugate(triple.Hn.conjugate()) - triple.Hn).cwiseAbs().maxCoeff();
    const double rd =
        (p.conjugate(triple.HnDag.conjugate()) - triple.HnDag).cwiseAbs().maxCoeff();
    return std::max(rn, rd);
}

} // namespace paraspec

#include "parallel_spectra/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace paraspec {

namespace {

/// Rotate the largest-magnitude entry onto the positive real axis.
void canonicalize_phase(Eigen::Ref<StateVector> v) {
    Index imax = 0;
    double amax = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > amax) {
            amax = a;
            imax = i;
        }
    }
    if (amax <= 0.0) return;
    const Complex phase = v(imax) / amax;
    v *= std::conj(phase);
}

} // namespace

EigenSystem eig_general(const Matrix& m, const Tolerances& tol, std::string source_tag) {
    tol.validate();
    if (m.rows() != m.cols()) throw Error("eig_general: matrix must be square");
    if (!m.allFinite()) throw Error("eig_general: matrix must be finite");

    Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eig_general: solver did not converge for " << m.rows() << "x" << m.cols()
            << " matrix (source '" << source_tag << "')";
        throw SolverError(msg.str());
    }

    const Index n = m.rows();
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    const auto& raw = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (raw(a).real() != raw(b).real()) return raw(a).real() < raw(b).real();
        return raw(a).imag() < raw(b).imag();
    });

    EigenSystem es;
    es.source = std::move(source_tag);
    es.matrix_norm = m.norm();
    es.values.resize(n);
    es.vectors.resize(n, n);
    es.residuals.resize(n);
    for (Index k = 0; k < n; ++k) {
        const Index src = order[static_cast<size_t>(k)];
        es.values(k) = raw(src);
        StateVector v = solver.eigenvectors().col(src);
        v /= v.norm();
        canonicalize_phase(v);
        es.vectors.col(k) = v;
        es.residuals(k) = (m * v - es.values(k) * v).norm();
    }

    const double bound = tol.eig * es.matrix_norm;
    for (Index k = 0; k < n; ++k) {
        if (es.residuals(k) > bound) {
            std::ostringstream msg;
            msg << "eig_general: residual certificate failed at index " << k << " ("
                << es.residuals(k) << " > " << bound << ", source '" << es.source << "')";
            throw SolverError(msg.str());
        }
    }
    return es;
}

std::vector<Index> real_eigen_subset(const EigenSystem& es, const Tolerances& tol) {
    std::vector<Index> idx;
    for (Index k = 0; k < es.values.size(); ++k)
        if (std::abs(es.values(k).imag()) <= tol.real) idx.push_back(k);
    // do not rely on the input order; callers may hand in permuted systems
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        return es.values(a).real() < es.values(b).real();
    });
    return idx;
}

TripleEigensystems eig_triple(const HamiltonianTriple& triple, const Tolerances& tol) {
    return TripleEigensystems{
        eig_general(triple.H, tol, "H"),
        eig_general(triple.Hn, tol, "N"),
        eig_general(triple.HnDag, tol, "NDAG"),
    };
}

std::vector<SpectralMatch> match_spectra(const TripleEigensystems& systems,
                                         const Tolerances& tol) {
    const auto rh = real_eigen_subset(systems.h, tol);
    const auto rn = real_eigen_subset(systems.n, tol);
    const auto rd = real_eigen_subset(systems.ndag, tol);

    std::vector<SpectralMatch> out;
    size_t i = 0, j = 0, k = 0;
    while (i < rh.size() && j < rn.size() && k < rd.size()) {
        const double a = systems.h.values(rh[i]).real();
        const double b = systems.n.values(rn[j]).real();
        const double c = systems.ndag.values(rd[k]).real();
        const double lo = std::min({a, b, c});
        const double hi = std::max({a, b, c});
        if (hi - lo <= tol.match) {
            out.push_back(SpectralMatch{a, rh[i], rn[j], rd[k], hi - lo});
            ++i, ++j, ++k;
        } else if (a == lo) {
            ++i;
        } else if (b == lo) {
            ++j;
        } else {
            ++k;
        }
    }
    return out;
}

std::vector<SpectralMatch> match_spectra(const HamiltonianTriple& triple,
                                         const Tolerances& tol) {
    return match_spectra(eig_triple(triple, tol), tol);
}

StateVector pt_phase_align(const StateVector& v, const ParityOperator& p,
                           const Tolerances& tol) {
    tol.validate();
    const double nv = v.norm();
    if (nv == 0.0) throw GaugeError("pt_phase_align: zero vector");

    const StateVector w = p.apply(v.conjugate());
    const Complex ov = dirac_inner(v, w) / (nv * nv);
    if (std::abs(ov) < 0.5)
        throw GaugeError("pt_phase_align: P conj(v) is not parallel to v "
                         "(spontaneously broken PT or complex eigenvalue)");
    const double chi = std::arg(ov);
    StateVector out = std::polar(1.0, chi / 2.0) * v;

    const double defect = (p.apply(out.conjugate()) - out).norm();
    if (defect > tol.real * nv) {
        std::ostringstream msg;
        msg << "pt_phase_align: gauge defect " << defect << " exceeds tolerance "
            << tol.real * nv;
        throw GaugeError(msg.str());
    }
    return out;
}

StateVector pt_gauge_fix(const StateVector& v, const ParityOperator& p, const Tolerances& tol) {
    StateVector out = pt_phase_align(v, p, tol);

    // Sign convention: largest-magnitude entry of the real part positive.
    const Eigen::VectorXd re = out.real();
    Index imax = 0;
    double amax = -1.0;
    for (Index i = 0; i < re.size(); ++i) {
        if (std::abs(re(i)) > amax) {
            amax = std::abs(re(i));
            imax = i;
        }
    }
    if (amax <= tol.norm * v.norm())
        throw DegenerateGaugeError("pt_gauge_fix: Re(v) vanishes, sign is undefined");
    if (re(imax) < 0.0) out = -out;
    return out;
}

Complex biorthogonal_overlap(const StateVector& u, const StateVector& w) {
    return dirac_inner(u, w);
}

std::vector<CoalescenceReport> detect_coalescence(const EigenSystem& right,
                                                  const EigenSystem& left,
                                                  const Tolerances& tol) {
    tol.validate();
    const Index n = right.values.size();
    if (left.values.size() != n)
        throw Error("detect_coalescence: eigensystem dimension mismatch");

    // Near a k-fold defective eigenvalue the computed copies scatter like
    // (eig residual)^(1/k), far beyond tol.match; widen the cluster radius
    // accordingly (k = 3 covers the models in scope).
    const double radius = std::max(tol.match, std::cbrt(tol.eig * right.matrix_norm));

    // Left eigenvalues of M are conjugates of the eigenvalues of M^dag.
    Eigen::VectorXcd left_vals = left.values.conjugate();

    std::vector<CoalescenceReport> reports;
    Index start = 0;
    while (start < n) {
        Index stop = start + 1; // values are (Re, Im)-sorted; chain neighbours
        while (stop < n && std::abs(right.values(stop) - right.values(stop - 1)) <= radius)
            ++stop;
        const int size = static_cast<int>(stop - start);
        if (size >= 2) {
            Complex mean = 0.0;
            for (Index k = start; k < stop; ++k) mean += right.values(k);
            mean /= static_cast<double>(size);

            // Pair cluster members with the nearest left eigenvalues.
            std::vector<Index> lidx(static_cast<size_t>(n));
            std::iota(lidx.begin(), lidx.end(), Index{0});
            std::stable_sort(lidx.begin(), lidx.end(), [&](Index a, Index b) {
                return std::abs(left_vals(a) - mean) < std::abs(left_vals(b) - mean);
            });

            double min_overlap = std::numeric_limits<double>::infinity();
            Matrix span(right.vectors.rows(), size);
            for (int s = 0; s < size; ++s) {
                const Index r = start + s;
                const Index l = lidx[static_cast<size_t>(s)];
                min_overlap = std::min(
                    min_overlap, std::abs(dirac_inner(left.vectors.col(l), right.vectors.col(r))));
                span.col(s) = right.vectors.col(r);
            }

            Eigen::JacobiSVD<Matrix> svd(span);
            const double rank_tol = span.rows() * svd.singularValues()(0) *
                                    std::numeric_limits<double>::epsilon();
            int rank = 0;
            for (Index s = 0; s < svd.singularValues().size(); ++s)
                if (svd.singularValues()(s) > rank_tol) ++rank;

            if (min_overlap <= tol.ep || rank < size)
                reports.push_back(CoalescenceReport{mean, size, min_overlap, rank});
        }
        start = stop;
    }
    return reports;
}

} // namespace paraspec

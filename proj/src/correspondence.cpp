#include "parallel_spectra/correspondence.hpp"

#include <cmath>
#include <sstream>

namespace paraspec {

namespace {
const Complex kI(0.0, 1.0);
}

bool ParamConstraint::satisfied_by(double v, double k, double tol) const {
    switch (kind) {
    case ConstraintKind::Any:
        return true;
    case ConstraintKind::Infeasible:
        return false;
    case ConstraintKind::Unique:
        return std::abs(v - V) <= tol && std::abs(k - kappa) <= tol;
    case ConstraintKind::Line: {
        const double combo = (combination == "V+kappa") ? v + k : v - k;
        return std::abs(combo - value) <= tol;
    }
    }
    return false;
}

std::pair<double, double> endpoint_condition_residual(const StateVector& psi,
                                                      const StateVector& phi,
                                                      const StateVector& phi_tilde,
                                                      const CouplingParams& params,
                                                      Index site_a, Index site_b) {
    if (psi.size() != phi.size() || psi.size() != phi_tilde.size())
        throw Error("endpoint_condition_residual: dimension mismatch");
    const Complex r1 = params.V * psi(site_a) + params.kappa * psi(site_b) +
                       kI * params.gamma * (phi(site_a) - phi_tilde(site_a));
    const Complex r2 = params.V * psi(site_b) + params.kappa * psi(site_a) -
                       kI * params.gamma * (phi(site_b) - phi_tilde(site_b));
    return {std::abs(r1), std::abs(r2)};
}

ParamConstraint solve_hermitian_params(const EndpointAmplitudes& amp, double gamma,
                                       double zero_tol) {
    const double ra = amp.re_a(), rb = amp.re_b();
    const double y1 = gamma * amp.im_a();
    const double y2 = -gamma * amp.im_b();
    const double scale = std::max(std::abs(ra), std::abs(rb));

    auto system_residual = [&](double v, double k) {
        return std::hypot(v * ra + k * rb - y1, k * ra + v * rb - y2);
    };

    ParamConstraint c;
    if (scale <= zero_tol) {
        // Re parts vanish: either no equation at all or an unsatisfiable one.
        if (std::max(std::abs(amp.im_a()), std::abs(amp.im_b())) <= zero_tol) {
            c.kind = ConstraintKind::Any;
        } else {
            c.kind = ConstraintKind::Infeasible;
            c.residual = std::hypot(y1, y2);
        }
        return c;
    }

    const double det = ra * ra - rb * rb;
    if (std::abs(det) > 1e-8 * scale * scale) {
        c.kind = ConstraintKind::Unique;
        c.V = (ra * y1 - rb * y2) / det;
        c.kappa = (ra * y2 - rb * y1) / det;
        c.residual = system_residual(c.V, c.kappa);
        return c;
    }

    // Degenerate system: the PT branches Re(phi_A) = +-Re(phi_B) leave one
    // combination of (V, kappa) free.
    c.kind = ConstraintKind::Line;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (std::abs(ra - rb) <= std::abs(ra + rb)) {
        c.combination = "V+kappa";
        c.value = gamma * amp.im_a() / ra;
        c.V = c.value / 2.0;
        c.kappa = c.value / 2.0;
        c.dir_v = inv_sqrt2;
        c.dir_kappa = -inv_sqrt2;
    } else {
        c.combination = "V-kappa";
        c.value = gamma * amp.im_a() / ra;
        c.V = c.value / 2.0;
        c.kappa = -c.value / 2.0;
        c.dir_v = inv_sqrt2;
        c.dir_kappa = inv_sqrt2;
    }
    c.residual = system_residual(c.V, c.kappa);
    return c;
}

CorrespondenceTriplet build_correspondence_state(const HamiltonianTriple& triple,
                                                 const TripleEigensystems& systems,
                                                 const SpectralMatch& match,
                                                 const ParityOperator& p,
                                                 const Tolerances& tol) {
    tol.validate();
    const Complex lambda = systems.n.values(match.idx_n);

    // Refuse eigenvalue clusters: any basis choice inside a degenerate space
    // is arbitrary; the analytic constructors pin those states instead.
    for (Index k = 0; k < systems.n.values.size(); ++k) {
        if (k == match.idx_n) continue;
        if (std::abs(systems.n.values(k) - lambda) <= tol.match) {
            std::ostringstream msg;
            msg << "build_correspondence: eigenvalue " << lambda
                << " of the non-Hermitian member is degenerate within tol.match";
            throw DegenerateGaugeError(msg.str());
        }
    }

    StateVector gauged = pt_phase_align(systems.n.vectors.col(match.idx_n), p, tol);
    // Deterministic sign: largest-magnitude entry of Re positive, falling back
    // to Im for the purely imaginary (anti-symmetric) sector.
    {
        auto leading = [&](bool use_im) {
            Index imax = 0;
            double amax = -1.0;
            for (Index i = 0; i < gauged.size(); ++i) {
                const double a =
                    use_im ? std::abs(gauged(i).imag()) : std::abs(gauged(i).real());
                if (a > amax) {
                    amax = a;
                    imax = i;
                }
            }
            return std::pair{amax, use_im ? gauged(imax).imag() : gauged(imax).real()};
        };
        auto [amax, lead] = leading(false);
        if (amax <= tol.norm) std::tie(amax, lead) = leading(true);
        if (lead < 0.0) gauged = -gauged;
    }

    // The PT-symmetric gauge splits into two sectors: states whose real part
    // carries the Hermitian partner directly, and anti-symmetric ones (the
    // V - kappa family and the parity-odd gamma -> 0 limit) that need an
    // extra -i rotation before psi = 2 Re(phi) becomes an H eigenvector.
    double best_residual = std::numeric_limits<double>::infinity();
    const double bound_h = tol.eig * systems.h.matrix_norm;
    for (const Complex rot : {Complex(1.0, 0.0), Complex(0.0, -1.0)}) {
        StateVector phi = rot * gauged;
        const double scale = 2.0 * phi.real().matrix().norm();
        if (scale <= tol.norm) continue;
        phi /= scale; // psi = phi + conj(phi) = 2 Re(phi) has unit Dirac norm

        CorrespondenceTriplet t;
        t.energy = match.energy;
        t.phi = phi;
        t.phi_tilde = phi.conjugate();
        t.psi = t.phi + t.phi_tilde;
        t.match = match;
        t.pt_sector = (rot.real() == 1.0) ? +1 : -1;

        const double rh = (t.psi.norm() > 0.0)
                              ? (triple.H * t.psi - match.energy * t.psi).norm() / t.psi.norm()
                              : std::numeric_limits<double>::infinity();
        best_residual = std::min(best_residual, rh);
        if (rh > bound_h) continue;

        const double eps_n = lambda.real();
        const double rn = (triple.Hn * t.phi - eps_n * t.phi).norm();
        const double rd = (triple.HnDag * t.phi_tilde - eps_n * t.phi_tilde).norm();
        const double bound_n = tol.eig * systems.n.matrix_norm * t.phi.norm();
        if (rn > bound_n || rd > bound_n)
            throw CorrespondenceError("build_correspondence: gauge-fixed pair lost its "
                                      "eigenvector residual certificate");
        return t;
    }
    if (!std::isfinite(best_residual))
        throw DegenerateGaugeError("build_correspondence: Re(phi) vanishes in both "
                                   "PT sectors");
    std::ostringstream msg;
    msg << "build_correspondence: phi + phi_tilde fails the H eigen-residual at energy "
        << match.energy << " (best relative residual " << best_residual << " > " << bound_h
        << ")";
    throw CorrespondenceError(msg.str());
}

std::vector<CorrespondenceTriplet> build_correspondence(const HamiltonianTriple& triple,
                                                        const TripleEigensystems& systems,
                                                        const std::vector<SpectralMatch>& matches,
                                                        const ParityOperator& p,
                                                        const Tolerances& tol) {
    std::vector<CorrespondenceTriplet> out;
    out.reserve(matches.size());
    for (const auto& m : matches)
        out.push_back(build_correspondence_state(triple, systems, m, p, tol));
    return out;
}

std::vector<CorrespondenceTriplet> build_correspondence(const HamiltonianTriple& triple,
                                                        const std::vector<SpectralMatch>& matches,
                                                        const ParityOperator& p,
                                                        const Tolerances& tol) {
    return build_correspondence(triple, eig_triple(triple, tol), matches, p, tol);
}

CorrespondenceReport verify_superposition(const StateVector& phi,
                                          const StateVector& phi_tilde, const Matrix& h,
                                          double energy, const Tolerances& tol,
                                          const StateVector* reference_psi) {
    tol.validate();
    if (phi.size() != phi_tilde.size() || phi.size() != h.rows())
        throw Error("verify_superposition: dimension mismatch");

    const StateVector s = phi + phi_tilde;
    const double ns = s.norm();
    if (ns <= tol.norm * (phi.norm() + phi_tilde.norm()))
        throw NullStateError("verify_superposition: phi + phi_tilde vanishes "
                             "(anti-symmetric collision)");

    CorrespondenceReport rep;
    rep.energy = energy;
    rep.superposition_residual = (h * s - energy * s).norm() / ns;
    rep.verified = rep.superposition_residual <= tol.eig * h.norm();
    if (reference_psi) {
        const StateVector& ref = *reference_psi;
        if (ref.size() != s.size())
            throw Error("verify_superposition: reference dimension mismatch");
        const double nref2 = ref.squaredNorm();
        if (nref2 == 0.0) throw Error("verify_superposition: zero reference state");
        rep.proportionality = dirac_inner(ref, s) / nref2;
        rep.reference_defect = (s - rep.proportionality * ref).norm();
    }
    return rep;
}

} // namespace paraspec

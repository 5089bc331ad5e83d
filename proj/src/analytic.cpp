#include "parallel_spectra/analytic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>
#include <sstream>

namespace paraspec {

namespace {

const Complex kI(0.0, 1.0);

void certify(const Matrix& m, const ClosedFormState& s, const char* what) {
    const double residual = (m * s.vector - s.energy * s.vector).norm();
    const double bound = kOracleTol * std::max(1.0, m.norm()) * s.vector.norm();
    if (!(residual <= bound)) {
        std::ostringstream msg;
        msg << what << ": closed form '" << s.formula << "' failed its residual certificate ("
            << residual << " > " << bound << ")";
        throw Error(msg.str());
    }
}

/// Eigenpair of a real symmetric 2x2 [[p, q], [q, r]]; branch = -1/+1 picks
/// the lower/upper eigenvalue. Returns (eigenvalue, (x, y)) with unit (x, y).
std::pair<double, std::pair<double, double>> sym2x2(double p, double q, double r,
                                                    int branch) {
    const double disc = std::sqrt((p - r) * (p - r) + 4.0 * q * q);
    const double e = 0.5 * ((p + r) + branch * disc);
    // pick the better-conditioned eigenvector formula
    double x, y;
    if (std::abs(e - p) >= std::abs(e - r)) {
        x = q;
        y = e - p;
    } else {
        x = e - r;
        y = q;
    }
    double n = std::hypot(x, y);
    if (n == 0.0) { // q = 0 and degenerate diagonal
        x = (branch < 0) ? 1.0 : 0.0;
        y = (branch < 0) ? 0.0 : 1.0;
        n = 1.0;
    }
    return {e, {x / n, y / n}};
}

} // namespace

std::array<ClosedFormState, 4> n2_nonhermitian_eigensystem(double gamma, double J) {
    if (J == 0.0 || !std::isfinite(gamma) || !std::isfinite(J))
        throw DomainError("n2_nonhermitian_eigensystem: J must be nonzero and finite");
    const double g = gamma / J;
    if (g * g > 4.0)
        throw DomainError("n2_nonhermitian_eigensystem: gamma^2 > 4 J^2, the "
                          "+-sqrt(4-gamma^2) branch is complex");

    const HamiltonianTriple triple =
        build_uniform_triple(2, J, CouplingParams{gamma, 0.0, 0.0});

    const double root = std::sqrt(4.0 - g * g);
    std::array<ClosedFormState, 4> out;

    // phi_{1,2} = ((a*)^3, sqrt2 a*, sqrt2 a, a^3), a = sqrt2 (i g - e)^(-1/2)
    for (int b = 0; b < 2; ++b) {
        const double e = (b == 0) ? root : -root;
        const Complex a = std::sqrt(2.0) / std::sqrt(kI * g - e);
        const Complex ac = std::conj(a);
        ClosedFormState s;
        s.vector = StateVector(4);
        s.vector << ac * ac * ac, std::sqrt(2.0) * ac, std::sqrt(2.0) * a, a * a * a;
        s.energy = J * e;
        s.formula = (b == 0) ? "phi1" : "phi2";
        s.required_params = {{"gamma", "|gamma| <= 2J"}};
        certify(triple.Hn, s, "n2_nonhermitian_eigensystem");
        out[static_cast<size_t>(b)] = std::move(s);
    }

    // phi_3 at -J and phi_4 at +J exist for every gamma.
    const double h = std::sqrt(2.0) / 2.0;
    ClosedFormState s3;
    s3.vector = StateVector(4);
    s3.vector << -1.0, h * (kI * g - 1.0), h * (kI * g + 1.0), 1.0;
    s3.energy = -J;
    s3.formula = "phi3";
    certify(triple.Hn, s3, "n2_nonhermitian_eigensystem");
    out[2] = std::move(s3);

    ClosedFormState s4;
    s4.vector = StateVector(4);
    s4.vector << 1.0, -h * (kI * g + 1.0), h * (kI * g - 1.0), 1.0;
    s4.energy = J;
    s4.formula = "phi4";
    certify(triple.Hn, s4, "n2_nonhermitian_eigensystem");
    out[3] = std::move(s4);

    return out;
}

std::array<ClosedFormState, 4> n2_hermitian_even_odd_spectrum(double V, double kappa,
                                                              double J) {
    if (J == 0.0) throw DomainError("n2_hermitian_even_odd_spectrum: J must be nonzero");
    const HamiltonianTriple triple =
        build_uniform_triple(2, J, CouplingParams{0.0, kappa, V});

    const double q = -std::sqrt(2.0) * J;
    std::array<ClosedFormState, 4> out;
    const char* tags[4] = {"even-", "even+", "odd-", "odd+"};
    for (int k = 0; k < 4; ++k) {
        const bool even = k < 2;
        const int branch = (k % 2 == 0) ? -1 : +1;
        const double p = even ? (V + kappa) : (V - kappa);
        const double r = even ? -J : J;
        const auto [e, xy] = sym2x2(p, q, r, branch);
        const double x = xy.first / std::sqrt(2.0);
        const double y = xy.second / std::sqrt(2.0);
        ClosedFormState s;
        s.vector = StateVector(4);
        if (even)
            s.vector << x, y, y, x;
        else
            s.vector << x, y, -y, -x;
        s.energy = e;
        s.formula = tags[static_cast<size_t>(k)];
        certify(triple.H, s, "n2_hermitian_even_odd_spectrum");
        out[static_cast<size_t>(k)] = std::move(s);
    }
    return out;
}

UniformZeroModes uniform_zero_modes(int m, double J) {
    if (m < 0) throw DomainError("uniform_zero_modes: m must be >= 0");
    if (J == 0.0) throw DomainError("uniform_zero_modes: J must be nonzero");
    const int n_total = 4 * m + 3;
    const CouplingParams params{-2.0 * J, 0.0, 0.0}; // gamma = -2J, kappa = V = 0
    const HamiltonianTriple triple = build_uniform_triple(n_total - 2, J, params);

    // Phi- = (1/sqrt(2(N-1))) [|1> - |N> - sqrt2 sum_{l=2}^{N-1} i^(l+1) |l>]
    // in the relabeled 1..N basis (i^(N+1) = 1 for N = 4m+3).
    const int N = n_total;
    StateVector phim = StateVector::Zero(N);
    const double pref = 1.0 / std::sqrt(2.0 * (N - 1));
    phim(0) = pref;
    phim(N - 1) = -pref;
    Complex ipow = -kI; // i^(l+1) at l = 2
    for (int l = 2; l <= N - 1; ++l) {
        phim(l - 1) = -std::sqrt(2.0) * pref * ipow;
        ipow *= kI;
    }

    UniformZeroModes zm;
    zm.phi_minus = ClosedFormState{phim, 0.0, "Phi-",
                                   {{"gamma", "-2J"}, {"kappa", "V"}, {"N_total", "4m+3"}}};
    certify(triple.Hn, zm.phi_minus, "uniform_zero_modes");
    zm.phi_plus = ClosedFormState{phim.conjugate(), 0.0, "Phi+", zm.phi_minus.required_params};
    certify(triple.HnDag, zm.phi_plus, "uniform_zero_modes");

    // Kernel vector of H by null-space extraction (H is real symmetric here);
    // a sine profile anchors its sign. The site-2 balance equation forces end
    // amplitudes of 1/sqrt2 relative to unit interior sine amplitudes.
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(triple.H.real());
    if (solver.info() != Eigen::Success)
        throw SolverError("uniform_zero_modes: Hermitian eigensolver failed");
    Index kmin = 0;
    solver.eigenvalues().cwiseAbs().minCoeff(&kmin);
    const double lam = solver.eigenvalues()(kmin);
    const double kernel_bound = kOracleTol * triple.H.norm();
    if (std::abs(lam) > kernel_bound)
        throw Error("uniform_zero_modes: H has no numerical kernel");
    for (Index k = 0; k < solver.eigenvalues().size(); ++k)
        if (k != kmin && std::abs(solver.eigenvalues()(k)) <= kernel_bound)
            throw Error("uniform_zero_modes: kernel of H is not one-dimensional");
    Eigen::VectorXd kernel = solver.eigenvectors().col(kmin);

    Eigen::VectorXd anchor = Eigen::VectorXd::Zero(N);
    anchor(0) = 1.0 / std::sqrt(2.0);
    anchor(N - 1) = -1.0 / std::sqrt(2.0);
    for (int j = 2; j <= N - 1; ++j) anchor(j - 1) = std::sin(M_PI * j / 2.0);
    if (anchor.dot(kernel) < 0.0) kernel = -kernel;

    zm.psi = ClosedFormState{kernel.cast<Complex>(), 0.0, "Psi", {{"kappa", "V"}}};
    certify(triple.H, zm.psi, "uniform_zero_modes");

    const StateVector sum = zm.phi_plus.vector + zm.phi_minus.vector;
    const Complex c = dirac_inner(zm.psi.vector, sum);
    if ((sum - c * zm.psi.vector).norm() > kOracleTol * 10.0 ||
        std::abs(c.imag()) > kOracleTol)
        throw Error("uniform_zero_modes: Phi+ + Phi- is not proportional to Psi");
    zm.proportionality = c.real();
    return zm;
}

SSHZeroModes ssh_zero_modes(int site_count, double J, double delta) {
    if (site_count < 2 || site_count % 2 != 0)
        throw DomainError("ssh_zero_modes: site count must be even and >= 2");
    if (delta == 0.0)
        throw DomainError("ssh_zero_modes: delta = 0 has no dimerization, no zero modes");
    if (!(std::abs(delta) < 1.0))
        throw DomainError("ssh_zero_modes: |delta| must be < 1");
    if (J == 0.0) throw DomainError("ssh_zero_modes: J must be nonzero");

    const int half = site_count / 2;
    const double ratio = (1.0 - delta) / (1.0 + delta);
    // The edge-balance equations fix the sign: kappa_c = (-1)^(N/2) J (1+delta) Delta^(N/2).
    const double sign = (half % 2 == 0) ? 1.0 : -1.0;
    const double kappa_c = sign * J * (1.0 + delta) * std::pow(ratio, half);
    const double denom = J * J * (1.0 + delta) * (1.0 + delta) - kappa_c * kappa_c;
    const double omega = std::sqrt(2.0 * delta * J * J / denom);
    if (!std::isfinite(kappa_c) || !std::isfinite(omega))
        throw DomainError("ssh_zero_modes: parameters overflow for this length");

    SSHZeroModes zm;
    zm.kappa_c = kappa_c;
    zm.gamma_c = kappa_c;
    zm.delta_ratio = ratio;
    zm.norm_const = omega;

    const HamiltonianTriple triple =
        build_ssh_triple(site_count, J, delta, CouplingParams{kappa_c, kappa_c, 0.0});

    const int N = site_count;
    StateVector psi1 = StateVector::Zero(N), psi2 = StateVector::Zero(N);
    double geo = 1.0; // (-Delta)^(j-1), running product keeps ratios exact
    for (int j = 1; j <= half; ++j) {
        psi1(2 * j - 2) = std::sqrt(2.0) * omega * geo;
        psi2(N - 2 * j + 1) = std::sqrt(2.0) * omega * geo; // site 2(half-j+1), power j-1
        geo *= -ratio;
    }

    const std::map<std::string, std::string> req = {
        {"kappa", "(-1)^(N/2) J (1+delta) Delta^(N/2)"},
        {"gamma", "kappa_c"},
        {"delta", "nonzero, |delta| < 1"}};
    zm.psi1 = ClosedFormState{psi1, 0.0, "psi1", req};
    zm.psi2 = ClosedFormState{psi2, 0.0, "psi2", req};
    certify(triple.H, zm.psi1, "ssh_zero_modes");
    certify(triple.H, zm.psi2, "ssh_zero_modes");

    const double rt = std::sqrt(2.0);
    zm.psi_plus = ClosedFormState{(psi1 + psi2) / rt, 0.0, "psi+", req};
    zm.psi_minus = ClosedFormState{(psi1 - psi2) / rt, 0.0, "psi-", req};
    certify(triple.H, zm.psi_plus, "ssh_zero_modes");
    certify(triple.H, zm.psi_minus, "ssh_zero_modes");

    zm.phi_zm = ClosedFormState{(psi1 + kI * psi2) / rt, 0.0, "phi_zm", req};
    zm.eta_zm = ClosedFormState{(psi1 - kI * psi2) / rt, 0.0, "eta_zm", req};
    certify(triple.Hn, zm.phi_zm, "ssh_zero_modes");
    certify(triple.HnDag, zm.eta_zm, "ssh_zero_modes");
    return zm;
}

ClosedFormState uniform_band_edge_state(int n_total, double J, const CouplingParams& params) {
    if (n_total < 3)
        throw DomainError("uniform_band_edge_state: need at least 3 sites");
    if (params.V + params.kappa != 0.0)
        throw ConstraintError("uniform_band_edge_state: requires V + kappa = 0");
    const HamiltonianTriple triple = build_uniform_triple(n_total - 2, J, params);

    StateVector psi0(n_total);
    const double pref = 1.0 / std::sqrt(2.0 * (n_total - 1));
    psi0(0) = pref;
    psi0(n_total - 1) = pref;
    for (int l = 2; l <= n_total - 1; ++l) psi0(l - 1) = std::sqrt(2.0) * pref;

    ClosedFormState s{psi0, -2.0 * J, "psi0", {{"V + kappa", "0"}}};
    certify(triple.H, s, "uniform_band_edge_state");
    return s;
}

StateVector gaussian_packet(int n_total, double center, double momentum, double alpha) {
    if (n_total < 1) throw DomainError("gaussian_packet: need at least one site");
    if (!(alpha > 0.0)) throw DomainError("gaussian_packet: alpha must be positive");
    const double width = std::sqrt(2.0 * std::log(2.0)) / alpha;
    if (width >= 0.5 * n_total)
        std::cerr << "gaussian_packet: warning: packet width " << width
                  << " is not small against N/2 = " << 0.5 * n_total << "\n";

    StateVector v(n_total);
    for (int j = 1; j <= n_total; ++j) {
        const double d = j - center;
        v(j - 1) = std::exp(-alpha * alpha * d * d) * std::polar(1.0, momentum * j);
    }
    const double n = v.norm();
    if (n == 0.0) throw NullStateError("gaussian_packet: all amplitudes underflowed");
    return v / n;
}

StateVector symmetrize_state(const StateVector& v, const ParityOperator& p) {
    const StateVector sum = v + p.apply(v);
    const double n = sum.norm();
    if (n <= 1e-12 * v.norm())
        throw NullStateError("symmetrize_state: v + P v vanishes (parity-odd input)");
    return sum / n;
}

} // namespace paraspec

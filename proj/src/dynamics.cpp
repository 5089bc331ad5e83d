#include "parallel_spectra/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <sstream>

namespace paraspec {

namespace {

const Complex kI(0.0, 1.0);

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw Error("evolve: empty time grid");
    double prev = 0.0;
    for (double t : times) {
        if (!std::isfinite(t) || t < prev)
            throw Error("evolve: time grid must be non-decreasing and start at t >= 0");
        prev = t;
    }
}

/// Exponential cache keyed by step size; a uniform grid uses one entry.
class StepCache {
  public:
    explicit StepCache(const Matrix& m) : m_(m) {}
    const Matrix& step(double dt) {
        auto it = cache_.find(dt);
        if (it == cache_.end()) it = cache_.emplace(dt, matrix_exponential(m_, dt)).first;
        return it->second;
    }

  private:
    const Matrix& m_;
    std::map<double, Matrix> cache_;
};

} // namespace

Matrix matrix_exponential(const Matrix& m, double t) {
    if (m.rows() != m.cols()) throw Error("matrix_exponential: matrix must be square");
    if (!m.allFinite() || !std::isfinite(t))
        throw Error("matrix_exponential: non-finite input");
    // ||exp(A)|| can reach e^||A||; refuse arguments that overflow double.
    const double scaled = m.cwiseAbs().rowwise().sum().maxCoeff() * std::abs(t);
    if (scaled > 700.0) {
        std::ostringstream msg;
        msg << "matrix_exponential: ||M t|| ~ " << scaled << " would overflow";
        throw RangeError(msg.str());
    }
    const Matrix a = -kI * t * m;
    return a.exp();
}

Propagator make_propagator(const Matrix& m, double dt, std::string generator_tag) {
    return Propagator{matrix_exponential(m, dt), std::move(generator_tag), dt};
}

std::vector<double> uniform_time_grid(double dt, double t_max) {
    if (!(dt > 0.0) || !(t_max >= 0.0) || !std::isfinite(dt) || !std::isfinite(t_max))
        throw Error("uniform_time_grid: need dt > 0 and t_max >= 0");
    const auto steps = static_cast<size_t>(std::llround(t_max / dt));
    std::vector<double> times(steps + 1);
    for (size_t k = 0; k <= steps; ++k) times[k] = static_cast<double>(k) * dt;
    return times;
}

EvolutionTrace evolve(const StateVector& state, const Matrix& m,
                      const std::vector<double>& times, std::string label) {
    check_times(times);
    if (state.size() != m.rows()) throw Error("evolve: dimension mismatch");

    StepCache cache(m);
    EvolutionTrace trace;
    trace.times = times;
    StateTrack track;
    track.label = std::move(label);
    track.site_probabilities.resize(static_cast<Index>(times.size()), state.size());
    track.norm_sq.resize(static_cast<Index>(times.size()));

    StateVector s = state;
    double prev = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
        const double dt = times[k] - prev;
        if (dt > 0.0) s = cache.step(dt) * s;
        prev = times[k];
        track.site_probabilities.row(static_cast<Index>(k)) = s.cwiseAbs2().transpose();
        track.norm_sq(static_cast<Index>(k)) = s.squaredNorm();
    }
    trace.tracks.push_back(std::move(track));
    return trace;
}

ExpansionCoefficients expand_in_common_subspace(const StateVector& psi0,
                                                const std::vector<CorrespondenceTriplet>& family) {
    if (family.empty())
        throw Error("expand_in_common_subspace: empty correspondence family");
    const Index dim = psi0.size();
    ExpansionCoefficients ex;
    ex.c.resize(static_cast<Index>(family.size()));
    ex.psi0 = StateVector::Zero(dim);
    ex.phi0 = StateVector::Zero(dim);
    ex.phi_tilde0 = StateVector::Zero(dim);
    for (size_t n = 0; n < family.size(); ++n) {
        const auto& t = family[n];
        if (t.psi.size() != dim)
            throw Error("expand_in_common_subspace: dimension mismatch");
        const Complex cn = dirac_inner(t.psi, psi0);
        ex.c(static_cast<Index>(n)) = cn;
        ex.psi0 += cn * t.psi;
        ex.phi0 += cn * t.phi;
        ex.phi_tilde0 += cn * t.phi_tilde;
    }
    ex.truncation_residual = (psi0 - ex.psi0).norm();
    return ex;
}

EvolutionTrace parallel_evolve(const HamiltonianTriple& triple, const StateVector& phi0,
                               const StateVector& phi_tilde0, const StateVector& psi0,
                               const std::vector<double>& times) {
    check_times(times);
    const Index dim = triple.dim();
    if (phi0.size() != dim || phi_tilde0.size() != dim || psi0.size() != dim)
        throw Error("parallel_evolve: dimension mismatch");

    StepCache cache_n(triple.Hn), cache_d(triple.HnDag), cache_h(triple.H);

    EvolutionTrace trace;
    trace.times = times;
    const auto nt = static_cast<Index>(times.size());
    for (const char* label : {"phi", "phi_tilde", "psi"}) {
        StateTrack tr;
        tr.label = label;
        tr.site_probabilities.resize(nt, dim);
        tr.norm_sq.resize(nt);
        trace.tracks.push_back(std::move(tr));
    }
    trace.overlap_phi_phitilde.resize(times.size());
    trace.superposition_defect.resize(times.size());

    StateVector phi = phi0, phit = phi_tilde0, psi = psi0;
    double prev = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
        const double dt = times[k] - prev;
        if (dt > 0.0) {
            phi = cache_n.step(dt) * phi;
            phit = cache_d.step(dt) * phit;
            psi = cache_h.step(dt) * psi;
        }
        prev = times[k];
        const auto row = static_cast<Index>(k);
        trace.tracks[0].site_probabilities.row(row) = phi.cwiseAbs2().transpose();
        trace.tracks[0].norm_sq(row) = phi.squaredNorm();
        trace.tracks[1].site_probabilities.row(row) = phit.cwiseAbs2().transpose();
        trace.tracks[1].norm_sq(row) = phit.squaredNorm();
        trace.tracks[2].site_probabilities.row(row) = psi.cwiseAbs2().transpose();
        trace.tracks[2].norm_sq(row) = psi.squaredNorm();
        trace.overlap_phi_phitilde[k] = dirac_inner(phi, phit);
        trace.superposition_defect[k] = (psi - phi - phit).norm();
    }
    return trace;
}

AuditReport probability_audit(const EvolutionTrace& trace) {
    if (trace.tracks.size() != 3 || trace.overlap_phi_phitilde.size() != trace.times.size())
        throw Error("probability_audit: trace must come from parallel_evolve");
    const auto& phi = trace.tracks[0];
    const auto& phit = trace.tracks[1];
    const auto& psi = trace.tracks[2];

    AuditReport rep;
    rep.theta = trace.overlap_phi_phitilde[0];
    const double phi0_sq = phi.norm_sq(0);
    const double phit0_sq = phit.norm_sq(0);
    for (size_t k = 0; k < trace.times.size(); ++k) {
        const auto row = static_cast<Index>(k);
        const Complex ov = trace.overlap_phi_phitilde[k];
        rep.psi_norm_dev = std::max(rep.psi_norm_dev, std::abs(psi.norm_sq(row) - 1.0));
        rep.phi_norm_dev = std::max(rep.phi_norm_dev, std::abs(phi.norm_sq(row) - phi0_sq));
        rep.phi_tilde_norm_dev =
            std::max(rep.phi_tilde_norm_dev, std::abs(phit.norm_sq(row) - phit0_sq));
        rep.overlap_dev = std::max(rep.overlap_dev, std::abs(ov - rep.theta));
        rep.identity_dev =
            std::max(rep.identity_dev, std::abs(psi.norm_sq(row) - phi.norm_sq(row) -
                                                phit.norm_sq(row) - 2.0 * ov.real()));
        rep.balance_dev =
            std::max(rep.balance_dev, std::abs(phi.norm_sq(row) - phit.norm_sq(row)));
        rep.max_defect = std::max(rep.max_defect, trace.superposition_defect[k]);
    }
    return rep;
}

} // namespace paraspec

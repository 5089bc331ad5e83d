#include "parallel_spectra/commands.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "parallel_spectra/analytic.hpp"
#include "parallel_spectra/correspondence.hpp"
#include "parallel_spectra/csv.hpp"
#include "parallel_spectra/dynamics.hpp"
#include "parallel_spectra/spectral.hpp"

namespace paraspec {

using nlohmann::json;

namespace {

void write_meta(const std::filesystem::path& outdir, const std::string& command,
                const RunConfig& cfg) {
    json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    meta["config"] = cfg.echo;
    atomic_write_file(outdir / "meta.json", meta.dump(2) + "\n");
}

json complex_json(const Complex& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

/// Eigenvalues only, sorted by (Re, Im); used by the sweep hot loop.
Eigen::VectorXcd sorted_eigenvalues(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw SolverError("sweep: eigenvalue computation did not converge");
    Eigen::VectorXcd vals = solver.eigenvalues();
    std::sort(vals.data(), vals.data() + vals.size(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return vals;
}

RunConfig with_swept_param(const RunConfig& cfg, const std::string& param, double value) {
    RunConfig out = cfg;
    if (param == "gamma") {
        out.params.gamma = value;
    } else if (param == "kappa") {
        out.params.kappa = value;
    } else if (param == "V") {
        out.params.V = value;
    } else if (param == "delta") {
        auto* ssh = std::get_if<SSHChainSpec>(&out.model);
        if (!ssh) throw ConfigError("sweep over delta requires the ssh model");
        ssh->dimerization = value;
    } else {
        throw ConfigError("sweep: unknown parameter '" + param + "'");
    }
    return out;
}

size_t sweep_thread_count(size_t points) {
    size_t n = std::max<size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PARALLEL_SPECTRA_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || cap < 1)
            throw ConfigError("PARALLEL_SPECTRA_THREADS must be a positive integer");
        n = std::min(n, static_cast<size_t>(cap));
    }
    return std::min(n, std::max<size_t>(1, points));
}

} // namespace

int cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& outdir, bool with_match) {
    const HamiltonianTriple triple = build_triple(cfg.model, cfg.params);
    const TripleEigensystems systems = eig_triple(triple, cfg.tol);

    std::vector<SpectralMatch> matches;
    if (with_match) matches = match_spectra(systems, cfg.tol);

    std::ostringstream csv;
    csv << "index,system,re_energy,im_energy,residual";
    if (with_match) csv << ",matched,match_id";
    csv << "\n";

    const EigenSystem* order[3] = {&systems.h, &systems.n, &systems.ndag};
    for (const EigenSystem* es : order) {
        // match_id per eigenvalue index of this system, -1 when unmatched
        std::vector<long> match_id(static_cast<size_t>(es->values.size()), -1);
        if (with_match) {
            for (size_t m = 0; m < matches.size(); ++m) {
                Index idx = es->source == "H"      ? matches[m].idx_h
                            : es->source == "N"    ? matches[m].idx_n
                                                   : matches[m].idx_ndag;
                match_id[static_cast<size_t>(idx)] = static_cast<long>(m);
            }
        }
        for (Index k = 0; k < es->values.size(); ++k) {
            csv << k << ',' << es->source << ',' << format_double(es->values(k).real()) << ','
                << format_double(es->values(k).imag()) << ',' << format_double(es->residuals(k));
            if (with_match) {
                const long id = match_id[static_cast<size_t>(k)];
                csv << ',' << (id >= 0 ? "true" : "false") << ',' << id;
            }
            csv << "\n";
        }
    }

    std::filesystem::create_directories(outdir);
    atomic_write_file(outdir / "spectrum.csv", csv.str());
    write_meta(outdir, "spectrum", cfg);
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& outdir) {
    if (!cfg.scenario.sweep) throw ConfigError("sweep: scenario.sweep block is required");
    const SweepSpec& sw = *cfg.scenario.sweep;
    if (sw.param == "delta" && !std::holds_alternative<SSHChainSpec>(cfg.model))
        throw ConfigError("sweep over delta requires the ssh model");

    std::vector<double> values(static_cast<size_t>(sw.steps));
    for (int i = 0; i < sw.steps; ++i)
        values[static_cast<size_t>(i)] =
            (sw.steps == 1) ? sw.from
                            : sw.from + (sw.to - sw.from) * i / (sw.steps - 1);

    auto spectrum_at = [&](double v) {
        const RunConfig point = with_swept_param(cfg, sw.param, v);
        return sorted_eigenvalues(build_triple(point.model, point.params).Hn);
    };
    auto count_real = [&](const Eigen::VectorXcd& vals) {
        int n = 0;
        for (Index k = 0; k < vals.size(); ++k)
            if (std::abs(vals(k).imag()) <= cfg.tol.real) ++n;
        return n;
    };

    // Independent task pool over grid points.
    std::vector<Eigen::VectorXcd> spectra(values.size());
    {
        std::atomic<size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&]() {
            for (size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
                try {
                    spectra[i] = spectrum_at(values[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        const size_t n_threads = sweep_thread_count(values.size());
        pool.reserve(n_threads);
        for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::ostringstream csv;
    csv << "param_value,index,re,im\n";
    for (size_t i = 0; i < values.size(); ++i)
        for (Index k = 0; k < spectra[i].size(); ++k)
            csv << format_double(values[i]) << ',' << k << ','
                << format_double(spectra[i](k).real()) << ','
                << format_double(spectra[i](k).imag()) << "\n";

    // Transitions: bisection-refine every grid interval whose count of real
    // eigenvalues changes.
    json transitions = json::array();
    for (size_t i = 0; i + 1 < values.size(); ++i) {
        const int c0 = count_real(spectra[i]);
        const int c1 = count_real(spectra[i + 1]);
        if (c0 == c1) continue;
        double lo = values[i], hi = values[i + 1];
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            if (count_real(spectrum_at(mid)) == c0)
                lo = mid;
            else
                hi = mid;
        }
        transitions.push_back(json{{"value", 0.5 * (lo + hi)},
                                   {"real_count_before", c0},
                                   {"real_count_after", c1}});
    }
    json tr;
    tr["param"] = sw.param;
    tr["transitions"] = transitions;

    std::filesystem::create_directories(outdir);
    atomic_write_file(outdir / "sweep.csv", csv.str());
    atomic_write_file(outdir / "transitions.json", tr.dump(2) + "\n");
    write_meta(outdir, "sweep", cfg);
    return 0;
}

int cmd_verify(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const HamiltonianTriple triple = build_triple(cfg.model, cfg.params);
    const ParityOperator parity = parity_operator(triple);
    const TripleEigensystems systems = eig_triple(triple, cfg.tol);
    const std::vector<SpectralMatch> matches = match_spectra(systems, cfg.tol);

    json states = json::array();
    size_t verified = 0;
    for (const auto& m : matches) {
        json entry;
        entry["energy"] = m.energy;
        try {
            const CorrespondenceTriplet t =
                build_correspondence_state(triple, systems, m, parity, cfg.tol);
            const ParamConstraint constraint = solve_hermitian_params(
                EndpointAmplitudes{t.phi(triple.site_a), t.phi(triple.site_b)},
                cfg.params.gamma);
            const StateVector reference = systems.h.vectors.col(m.idx_h);
            const CorrespondenceReport rep = verify_superposition(
                t.phi, t.phi_tilde, triple.H, m.energy, cfg.tol, &reference);
            const auto [r1, r2] = endpoint_condition_residual(
                t.psi, t.phi, t.phi_tilde, cfg.params, triple.site_a, triple.site_b);

            json cj;
            switch (constraint.kind) {
            case ConstraintKind::Unique: cj["kind"] = "unique"; break;
            case ConstraintKind::Line: cj["kind"] = "line"; break;
            case ConstraintKind::Any: cj["kind"] = "any"; break;
            case ConstraintKind::Infeasible: cj["kind"] = "infeasible"; break;
            }
            cj["V"] = constraint.V;
            cj["kappa"] = constraint.kappa;
            if (constraint.kind == ConstraintKind::Line) {
                cj["combination"] = constraint.combination;
                cj["value"] = constraint.value;
            }
            cj["residual"] = constraint.residual;

            entry["constraint"] = cj;
            entry["constraint_satisfied_by_params"] =
                constraint.satisfied_by(cfg.params.V, cfg.params.kappa, 1e-6);
            entry["gauge_note"] = t.pt_sector > 0
                                      ? "symmetric PT sector"
                                      : "anti-symmetric PT sector (-i rotation)";
            entry["proportionality"] = complex_json(rep.proportionality);
            entry["reference_defect"] = rep.reference_defect;
            entry["superposition_residual"] = rep.superposition_residual;
            entry["endpoint_residuals"] = json::array({r1, r2});
            entry["verified"] = rep.verified;
            if (rep.verified) ++verified;
        } catch (const Error& e) {
            entry["error"] = e.what();
            entry["verified"] = false;
        }
        states.push_back(std::move(entry));
    }

    json doc;
    doc["summary"] = json{{"total", matches.size()}, {"verified", verified}};
    doc["states"] = states;

    std::filesystem::create_directories(outdir);
    atomic_write_file(outdir / "correspondence.json", doc.dump(2) + "\n");
    write_meta(outdir, "verify", cfg);
    return verified == matches.size() ? 0 : 1;
}

int cmd_zero_modes(const RunConfig& cfg, const std::filesystem::path& outdir) {
    std::ostringstream csv;
    json doc;

    if (const auto* uniform = std::get_if<UniformChainSpec>(&cfg.model)) {
        const int n_total = uniform->chain_length + 2;
        if (n_total < 3 || (n_total - 3) % 4 != 0)
            throw ConfigError("zero-modes: uniform model needs N_total = 4m + 3 sites");
        const int m = (n_total - 3) / 4;
        const UniformZeroModes zm = uniform_zero_modes(m, cfg.hopping);

        csv << "site,re_phi_minus,im_phi_minus,re_phi_plus,im_phi_plus,re_psi,im_psi\n";
        for (int j = 0; j < n_total; ++j)
            csv << (j + 1) << ',' << format_double(zm.phi_minus.vector(j).real()) << ','
                << format_double(zm.phi_minus.vector(j).imag()) << ','
                << format_double(zm.phi_plus.vector(j).real()) << ','
                << format_double(zm.phi_plus.vector(j).imag()) << ','
                << format_double(zm.psi.vector(j).real()) << ','
                << format_double(zm.psi.vector(j).imag()) << "\n";

        const HamiltonianTriple triple = build_uniform_triple(
            uniform->chain_length, cfg.hopping, CouplingParams{-2.0 * cfg.hopping, 0.0, 0.0});
        doc["model"] = "uniform";
        doc["m"] = m;
        doc["n_total"] = n_total;
        doc["required_params"] = zm.phi_minus.required_params;
        doc["residuals"] = json{
            {"hn_phi_minus", (triple.Hn * zm.phi_minus.vector).norm()},
            {"hndag_phi_plus", (triple.HnDag * zm.phi_plus.vector).norm()},
            {"h_psi", (triple.H * zm.psi.vector).norm()}};
        doc["biorthogonal_overlap"] =
            complex_json(biorthogonal_overlap(zm.phi_plus.vector, zm.phi_minus.vector));
        doc["proportionality"] = zm.proportionality;
    } else if (const auto* ssh = std::get_if<SSHChainSpec>(&cfg.model)) {
        const SSHZeroModes zm = ssh_zero_modes(ssh->site_count, cfg.hopping, ssh->dimerization);
        const HamiltonianTriple triple =
            build_ssh_triple(ssh->site_count, cfg.hopping, ssh->dimerization,
                             CouplingParams{zm.gamma_c, zm.kappa_c, 0.0});

        csv << "site,re_psi1,im_psi1,re_psi2,im_psi2,re_psi_plus,im_psi_plus,"
               "re_psi_minus,im_psi_minus,re_phi_zm,im_phi_zm,re_eta_zm,im_eta_zm\n";
        const ClosedFormState* states[6] = {&zm.psi1,      &zm.psi2,   &zm.psi_plus,
                                            &zm.psi_minus, &zm.phi_zm, &zm.eta_zm};
        for (int j = 0; j < ssh->site_count; ++j) {
            csv << (j + 1);
            for (const auto* s : states)
                csv << ',' << format_double(s->vector(j).real()) << ','
                    << format_double(s->vector(j).imag());
            csv << "\n";
        }

        // phi_zm + eta_zm = sqrt2 psi1 and phi_zm - eta_zm = i sqrt2 psi2
        const StateVector sum = zm.phi_zm.vector + zm.eta_zm.vector;
        const StateVector diff = zm.phi_zm.vector - zm.eta_zm.vector;
        const Complex c_sum = dirac_inner(zm.psi1.vector, sum);
        const Complex c_diff = dirac_inner(zm.psi2.vector, diff);

        doc["model"] = "ssh";
        doc["n"] = ssh->site_count;
        doc["delta"] = ssh->dimerization;
        doc["kappa_c"] = zm.kappa_c;
        doc["gamma_c"] = zm.gamma_c;
        doc["Delta"] = zm.delta_ratio;
        doc["Omega"] = zm.norm_const;
        doc["required_params"] = zm.psi1.required_params;
        doc["residuals"] = json{{"h_psi1", (triple.H * zm.psi1.vector).norm()},
                                {"h_psi2", (triple.H * zm.psi2.vector).norm()},
                                {"hn_phi_zm", (triple.Hn * zm.phi_zm.vector).norm()},
                                {"hndag_eta_zm", (triple.HnDag * zm.eta_zm.vector).norm()}};
        doc["biorthogonal_overlap"] =
            complex_json(biorthogonal_overlap(zm.eta_zm.vector, zm.phi_zm.vector));
        doc["proportionality"] = json{
            {"sum_over_psi1", complex_json(c_sum)},
            {"sum_defect", (sum - c_sum * zm.psi1.vector).norm()},
            {"diff_over_psi2", complex_json(c_diff)},
            {"diff_defect", (diff - c_diff * zm.psi2.vector).norm()}};
    } else {
        throw ConfigError("zero-modes: model must be uniform (N_total = 4m+3) or ssh");
    }

    std::filesystem::create_directories(outdir);
    atomic_write_file(outdir / "zero_modes.csv", csv.str());
    atomic_write_file(outdir / "zero_modes.json", doc.dump(2) + "\n");
    write_meta(outdir, "zero-modes", cfg);
    return 0;
}

int cmd_evolve(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const HamiltonianTriple triple = build_triple(cfg.model, cfg.params);
    const ParityOperator parity = parity_operator(triple);
    const int n_total = total_sites(cfg.model);

    const TripleEigensystems systems = eig_triple(triple, cfg.tol);
    const std::vector<SpectralMatch> matches = match_spectra(systems, cfg.tol);
    const std::vector<CorrespondenceTriplet> family =
        build_correspondence(triple, systems, matches, parity, cfg.tol);
    if (family.empty()) throw Error("evolve: no matched states, nothing to expand in");

    const double center = cfg.scenario.packet.center.value_or(n_total / 3.0);
    const StateVector packet =
        gaussian_packet(n_total, center, cfg.scenario.packet.momentum, cfg.scenario.packet.alpha);
    const StateVector psi_init = symmetrize_state(packet, parity);
    const ExpansionCoefficients exp = expand_in_common_subspace(psi_init, family);

    // Time grid: uniform steps plus the requested dump instants.
    std::vector<double> times = uniform_time_grid(cfg.scenario.dt, cfg.scenario.t_max);
    for (double t : cfg.scenario.dump_times)
        if (std::none_of(times.begin(), times.end(),
                         [&](double u) { return u == t; }))
            times.push_back(t);
    std::sort(times.begin(), times.end());

    const EvolutionTrace trace =
        parallel_evolve(triple, exp.phi0, exp.phi_tilde0, exp.psi0, times);
    const AuditReport audit = probability_audit(trace);

    std::ostringstream csv;
    csv << "time,site,prob_phi,prob_phitilde,prob_psi\n";
    for (double t : cfg.scenario.dump_times) {
        const auto it = std::find(times.begin(), times.end(), t);
        if (it == times.end()) continue;
        const auto row = static_cast<Index>(it - times.begin());
        for (Index j = 0; j < triple.dim(); ++j)
            csv << format_double(t) << ',' << (j + 1) << ','
                << format_double(trace.tracks[0].site_probabilities(row, j)) << ','
                << format_double(trace.tracks[1].site_probabilities(row, j)) << ','
                << format_double(trace.tracks[2].site_probabilities(row, j)) << "\n";
    }

    const double tol = cfg.scenario.audit_tolerance;
    const bool truncation_ok = exp.truncation_residual <= cfg.scenario.truncation_threshold;
    const bool audit_ok = audit.psi_norm_dev <= tol && audit.phi_norm_dev <= tol &&
                          audit.phi_tilde_norm_dev <= tol && audit.overlap_dev <= tol &&
                          audit.identity_dev <= tol && audit.balance_dev <= tol &&
                          audit.max_defect <= tol;

    json doc;
    doc["audit_tolerance"] = tol;
    doc["deviations"] = json{{"psi_norm", audit.psi_norm_dev},
                             {"phi_norm", audit.phi_norm_dev},
                             {"phi_tilde_norm", audit.phi_tilde_norm_dev},
                             {"overlap", audit.overlap_dev},
                             {"identity", audit.identity_dev},
                             {"balance", audit.balance_dev}};
    doc["max_superposition_defect"] = audit.max_defect;
    doc["theta"] = complex_json(audit.theta);
    doc["matched_states"] = matches.size();
    doc["truncation_residual"] = exp.truncation_residual;
    doc["truncation_threshold"] = cfg.scenario.truncation_threshold;
    doc["pass"] = audit_ok && truncation_ok;

    std::filesystem::create_directories(outdir);
    atomic_write_file(outdir / "trace.csv", csv.str());
    atomic_write_file(outdir / "audit.json", doc.dump(2) + "\n");
    write_meta(outdir, "evolve", cfg);
    return (audit_ok && truncation_ok) ? 0 : 1;
}

} // namespace paraspec

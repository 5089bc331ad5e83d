#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parallel_spectra/analytic.hpp"
#include "parallel_spectra/commands.hpp"
#include "parallel_spectra/correspondence.hpp"
#include "parallel_spectra/dynamics.hpp"
#include "parallel_spectra/lattice.hpp"
#include "parallel_spectra/spectral.hpp"

namespace py = pybind11;
using namespace paraspec;

namespace {

std::vector<ClosedFormState> to_vector(std::array<ClosedFormState, 4> arr) {
    return {std::make_move_iterator(arr.begin()), std::make_move_iterator(arr.end())};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hamiltonian triples {H, Hn, Hn^dag} on tight-binding lattices: "
              "spectra, eigenstate superpositions and parallel dynamics";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::class_<CouplingParams>(m, "CouplingParams")
        .def(py::init<double, double, double>(), py::arg("gamma") = 0.0,
             py::arg("kappa") = 0.0, py::arg("V") = 0.0)
        .def_readwrite("gamma", &CouplingParams::gamma)
        .def_readwrite("kappa", &CouplingParams::kappa)
        .def_readwrite("V", &CouplingParams::V);

    py::class_<Tolerances>(m, "Tolerances")
        .def(py::init<>())
        .def_readwrite("eig", &Tolerances::eig)
        .def_readwrite("real", &Tolerances::real)
        .def_readwrite("match", &Tolerances::match)
        .def_readwrite("norm", &Tolerances::norm)
        .def_readwrite("ep", &Tolerances::ep);

    py::class_<HamiltonianTriple>(m, "HamiltonianTriple")
        .def_readonly("H", &HamiltonianTriple::H)
        .def_readonly("Hn", &HamiltonianTriple::Hn)
        .def_readonly("HnDag", &HamiltonianTriple::HnDag)
        .def_readonly("site_a", &HamiltonianTriple::site_a)
        .def_readonly("site_b", &HamiltonianTriple::site_b)
        .def_property_readonly("dim", &HamiltonianTriple::dim);

    py::class_<ParityOperator>(m, "ParityOperator")
        .def(py::init<std::vector<Index>>(), py::arg("permutation"))
        .def("apply", &ParityOperator::apply, py::arg("state"))
        .def("matrix", &ParityOperator::matrix)
        .def_property_readonly("permutation", &ParityOperator::permutation);

    py::class_<GraphEdge>(m, "GraphEdge")
        .def(py::init<int, int, double>(), py::arg("a"), py::arg("b"), py::arg("amplitude"))
        .def_readwrite("a", &GraphEdge::a)
        .def_readwrite("b", &GraphEdge::b)
        .def_readwrite("amplitude", &GraphEdge::amplitude);

    py::class_<CustomGraphSpec>(m, "CustomGraphSpec")
        .def(py::init<>())
        .def_readwrite("site_count", &CustomGraphSpec::site_count)
        .def_readwrite("edges", &CustomGraphSpec::edges)
        .def_readwrite("attach_a", &CustomGraphSpec::attach_a)
        .def_readwrite("attach_b", &CustomGraphSpec::attach_b)
        .def_readwrite("endpoint_coupling", &CustomGraphSpec::endpoint_coupling)
        .def_readwrite("mirror", &CustomGraphSpec::mirror);

    m.def("build_uniform_triple", &build_uniform_triple, py::arg("chain_length"),
          py::arg("J"), py::arg("params"));
    m.def("build_ssh_triple", &build_ssh_triple, py::arg("site_count"), py::arg("J"),
          py::arg("delta"), py::arg("params"));
    m.def("build_custom_triple", &build_custom_triple, py::arg("spec"), py::arg("params"));
    m.def("parity_operator", &parity_operator, py::arg("triple"));
    m.def("pt_symmetry_residual", &pt_symmetry_residual, py::arg("triple"), py::arg("parity"));

    py::class_<EigenSystem>(m, "EigenSystem")
        .def_readonly("values", &EigenSystem::values)
        .def_readonly("vectors", &EigenSystem::vectors)
        .def_readonly("residuals", &EigenSystem::residuals)
        .def_readonly("matrix_norm", &EigenSystem::matrix_norm)
        .def_readonly("source", &EigenSystem::source);

    py::class_<SpectralMatch>(m, "SpectralMatch")
        .def_readonly("energy", &SpectralMatch::energy)
        .def_readonly("idx_h", &SpectralMatch::idx_h)
        .def_readonly("idx_n", &SpectralMatch::idx_n)
        .def_readonly("idx_ndag", &SpectralMatch::idx_ndag)
        .def_readonly("residual", &SpectralMatch::residual);

    py::class_<TripleEigensystems>(m, "TripleEigensystems")
        .def_readonly("h", &TripleEigensystems::h)
        .def_readonly("n", &TripleEigensystems::n)
        .def_readonly("ndag", &TripleEigensystems::ndag);

    py::class_<CoalescenceReport>(m, "CoalescenceReport")
        .def_readonly("value", &CoalescenceReport::value)
        .def_readonly("size", &CoalescenceReport::size)
        .def_readonly("min_overlap", &CoalescenceReport::min_overlap)
        .def_readonly("span_rank", &CoalescenceReport::span_rank);

    m.def("eig_general", &eig_general, py::arg("matrix"), py::arg("tol") = Tolerances{},
          py::arg("source_tag") = "");
    m.def("real_eigen_subset", &real_eigen_subset, py::arg("eigensystem"),
          py::arg("tol") = Tolerances{});
    m.def("eig_triple", &eig_triple, py::arg("triple"), py::arg("tol") = Tolerances{});
    m.def("match_spectra",
          py::overload_cast<const TripleEigensystems&, const Tolerances&>(&match_spectra),
          py::arg("systems"), py::arg("tol") = Tolerances{});
    m.def("pt_gauge_fix", &pt_gauge_fix, py::arg("state"), py::arg("parity"),
          py::arg("tol") = Tolerances{});
    m.def("biorthogonal_overlap", &biorthogonal_overlap, py::arg("left"), py::arg("right"));
    m.def("detect_coalescence", &detect_coalescence, py::arg("right"), py::arg("left"),
          py::arg("tol") = Tolerances{});

    py::class_<EndpointAmplitudes>(m, "EndpointAmplitudes")
        .def(py::init<Complex, Complex>(), py::arg("phi_a"), py::arg("phi_b"))
        .def_readwrite("phi_a", &EndpointAmplitudes::phi_a)
        .def_readwrite("phi_b", &EndpointAmplitudes::phi_b)
        .def_property_readonly("re_a", &EndpointAmplitudes::re_a)
        .def_property_readonly("im_a", &EndpointAmplitudes::im_a)
        .def_property_readonly("re_b", &EndpointAmplitudes::re_b)
        .def_property_readonly("im_b", &EndpointAmplitudes::im_b);

    py::enum_<ConstraintKind>(m, "ConstraintKind")
        .value("unique", ConstraintKind::Unique)
        .value("line", ConstraintKind::Line)
        .value("any", ConstraintKind::Any)
        .value("infeasible", ConstraintKind::Infeasible);

    py::class_<ParamConstraint>(m, "ParamConstraint")
        .def_readonly("kind", &ParamConstraint::kind)
        .def_readonly("V", &ParamConstraint::V)
        .def_readonly("kappa", &ParamConstraint::kappa)
        .def_readonly("dir_v", &ParamConstraint::dir_v)
        .def_readonly("dir_kappa", &ParamConstraint::dir_kappa)
        .def_readonly("combination", &ParamConstraint::combination)
        .def_readonly("value", &ParamConstraint::value)
        .def_readonly("residual", &ParamConstraint::residual)
        .def("satisfied_by", &ParamConstraint::satisfied_by, py::arg("V"), py::arg("kappa"),
             py::arg("tol"));

    py::class_<CorrespondenceTriplet>(m, "CorrespondenceTriplet")
        .def_readonly("energy", &CorrespondenceTriplet::energy)
        .def_readonly("psi", &CorrespondenceTriplet::psi)
        .def_readonly("phi", &CorrespondenceTriplet::phi)
        .def_readonly("phi_tilde", &CorrespondenceTriplet::phi_tilde)
        .def_readonly("match", &CorrespondenceTriplet::match);

    py::class_<CorrespondenceReport>(m, "CorrespondenceReport")
        .def_readonly("energy", &CorrespondenceReport::energy)
        .def_readonly("constraint", &CorrespondenceReport::constraint)
        .def_readonly("proportionality", &CorrespondenceReport::proportionality)
        .def_readonly("reference_defect", &CorrespondenceReport::reference_defect)
        .def_readonly("superposition_residual", &CorrespondenceReport::superposition_residual)
        .def_readonly("verified", &CorrespondenceReport::verified);

    m.def("endpoint_condition_residual", &endpoint_condition_residual, py::arg("psi"),
          py::arg("phi"), py::arg("phi_tilde"), py::arg("params"), py::arg("site_a"),
          py::arg("site_b"));
    m.def("solve_hermitian_params", &solve_hermitian_params, py::arg("amplitudes"),
          py::arg("gamma"), py::arg("zero_tol") = 1e-12);
    m.def("build_correspondence",
          py::overload_cast<const HamiltonianTriple&, const TripleEigensystems&,
                            const std::vector<SpectralMatch>&, const ParityOperator&,
                            const Tolerances&>(&build_correspondence),
          py::arg("triple"), py::arg("systems"), py::arg("matches"), py::arg("parity"),
          py::arg("tol") = Tolerances{});
    m.def(
        "verify_superposition",
        [](const StateVector& phi, const StateVector& phi_tilde, const Matrix& h,
           double energy, const Tolerances& tol, std::optional<StateVector> reference) {
            return verify_superposition(phi, phi_tilde, h, energy, tol,
                                        reference ? &*reference : nullptr);
        },
        py::arg("phi"), py::arg("phi_tilde"), py::arg("H"), py::arg("energy"),
        py::arg("tol") = Tolerances{}, py::arg("reference_psi") = std::nullopt);

    py::class_<ClosedFormState>(m, "ClosedFormState")
        .def_readonly("vector", &ClosedFormState::vector)
        .def_readonly("energy", &ClosedFormState::energy)
        .def_readonly("formula", &ClosedFormState::formula)
        .def_readonly("required_params", &ClosedFormState::required_params);

    py::class_<UniformZeroModes>(m, "UniformZeroModes")
        .def_readonly("phi_minus", &UniformZeroModes::phi_minus)
        .def_readonly("phi_plus", &UniformZeroModes::phi_plus)
        .def_readonly("psi", &UniformZeroModes::psi)
        .def_readonly("proportionality", &UniformZeroModes::proportionality);

    py::class_<SSHZeroModes>(m, "SSHZeroModes")
        .def_readonly("kappa_c", &SSHZeroModes::kappa_c)
        .def_readonly("gamma_c", &SSHZeroModes::gamma_c)
        .def_readonly("delta_ratio", &SSHZeroModes::delta_ratio)
        .def_readonly("norm_const", &SSHZeroModes::norm_const)
        .def_readonly("psi1", &SSHZeroModes::psi1)
        .def_readonly("psi2", &SSHZeroModes::psi2)
        .def_readonly("psi_plus", &SSHZeroModes::psi_plus)
        .def_readonly("psi_minus", &SSHZeroModes::psi_minus)
        .def_readonly("phi_zm", &SSHZeroModes::phi_zm)
        .def_readonly("eta_zm", &SSHZeroModes::eta_zm);

    m.def("n2_nonhermitian_eigensystem",
          [](double gamma, double J) { return to_vector(n2_nonhermitian_eigensystem(gamma, J)); },
          py::arg("gamma"), py::arg("J") = 1.0);
    m.def("n2_hermitian_even_odd_spectrum",
          [](double V, double kappa, double J) {
              return to_vector(n2_hermitian_even_odd_spectrum(V, kappa, J));
          },
          py::arg("V"), py::arg("kappa"), py::arg("J") = 1.0);
    m.def("uniform_zero_modes", &uniform_zero_modes, py::arg("m"), py::arg("J") = 1.0);
    m.def("ssh_zero_modes", &ssh_zero_modes, py::arg("site_count"), py::arg("J"),
          py::arg("delta"));
    m.def("uniform_band_edge_state", &uniform_band_edge_state, py::arg("n_total"),
          py::arg("J"), py::arg("params"));
    m.def("gaussian_packet", &gaussian_packet, py::arg("n_total"), py::arg("center"),
          py::arg("momentum"), py::arg("alpha"));
    m.def("symmetrize_state", &symmetrize_state, py::arg("state"), py::arg("parity"));

    py::class_<StateTrack>(m, "StateTrack")
        .def_readonly("label", &StateTrack::label)
        .def_readonly("site_probabilities", &StateTrack::site_probabilities)
        .def_readonly("norm_sq", &StateTrack::norm_sq);

    py::class_<EvolutionTrace>(m, "EvolutionTrace")
        .def_readonly("times", &EvolutionTrace::times)
        .def_readonly("tracks", &EvolutionTrace::tracks)
        .def_readonly("overlap_phi_phitilde", &EvolutionTrace::overlap_phi_phitilde)
        .def_readonly("superposition_defect", &EvolutionTrace::superposition_defect);

    py::class_<ExpansionCoefficients>(m, "ExpansionCoefficients")
        .def_readonly("c", &ExpansionCoefficients::c)
        .def_readonly("truncation_residual", &ExpansionCoefficients::truncation_residual)
        .def_readonly("psi0", &ExpansionCoefficients::psi0)
        .def_readonly("phi0", &ExpansionCoefficients::phi0)
        .def_readonly("phi_tilde0", &ExpansionCoefficients::phi_tilde0);

    py::class_<AuditReport>(m, "AuditReport")
        .def_readonly("psi_norm_dev", &AuditReport::psi_norm_dev)
        .def_readonly("phi_norm_dev", &AuditReport::phi_norm_dev)
        .def_readonly("phi_tilde_norm_dev", &AuditReport::phi_tilde_norm_dev)
        .def_readonly("overlap_dev", &AuditReport::overlap_dev)
        .def_readonly("identity_dev", &AuditReport::identity_dev)
        .def_readonly("balance_dev", &AuditReport::balance_dev)
        .def_readonly("max_defect", &AuditReport::max_defect)
        .def_readonly("theta", &AuditReport::theta);

    m.def("matrix_exponential", &matrix_exponential, py::arg("matrix"), py::arg("t"));
    m.def("evolve", &evolve, py::arg("state"), py::arg("matrix"), py::arg("times"),
          py::arg("label") = "state");
    m.def("expand_in_common_subspace", &expand_in_common_subspace, py::arg("psi0"),
          py::arg("family"));
    m.def("parallel_evolve", &parallel_evolve, py::arg("triple"), py::arg("phi0"),
          py::arg("phi_tilde0"), py::arg("psi0"), py::arg("times"));
    m.def("probability_audit", &probability_audit, py::arg("trace"));
    m.def("uniform_time_grid", &uniform_time_grid, py::arg("dt"), py::arg("t_max"));
}

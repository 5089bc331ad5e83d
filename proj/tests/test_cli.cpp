#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "parallel_spectra/commands.hpp"
#include "parallel_spectra/csv.hpp"
#include "parallel_spectra/spectral.hpp"

using namespace paraspec;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("paraspec_cli_" + std::to_string(::getpid())) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

size_t count_lines(const std::string& s) {
    size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

RunConfig make_config(const std::string& text) { return parse_config(json::parse(text)); }

const char* kN2 = R"({
  "model": {"variant": "uniform", "chain_length": 2},
  "params": {"gamma": 1.0, "kappa": 0.5, "V": 0.5}
})";

int spawn_cli(const std::string& args) {
    const char* bin = std::getenv("PARALLEL_SPECTRA_BIN");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string("\"") + bin + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string config_dir() {
    const char* dir = std::getenv("PARASPEC_CONFIG_DIR");
    REQUIRE(dir != nullptr);
    return dir;
}

} // namespace

TEST_CASE("config parsing accepts the documented schema and rejects strangers") {
    const RunConfig cfg = make_config(kN2);
    CHECK(std::get<UniformChainSpec>(cfg.model).chain_length == 2);
    CHECK(cfg.params.gamma == 1.0);
    CHECK(cfg.hopping == 1.0);
    CHECK(cfg.tol.eig == 1e-10);

    CHECK_THROWS_AS(make_config(R"({"params": {}})"), ConfigError); // no model
    CHECK_THROWS_AS(make_config(R"({"model": {"variant": "torus"}})"), ConfigError);
    CHECK_THROWS_AS(
        make_config(R"({"model": {"variant": "uniform", "chain_length": 2}, "bogus": 1})"),
        ConfigError);
    CHECK_THROWS_AS(
        make_config(
            R"({"model": {"variant": "uniform", "chain_length": 2, "weird": true}})"),
        ConfigError);
    CHECK_THROWS_AS(
        make_config(
            R"({"model": {"variant": "uniform", "chain_length": 2}, "params": {"J": 0.0}})"),
        ConfigError);
    CHECK_THROWS_AS(
        make_config(
            R"({"model": {"variant": "uniform", "chain_length": 2}, "tolerances": {"eig": -1}})"),
        ConfigError);
}

TEST_CASE("custom-graph configs parse with 1-based indices") {
    const RunConfig cfg = make_config(R"({
      "model": {
        "variant": "custom",
        "site_count": 3,
        "edges": [[1, 2, -1.0], [2, 3, -1.0]],
        "attach_a": 1,
        "attach_b": 3,
        "g": -1.0,
        "mirror": [3, 2, 1]
      }
    })");
    const auto& graph = std::get<CustomGraphSpec>(cfg.model);
    CHECK(graph.site_count == 3);
    CHECK(graph.edges[0].a == 0);
    CHECK(graph.edges[1].b == 2);
    CHECK(graph.attach_a == 0);
    CHECK(graph.attach_b == 2);
    REQUIRE(graph.mirror.has_value());
    CHECK((*graph.mirror)[0] == 2);

    // builds and has a valid parity
    const auto triple = build_triple(cfg.model, cfg.params);
    CHECK(triple.dim() == 5);
    CHECK(pt_symmetry_residual(triple, parity_operator(triple)) == 0.0);

    CHECK_THROWS_AS(make_config(R"({
      "model": {"variant": "custom", "site_count": 2,
                "edges": [[1, "x", -1.0]], "attach_a": 1, "attach_b": 2, "g": -1.0}
    })"),
                    ConfigError);
}

TEST_CASE("--set overrides reach nested keys") {
    json doc = json::parse(kN2);
    apply_override(doc, "params.gamma=2.5");
    apply_override(doc, "scenario.dt=0.25");
    apply_override(doc, "model.chain_length=4");
    const RunConfig cfg = parse_config(doc);
    CHECK(cfg.params.gamma == 2.5);
    CHECK(cfg.scenario.dt == 0.25);
    CHECK(std::get<UniformChainSpec>(cfg.model).chain_length == 4);

    CHECK_THROWS_AS(apply_override(doc, "nonsense"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "=3"), ConfigError);
}

TEST_CASE("spectrum command emits 12 rows for the 4-site triple") {
    const auto dir = fresh_dir("spectrum_n2");
    CHECK(cmd_spectrum(make_config(kN2), dir, false) == 0);
    const std::string csv = slurp(dir / "spectrum.csv");
    CHECK(count_lines(csv) == 13); // header + 3 systems x 4 states
    CHECK(csv.rfind("index,system,re_energy,im_energy,residual\n", 0) == 0);

    const json meta = json::parse(slurp(dir / "meta.json"));
    CHECK(meta.at("command") == "spectrum");
    CHECK(meta.at("version") == std::string(kVersion));
}

TEST_CASE("spectrum rows for H and N coincide when all perturbations vanish") {
    const auto dir = fresh_dir("spectrum_trivial");
    const RunConfig cfg = make_config(R"({
      "model": {"variant": "uniform", "chain_length": 3},
      "params": {"gamma": 0.0, "kappa": 0.0, "V": 0.0}
    })");
    CHECK(cmd_spectrum(cfg, dir, false) == 0);
    std::istringstream csv(slurp(dir / "spectrum.csv"));
    std::string line;
    std::getline(csv, line); // header
    std::vector<std::string> h_rows, n_rows;
    while (std::getline(csv, line)) {
        if (line.find(",H,") != std::string::npos)
            h_rows.push_back(line.substr(line.find(",H,") + 3));
        if (line.find(",N,") != std::string::npos)
            n_rows.push_back(line.substr(line.find(",N,") + 3));
    }
    REQUIRE(h_rows.size() == 5);
    REQUIRE(n_rows.size() == 5);
    for (size_t k = 0; k < h_rows.size(); ++k) {
        // identical spectra; residual column may differ at machine level
        const auto strip = [](const std::string& s) {
            return s.substr(0, s.rfind(','));
        };
        CHECK(strip(h_rows[k]) == strip(n_rows[k]));
    }
}

TEST_CASE("spectrum --match annotates the common real spectrum") {
    const auto dir = fresh_dir("spectrum_match");
    const RunConfig cfg = make_config(R"({
      "model": {"variant": "uniform", "chain_length": 5},
      "params": {"gamma": 0.0, "kappa": 0.0, "V": 0.0}
    })");
    CHECK(cmd_spectrum(cfg, dir, true) == 0);
    std::istringstream csv(slurp(dir / "spectrum.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "index,system,re_energy,im_energy,residual,matched,match_id");
    size_t matched = 0;
    while (std::getline(csv, line))
        if (line.find(",true,") != std::string::npos) ++matched;
    CHECK(matched == 21); // 7 matches visible in each of the three systems
}

TEST_CASE("sweep finds the PT transition of the 4-site chain") {
    const auto dir = fresh_dir("sweep_n2");
    const RunConfig cfg = make_config(R"({
      "model": {"variant": "uniform", "chain_length": 2},
      "params": {"gamma": 0.0, "kappa": 0.0, "V": 0.0},
      "scenario": {"sweep": {"param": "gamma", "from": 0.0, "to": 3.0, "steps": 61}}
    })");
    CHECK(cmd_sweep(cfg, dir) == 0);
    const json tr = json::parse(slurp(dir / "transitions.json"));
    CHECK(tr.at("param") == "gamma");
    REQUIRE(tr.at("transitions").size() >= 1);
    for (const auto& t : tr.at("transitions"))
        CHECK(std::abs(t.at("value").get<double>() - 2.0) <= 1e-3);

    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(count_lines(csv) == 1 + 61 * 4);
    CHECK(csv.rfind("param_value,index,re,im\n", 0) == 0);
}

TEST_CASE("sweep over a single point produces one block and no transitions") {
    const auto dir = fresh_dir("sweep_single");
    const RunConfig cfg = make_config(R"({
      "model": {"variant": "uniform", "chain_length": 2},
      "params": {"gamma": 0.0, "kappa": 0.0, "V": 0.0},
      "scenario": {"sweep": {"param": "gamma", "from": 1.0, "to": 1.0, "steps": 1}}
    })");
    CHECK(cmd_sweep(cfg, dir) == 0);
    CHECK(count_lines(slurp(dir / "sweep.csv")) == 1 + 4);
    CHECK(json::parse(slurp(dir / "transitions.json")).at("transitions").empty());
}

TEST_CASE("sweep requires its scenario block") {
    CHECK_THROWS_AS(cmd_sweep(make_config(kN2), fresh_dir("sweep_missing")), ConfigError);
}

TEST_CASE("verify passes on the V = kappa configuration") {
    const auto dir = fresh_dir("verify_n2");
    CHECK(cmd_verify(make_config(kN2), dir) == 0);
    const json doc = json::parse(slurp(dir / "correspondence.json"));
    CHECK(doc.at("summary").at("total").get<int>() == 3);
    CHECK(doc.at("summary").at("verified").get<int>() == 3);
    for (const auto& s : doc.at("states")) {
        CHECK(s.at("verified").get<bool>());
        CHECK(s.at("constraint").at("kind") == "line");
        CHECK(s.at("constraint_satisfied_by_params").get<bool>());
        CHECK(s.at("superposition_residual").get<double>() < 1e-10);
    }
    // the -J state carries the V - kappa = 0 line
    bool saw_case_iii = false;
    for (const auto& s : doc.at("states")) {
        if (std::abs(s.at("energy").get<double>() + 1.0) > 1e-9) continue;
        CHECK(s.at("constraint").at("combination") == "V-kappa");
        CHECK(std::abs(s.at("constraint").at("value").get<double>()) < 1e-10);
        saw_case_iii = true;
    }
    CHECK(saw_case_iii);
}

TEST_CASE("zero-modes: uniform EP report") {
    const auto dir = fresh_dir("zm_uniform");
    const RunConfig cfg = make_config(R"({
      "model": {"variant": "uniform", "chain_length": 5},
      "params": {"gamma": -2.0}
    })");
    CHECK(cmd_zero_modes(cfg, dir) == 0);
    CHECK(count_lines(slurp(dir / "zero_modes.csv")) == 8); // header + 7 sites
    const json doc = json::parse(slurp(dir / "zero_modes.json"));
    CHECK(doc.at("model") == "uniform");
    CHECK(doc.at("m").get<int>() == 1);
    CHECK(std::abs(doc.at("biorthogonal_overlap").at("re").get<double>()) < 1e-12);
    CHECK(doc.at("residuals").at("hn_phi_minus").get<double>() < 1e-12);
    CHECK(doc.at("proportionality").get<double>() ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    // N_total = 6 violates the 4m+3 family
    const RunConfig bad = make_config(R"({
      "model": {"variant": "uniform", "chain_length": 4},
      "params": {"gamma": -2.0}
    })");
    CHECK_THROWS_AS(cmd_zero_modes(bad, fresh_dir("zm_bad")), ConfigError);
}

TEST_CASE("zero-modes: ssh critical coupling") {
    const auto dir = fresh_dir("zm_ssh");
    const RunConfig cfg = make_config(R"({
      "model": {"variant": "ssh", "site_count": 20, "delta": 0.1}
    })");
    CHECK(cmd_zero_modes(cfg, dir) == 0);
    const json doc = json::parse(slurp(dir / "zero_modes.json"));
    CHECK(doc.at("kappa_c").get<double>() ==
          doctest::Approx(1.1 * std::pow(9.0 / 11.0, 10)).epsilon(1e-12));
    CHECK(doc.at("residuals").at("h_psi1").get<double>() < 1e-12);
    CHECK(doc.at("proportionality").at("sum_defect").get<double>() < 1e-12);
    CHECK(count_lines(slurp(dir / "zero_modes.csv")) == 21);

    const RunConfig undimerized = make_config(R"({
      "model": {"variant": "ssh", "site_count": 20, "delta": 0.0}
    })");
    CHECK_THROWS_AS(cmd_zero_modes(undimerized, fresh_dir("zm_ssh_bad")), DomainError);
}

TEST_CASE("evolve: small-chain audit passes and the trivial limit quarters the profile") {
    // 60 sites is the smallest comfortable chain: momentum pi/2 then cleanly
    // filters both band-edge states and the packet tails clear the boundaries
    const char* small = R"({
      "model": {"variant": "uniform", "chain_length": 58},
      "params": {"gamma": 0.3, "kappa": -1.0, "V": 1.0},
      "scenario": {"dt": 0.5, "t_max": 10.0, "dump_times": [0.0, 5.0, 10.0]}
    })";
    const auto dir = fresh_dir("evolve_small");
    CHECK(cmd_evolve(make_config(small), dir) == 0);
    const json audit = json::parse(slurp(dir / "audit.json"));
    CHECK(audit.at("pass").get<bool>());
    CHECK(audit.at("max_superposition_defect").get<double>() <= 1e-8);
    CHECK(audit.at("deviations").at("identity").get<double>() <= 1e-8);
    const std::string trace = slurp(dir / "trace.csv");
    CHECK(count_lines(trace) == 1 + 3 * 60);
    CHECK(trace.rfind("time,site,prob_phi,prob_phitilde,prob_psi\n", 0) == 0);

    // gamma = 0: prob_phi = prob_psi / 4 on every emitted row
    json doc = json::parse(small);
    doc["params"]["gamma"] = 0.0;
    const auto dir0 = fresh_dir("evolve_trivial");
    CHECK(cmd_evolve(parse_config(doc), dir0) == 0);
    std::istringstream rows(slurp(dir0 / "trace.csv"));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        std::istringstream fields(line);
        std::string time, site, p_phi, p_phit, p_psi;
        std::getline(fields, time, ',');
        std::getline(fields, site, ',');
        std::getline(fields, p_phi, ',');
        std::getline(fields, p_phit, ',');
        std::getline(fields, p_psi, ',');
        CHECK(std::abs(std::stod(p_phi) - std::stod(p_psi) / 4.0) < 1e-12);
    }
}

TEST_CASE("every command is byte-deterministic across repeated runs") {
    auto run_twice = [](const RunConfig& cfg, const std::string& tag, auto&& command,
                        std::initializer_list<const char*> files) {
        const auto a = fresh_dir(tag + "_a");
        const auto b = fresh_dir(tag + "_b");
        command(cfg, a);
        command(cfg, b);
        for (const char* f : files) CHECK(slurp(a / f) == slurp(b / f));
    };

    run_twice(make_config(kN2), "det_spectrum",
              [](const RunConfig& c, const std::filesystem::path& d) {
                  return cmd_spectrum(c, d, true);
              },
              {"spectrum.csv", "meta.json"});

    const RunConfig sweep_cfg = make_config(R"({
      "model": {"variant": "ssh", "site_count": 20, "delta": 0.1},
      "scenario": {"sweep": {"param": "gamma", "from": 0.0, "to": 0.3, "steps": 13}}
    })");
    run_twice(sweep_cfg, "det_sweep", cmd_sweep, {"sweep.csv", "transitions.json"});

    run_twice(make_config(kN2), "det_verify", cmd_verify, {"correspondence.json"});

    const RunConfig zm_cfg = make_config(R"({
      "model": {"variant": "ssh", "site_count": 20, "delta": 0.1}
    })");
    run_twice(zm_cfg, "det_zm", cmd_zero_modes, {"zero_modes.csv", "zero_modes.json"});

    const RunConfig ev_cfg = make_config(R"({
      "model": {"variant": "uniform", "chain_length": 17},
      "params": {"gamma": 0.3, "kappa": -1.0, "V": 1.0},
      "scenario": {"dt": 0.5, "t_max": 5.0, "dump_times": [0.0, 5.0]}
    })");
    run_twice(ev_cfg, "det_evolve", cmd_evolve, {"trace.csv", "audit.json"});
}

TEST_CASE("sweep output does not depend on the thread pool size") {
    const RunConfig cfg = make_config(R"({
      "model": {"variant": "uniform", "chain_length": 2},
      "scenario": {"sweep": {"param": "gamma", "from": 0.0, "to": 3.0, "steps": 31}}
    })");
    const auto serial = fresh_dir("threads_serial");
    const auto pooled = fresh_dir("threads_pooled");
    ::setenv("PARALLEL_SPECTRA_THREADS", "1", 1);
    cmd_sweep(cfg, serial);
    ::setenv("PARALLEL_SPECTRA_THREADS", "8", 1);
    cmd_sweep(cfg, pooled);
    ::unsetenv("PARALLEL_SPECTRA_THREADS");
    CHECK(slurp(serial / "sweep.csv") == slurp(pooled / "sweep.csv"));
    CHECK(slurp(serial / "transitions.json") == slurp(pooled / "transitions.json"));

    ::setenv("PARALLEL_SPECTRA_THREADS", "zero", 1);
    CHECK_THROWS_AS(cmd_sweep(cfg, fresh_dir("threads_bad")), ConfigError);
    ::unsetenv("PARALLEL_SPECTRA_THREADS");
}

TEST_CASE("emitted doubles round-trip exactly") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int trial = 0; trial < 1000; ++trial) {
        const double x = std::ldexp(mantissa(rng), exponent(rng));
        const std::string s = paraspec::format_double(x);
        CHECK(std::stod(s) == x);
    }
    CHECK(paraspec::format_double(0.0) == "0");
    CHECK(paraspec::format_double(-2.0) == "-2");
}

TEST_CASE("binary exit codes follow the 0/1/2 contract") {
    const std::string cfg = config_dir();
    const auto out = fresh_dir("bin_out").string();

    CHECK(spawn_cli("spectrum --config " + cfg + "/uniform_n2.json --output-dir " + out) == 0);
    CHECK(spawn_cli("verify --config " + cfg + "/uniform_n2.json --output-dir " + out) == 0);

    // audit failure -> 1
    CHECK(spawn_cli("evolve --config " + cfg + "/uniform_n2.json --output-dir " + out +
                    " --set model.chain_length=58 --set params.kappa=-1 --set params.V=1"
                    " --set params.gamma=0.3 --set scenario.t_max=5"
                    " --set scenario.dump_times=[0]"
                    " --set scenario.audit_tolerance=1e-30") == 1);

    // config errors -> 2
    CHECK(spawn_cli("spectrum --config /nonexistent.json --output-dir " + out) == 2);
    CHECK(spawn_cli("spectrum --config " + cfg + "/uniform_n2.json --output-dir " + out +
                    " --set model.chain_length=0") == 2);
    CHECK(spawn_cli("spectrum --config " + cfg + "/uniform_n2.json --output-dir " + out +
                    " --set bogus=1") == 2);
    CHECK(spawn_cli("zero-modes --config " + cfg + "/uniform_n2.json --output-dir " + out +
                    " --set model.chain_length=4") == 2);
    CHECK(spawn_cli("zero-modes --config " + cfg + "/ssh_n20.json --output-dir " + out +
                    " --set model.delta=0.0") == 2);
    CHECK(spawn_cli("sweep --config " + cfg + "/uniform_n2.json --output-dir " + out) == 2);
}

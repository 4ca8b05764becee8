// qcm: constructs optimal N-level cloning machines, computes cloning
// fidelities, and verifies optimality through the moment-matrix spectrum.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <algorithm>
#include <array>
#include <cstdint>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcm/linalg.hpp"
#include "qcm/machine.hpp"
#include "qcm/optimality.hpp"
#include "qcm/rng.hpp"
#include "qcm/sphere.hpp"
#include "qcm/state_io.hpp"
#include "qcm/symmetric_basis.hpp"
#include "qcm/types.hpp"

namespace {

using nlohmann::ordered_json;

enum class Emit { json, csv, text };

Emit parse_emit(const std::string& s) {
    if (s == "json") return Emit::json;
    if (s == "csv") return Emit::csv;
    if (s == "text") return Emit::text;
    throw CLI::ValidationError("--emit", "must be json, csv, or text");
}

ordered_json envelope(const std::string& command, ordered_json inputs, ordered_json results,
                      double tolerance, bool pass, std::uint64_t seed) {
    ordered_json doc;
    doc["command"] = command;
    doc["version"] = qcm::kVersion;
    doc["inputs"] = std::move(inputs);
    doc["results"] = std::move(results);
    doc["tolerance"] = tolerance;
    doc["pass"] = pass;
    doc["seed"] = seed;
    return doc;
}

int finish(const ordered_json& doc, Emit emit, const std::string& text_alternative) {
    if (emit == Emit::text)
        std::cout << text_alternative;
    else
        std::cout << doc.dump(2) << "\n";
    return doc.at("pass").get<bool>() ? 0 : 1;
}

ordered_json complex_pair(qcm::Complex z) { return ordered_json::array({z.real(), z.imag()}); }

struct CommonOptions {
    std::string emit_str = "json";
    std::uint64_t seed = 12345;
    std::int64_t dim_cap = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--emit", emit_str, "Output format: json, csv, or text")
            ->default_str("json");
        cmd->add_option("--seed", seed, "Random seed echoed in every report")
            ->default_str("12345");
        cmd->add_option("--dim-cap", dim_cap,
                        "Dimension cap override (default: QCM_DIM_CAP env or 4096)");
    }

    void stamp(ordered_json& inputs) const {
        inputs["emit"] = emit_str;
        inputs["dim_cap"] = qcm::dimension_cap(dim_cap);
    }
};

// ---------------------------------------------------------------- fidelity

int run_fidelity(int n, int nprime, int m, int n_max, int m_max, double tol,
                 const CommonOptions& common) {
    const Emit emit = parse_emit(common.emit_str);
    const bool table_mode = (n_max > 0 || m_max > 0);

    if (table_mode) {
        if (n_max < 1 || m_max < 1)
            throw CLI::ValidationError("fidelity", "table mode needs --n-max >= 1 and --m-max >= 1");
        if (nprime != 1)
            throw CLI::ValidationError("fidelity", "tables cover the 1->M machine only");
        ordered_json table = ordered_json::array();
        std::ostringstream csv;
        csv << "N\\M";
        for (int mm = 1; mm <= m_max; ++mm) csv << "," << mm;
        csv << "\n";
        for (int nn = 1; nn <= n_max; ++nn) {
            ordered_json row = ordered_json::array();
            csv << nn;
            for (int mm = 1; mm <= m_max; ++mm) {
                const double f = qcm::fmax_analytic(nn, mm);
                row.push_back(f);
                csv << "," << qcm::fmax_rational(nn, mm).str();
            }
            csv << "\n";
            table.push_back(std::move(row));
        }
        ordered_json inputs{{"n_max", n_max}, {"m_max", m_max}, {"n_inputs", 1}};
        common.stamp(inputs);
        ordered_json results{{"fmax_table", std::move(table)}};
        const ordered_json doc =
            envelope("fidelity", std::move(inputs), std::move(results), tol, true, common.seed);
        if (emit == Emit::csv) {
            std::cout << csv.str();
            return 0;
        }
        return finish(doc, emit, csv.str());
    }

    if (emit == Emit::csv)
        throw CLI::ValidationError("--emit", "csv is restricted to fidelity tables");
    if (n < 1 || m < 1 || nprime < 1)
        throw CLI::ValidationError("fidelity", "need --n >= 1, --m >= 1, --nprime >= 1");
    if (nprime > m) throw CLI::ValidationError("fidelity", "--nprime must not exceed --m");

    const qcm::MachineSpec spec(n, nprime, m);
    const qcm::Rational fnm = qcm::fnm_rational(n, nprime, m);
    const qcm::Rational tilde = qcm::tilde_fmax_rational(n, nprime, m);
    const qcm::CloningIsometry machine = qcm::build_isometry(spec, common.dim_cap);
    const double machine_fidelity = qcm::machine_basis_fidelity(machine);
    const qcm::Rational combinatorial = qcm::basis_fidelity_rational(spec);

    const bool machine_ok = std::abs(machine_fidelity - fnm.value()) <= tol;
    const bool sum_ok = combinatorial == fnm;
    const bool learning_ok = tilde <= fnm;
    const bool pass = machine_ok && sum_ok && learning_ok;

    ordered_json results;
    if (nprime == 1) {
        results["fmax"] = qcm::fmax_analytic(n, m);
        results["fmax_rational"] = qcm::fmax_rational(n, m).str();
    }
    results["fnm"] = fnm.value();
    results["fnm_rational"] = fnm.str();
    results["tilde_fmax"] = tilde.value();
    results["tilde_fmax_rational"] = tilde.str();
    results["machine_basis_fidelity"] = machine_fidelity;
    results["combinatorial_sum_rational"] = combinatorial.str();
    results["machine_matches_analytic"] = machine_ok;
    results["combinatorial_matches_analytic"] = sum_ok;
    results["learning_inequality_holds"] = learning_ok;

    std::ostringstream text;
    text << "N=" << n << " N'=" << nprime << " M=" << m << "\n"
         << "analytic fidelity      " << fnm.value() << " (" << fnm.str() << ")\n"
         << "composite-input bound  " << tilde.value() << " (" << tilde.str() << ")\n"
         << "machine basis fidelity " << machine_fidelity << "\n"
         << (pass ? "PASS" : "FAIL") << "\n";

    ordered_json inputs{{"n_levels", n}, {"n_inputs", nprime}, {"n_copies", m}};
    common.stamp(inputs);
    return finish(envelope("fidelity", std::move(inputs), std::move(results), tol, pass,
                           common.seed),
                  emit, text.str());
}

// ------------------------------------------------------------------ verify

struct CheckRow {
    std::string check;
    int n;
    int nprime;
    int m;
    double error;
    bool pass;
};

std::vector<CheckRow> verify_point(int n, int m, int nprime_max, double tol, int states,
                                   int draws, std::uint64_t point_seed, std::int64_t cap) {
    std::vector<CheckRow> rows;
    const double fmax = qcm::fmax_analytic(n, m);

    for (int np = 1; np <= std::min(nprime_max, m); ++np) {
        const qcm::MachineSpec spec(n, np, m);
        const qcm::CloningIsometry iso = qcm::build_isometry(spec, cap);
        const qcm::Matrix gram = iso.matrix.adjoint() * iso.matrix;
        const double iso_err =
            (gram - qcm::Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
        rows.push_back({"isometry", n, np, m, iso_err, iso_err <= tol});

        const bool norm_exact = qcm::beta_squared_sum_rational(spec) == qcm::Rational(1);
        const double fid_err =
            std::abs(qcm::basis_fidelity(spec) - qcm::fnm_analytic(n, np, m));
        rows.push_back({"normalization", n, np, m, norm_exact ? 0.0 : 1.0, norm_exact});
        rows.push_back({"basis_fidelity", n, np, m, fid_err, fid_err <= tol});
    }

    qcm::RandomStream rng(point_seed);
    const qcm::CloningIsometry machine = qcm::build_isometry(qcm::MachineSpec(n, 1, m), cap);
    double fid_min = 1.0, fid_max = 0.0, norm_err = 0.0;
    for (int s = 0; s < states; ++s) {
        const qcm::PureState psi = qcm::sample_state(n, rng);
        const qcm::CloneOutput out = qcm::clone_state(psi, machine);
        norm_err = std::max(norm_err, std::abs(out.norm_squared() - 1.0));
        const double f = qcm::single_copy_density(out).expectation(psi);
        fid_min = std::min(fid_min, f);
        fid_max = std::max(fid_max, f);
    }
    rows.push_back({"output_norm", n, 1, m, norm_err, norm_err <= tol});
    rows.push_back({"universality", n, 1, m, fid_max - fid_min, fid_max - fid_min <= tol});
    const double univ_err = std::abs(fid_max - fmax);
    rows.push_back({"universal_value", n, 1, m, univ_err, univ_err <= tol});

    const qcm::MomentMatrix a = qcm::build_A(n, m, cap);
    const qcm::EigenDecomposition eig = qcm::hermitian_eigen(a.entries);
    const double scale = 1.0 / (static_cast<double>(m) * n * (n + 1));
    const std::int64_t top_mult = qcm::symmetric_dimension(n, m - 1);
    double spec_err = 0.0;
    for (int k = 0; k < eig.values.size(); ++k) {
        const double expected = (k < top_mult ? (2.0 * m + n - 1) : m) * scale;
        spec_err = std::max(spec_err, std::abs(eig.values(k) - expected));
    }
    rows.push_back({"spectrum", n, 1, m, spec_err, spec_err <= tol});
    const double nlam_err = std::abs(n * eig.values(0) - fmax);
    rows.push_back({"max_eigen_fidelity", n, 1, m, nlam_err, nlam_err <= tol});

    const qcm::LagrangeReport lag = qcm::lagrange_identity_check(n, m, cap);
    const double lag_err = std::max(std::abs(lag.family_value - lag.n_lambda_max),
                                    std::abs(lag.machine_value - lag.n_lambda_max));
    rows.push_back({"lagrange_identity", n, 1, m, lag_err, lag_err <= tol});

    double worst_excess = -1.0;
    for (int d = 0; d < draws; ++d)
        worst_excess = std::max(worst_excess, qcm::random_machine_fidelity(a, rng) - fmax);
    rows.push_back({"optimality_bound", n, 1, m, std::max(worst_excess, 0.0),
                    worst_excess <= tol});
    return rows;
}

int run_verify(int n_max, int m_max, int nprime_max, double tol, int states, int draws,
               const CommonOptions& common) {
    const Emit emit = parse_emit(common.emit_str);
    if (emit == Emit::csv)
        throw CLI::ValidationError("--emit", "csv is restricted to fidelity tables");
    if (n_max < 2) throw CLI::ValidationError("verify", "--n-max must be >= 2");
    if (m_max < 1) throw CLI::ValidationError("verify", "--m-max must be >= 1");
    if (nprime_max < 1) throw CLI::ValidationError("verify", "--nprime-max must be >= 1");
    if (!(tol > 0.0)) throw CLI::ValidationError("verify", "--tol must be positive");
    if (states < 2 || draws < 0)
        throw CLI::ValidationError("verify", "--states must be >= 2 and --draws >= 0");

    // Grid points run concurrently; rows are collected in grid order.
    std::vector<std::future<std::vector<CheckRow>>> futures;
    std::uint64_t point_index = 0;
    for (int n = 2; n <= n_max; ++n)
        for (int m = 1; m <= m_max; ++m) {
            const std::uint64_t point_seed = qcm::derive_stream_seed(common.seed, point_index++);
            futures.push_back(std::async(std::launch::async, verify_point, n, m, nprime_max,
                                         tol, states, draws, point_seed,
                                         common.dim_cap));
        }

    ordered_json checks = ordered_json::array();
    std::ostringstream text;
    int failed = 0, total = 0;
    for (auto& fut : futures) {
        for (const CheckRow& row : fut.get()) {
            ++total;
            if (!row.pass) ++failed;
            checks.push_back(ordered_json{{"check", row.check},
                                          {"n", row.n},
                                          {"nprime", row.nprime},
                                          {"m", row.m},
                                          {"error", row.error},
                                          {"pass", row.pass}});
            text << (row.pass ? "pass " : "FAIL ") << row.check << " n=" << row.n
                 << " nprime=" << row.nprime << " m=" << row.m << " error=" << row.error
                 << "\n";
        }
    }
    const bool pass = (failed == 0);
    text << (pass ? "PASS" : "FAIL") << " (" << total - failed << "/" << total << " checks)\n";

    ordered_json inputs{{"n_max", n_max}, {"m_max", m_max},   {"nprime_max", nprime_max},
                        {"states", states}, {"draws", draws}};
    common.stamp(inputs);
    ordered_json results{{"checks", std::move(checks)},
                         {"summary", ordered_json{{"total", total}, {"failed", failed}}}};
    return finish(envelope("verify", std::move(inputs), std::move(results), tol, pass,
                           common.seed),
                  emit, text.str());
}

// ------------------------------------------------------------------- clone

int run_clone(const std::string& state_path, int n, int m, bool renormalize, double tol,
              const CommonOptions& common) {
    const Emit emit = parse_emit(common.emit_str);
    if (emit == Emit::csv)
        throw CLI::ValidationError("--emit", "csv is restricted to fidelity tables");
    if (m < 1) throw CLI::ValidationError("clone", "--m must be >= 1");

    const qcm::PureState psi = qcm::load_state(state_path, renormalize);
    if (n > 0 && n != psi.levels())
        throw std::invalid_argument("clone: state file has " + std::to_string(psi.levels()) +
                                    " levels, --n says " + std::to_string(n));

    const qcm::CloningIsometry iso =
        qcm::build_isometry(qcm::MachineSpec(psi.levels(), 1, m), common.dim_cap);
    const qcm::CloneOutput out = qcm::clone_state(psi, iso);
    const qcm::DensityMatrix rho = qcm::single_copy_density(out);
    const double fidelity = rho.expectation(psi);
    const double fmax = qcm::fmax_analytic(psi.levels(), m);
    const bool pass = std::abs(fidelity - fmax) <= tol;

    ordered_json branches = ordered_json::array();
    for (const auto& [key, amp] : out.branches) {
        branches.push_back(
            ordered_json{{"copies", iso.copy_basis.at(key.first).counts()},
                         {"ancilla", iso.ancilla_basis.at(key.second).counts()},
                         {"amplitude", complex_pair(amp)}});
    }
    ordered_json density = ordered_json::array();
    for (int r = 0; r < rho.dim(); ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < rho.dim(); ++c) row.push_back(complex_pair(rho.entries()(r, c)));
        density.push_back(std::move(row));
    }

    std::ostringstream text;
    text << "levels " << psi.levels() << ", copies " << m << "\n"
         << "fidelity " << fidelity << " (analytic " << fmax << ")\n"
         << (pass ? "PASS" : "FAIL") << "\n";

    ordered_json inputs{{"state", state_path},
                        {"n_levels", psi.levels()},
                        {"n_copies", m},
                        {"renormalize", renormalize}};
    common.stamp(inputs);
    ordered_json results{{"input_amplitudes", qcm::amplitudes_to_json(psi.amplitudes())},
                         {"branches", std::move(branches)},
                         {"density", std::move(density)},
                         {"fidelity", fidelity},
                         {"fmax", fmax},
                         {"fmax_rational", qcm::fmax_rational(psi.levels(), m).str()}};
    return finish(envelope("clone", std::move(inputs), std::move(results), tol, pass,
                           common.seed),
                  emit, text.str());
}

// ---------------------------------------------------------------- spectrum

int run_spectrum(int n, int m, double tol, const CommonOptions& common) {
    const Emit emit = parse_emit(common.emit_str);
    if (emit == Emit::csv)
        throw CLI::ValidationError("--emit", "csv is restricted to fidelity tables");
    if (n < 1 || m < 1) throw CLI::ValidationError("spectrum", "need --n >= 1 and --m >= 1");

    const qcm::SpectrumReport numeric = qcm::max_eigen_fidelity(n, m, common.dim_cap);
    const double scale = static_cast<double>(m) * n * (n + 1);
    const std::int64_t top_mult = qcm::symmetric_dimension(n, m - 1);

    double deviation = 0.0;
    ordered_json lambda_prime = ordered_json::array();
    for (int k = 0; k < numeric.eigenvalues.size(); ++k) {
        const double expected = (k < top_mult ? (2.0 * m + n - 1) : m) / scale;
        deviation = std::max(deviation, std::abs(numeric.eigenvalues(k) - expected));
        lambda_prime.push_back(numeric.eigenvalues(k) * scale);
    }
    const double fmax = qcm::fmax_analytic(n, m);
    const double fid_err = std::abs(numeric.fidelity_from_lambda - fmax);
    const bool pass = deviation <= tol && fid_err <= tol;

    std::ostringstream text;
    text << "lambda'_max " << numeric.lambda_max * scale << " (closed form "
         << 2 * m + n - 1 << ")\n"
         << "fidelity from lambda " << numeric.fidelity_from_lambda << " (analytic " << fmax
         << ")\n"
         << "max deviation " << deviation << "\n"
         << (pass ? "PASS" : "FAIL") << "\n";

    ordered_json results{
        {"eigenvalues_lambda_prime", std::move(lambda_prime)},
        {"closed_form_lambda_prime",
         ordered_json{{"values", ordered_json::array({2 * m + n - 1, m})},
                      {"multiplicities",
                       ordered_json::array({top_mult, numeric.eigenvalues.size() - top_mult})}}},
        {"lambda_max", numeric.lambda_max},
        {"lambda_prime_max", numeric.lambda_max * scale},
        {"fidelity_from_lambda", numeric.fidelity_from_lambda},
        {"fmax", fmax},
        {"fmax_rational", qcm::fmax_rational(n, m).str()},
        {"max_deviation", deviation}};
    ordered_json inputs{{"n_levels", n}, {"n_copies", m}};
    common.stamp(inputs);
    return finish(envelope("spectrum", std::move(inputs), std::move(results), tol, pass,
                           common.seed),
                  emit, text.str());
}

// ----------------------------------------------------------------- moments

int run_moments(int n, std::int64_t samples, int workers, const std::string& pattern_str,
                const CommonOptions& common) {
    const Emit emit = parse_emit(common.emit_str);
    if (emit == Emit::csv)
        throw CLI::ValidationError("--emit", "csv is restricted to fidelity tables");
    if (n < 1) throw CLI::ValidationError("moments", "--n must be >= 1");
    if (samples < 2) throw CLI::ValidationError("moments", "--samples must be >= 2");
    if (workers < 1) throw CLI::ValidationError("moments", "--workers must be >= 1");

    // Patterns are 1-based on the command line, 0-based in the library.
    std::vector<std::array<int, 4>> patterns;
    if (!pattern_str.empty()) {
        std::array<int, 4> p{};
        std::stringstream ss(pattern_str);
        std::string item;
        int count = 0;
        while (std::getline(ss, item, ',')) {
            if (count >= 4) throw CLI::ValidationError("--pattern", "expected four indices");
            try {
                p[static_cast<std::size_t>(count)] = std::stoi(item);
            } catch (const std::exception&) {
                throw CLI::ValidationError("--pattern", "indices must be integers");
            }
            ++count;
        }
        if (count != 4) throw CLI::ValidationError("--pattern", "expected four indices");
        for (int idx : p)
            if (idx < 1 || idx > n)
                throw CLI::ValidationError("--pattern", "indices must lie in 1..N");
        patterns.push_back(p);
    } else {
        patterns.push_back({1, 1, 1, 1});
        if (n >= 2) {
            patterns.push_back({1, 1, 2, 2});
            patterns.push_back({1, 2, 2, 1});
            patterns.push_back({1, 2, 2, 2});
        }
        if (n >= 3) patterns.push_back({1, 2, 1, 3});
    }

    bool pass = true;
    ordered_json rows = ordered_json::array();
    std::ostringstream text;
    for (const auto& p : patterns) {
        const qcm::MomentPattern mp{p[0] - 1, p[1] - 1, p[2] - 1, p[3] - 1};
        const qcm::Rational exact = qcm::fourth_moment_exact_rational(n, mp);
        const qcm::MomentEstimate est =
            qcm::estimate_fourth_moment(n, mp, samples, common.seed, workers);
        const double deviation = std::abs(est.mean - qcm::Complex(exact.value(), 0.0));
        const double sigmas = est.standard_error > 0.0 ? deviation / est.standard_error : 0.0;
        const bool ok = deviation <= 3.0 * est.standard_error;
        pass = pass && ok;
        rows.push_back(ordered_json{{"pattern", p},
                                    {"exact", exact.value()},
                                    {"exact_rational", exact.str()},
                                    {"estimate", complex_pair(est.mean)},
                                    {"std_error", est.standard_error},
                                    {"deviation_sigmas", sigmas},
                                    {"pass", ok}});
        text << (ok ? "pass " : "FAIL ") << "(" << p[0] << "," << p[1] << "," << p[2] << ","
             << p[3] << ") exact=" << exact.str() << " estimate=" << est.mean.real()
             << (est.mean.imag() < 0 ? "-" : "+") << std::abs(est.mean.imag())
             << "i se=" << est.standard_error << "\n";
    }
    text << (pass ? "PASS" : "FAIL") << "\n";

    ordered_json inputs{{"n_levels", n}, {"samples", samples}, {"workers", workers}};
    if (!pattern_str.empty()) inputs["pattern"] = pattern_str;
    common.stamp(inputs);
    ordered_json results{{"moments", std::move(rows)}};
    return finish(envelope("moments", std::move(inputs), std::move(results), 3.0, pass,
                           common.seed),
                  emit, text.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal universal cloning of N-level quantum systems"};
    app.require_subcommand(1);

    CommonOptions fid_common, ver_common, clone_common, spec_common, mom_common;

    int fid_n = 0, fid_nprime = 1, fid_m = 0, fid_nmax = 0, fid_mmax = 0;
    double fid_tol = 1e-12;
    CLI::App* fid = app.add_subcommand("fidelity", "Analytic and machine cloning fidelities");
    fid->add_option("--n", fid_n, "Number of levels N");
    fid->add_option("--nprime", fid_nprime, "Number of identical inputs N'")->default_str("1");
    fid->add_option("--m", fid_m, "Number of copies M");
    fid->add_option("--n-max", fid_nmax, "Table mode: rows N = 1..n-max");
    fid->add_option("--m-max", fid_mmax, "Table mode: columns M = 1..m-max");
    fid->add_option("--tol", fid_tol, "Agreement tolerance")->default_str("1e-12");
    fid_common.attach(fid);

    int ver_nmax = 4, ver_mmax = 5, ver_npmax = 3, ver_states = 200, ver_draws = 100;
    double ver_tol = 1e-10;
    CLI::App* ver = app.add_subcommand("verify", "Run the verification suite over a grid");
    ver->add_option("--n-max", ver_nmax, "Largest N (grid starts at 2)")->default_str("4");
    ver->add_option("--m-max", ver_mmax, "Largest M")->default_str("5");
    ver->add_option("--nprime-max", ver_npmax, "Largest N'")->default_str("3");
    ver->add_option("--tol", ver_tol, "Tolerance for every check")->default_str("1e-10");
    ver->add_option("--states", ver_states, "Random inputs per universality check")
        ->default_str("200");
    ver->add_option("--draws", ver_draws, "Random machines per bound check")->default_str("100");
    ver_common.attach(ver);

    std::string clone_state_path;
    int clone_n = 0, clone_m = 0;
    bool clone_renorm = false;
    double clone_tol = 1e-10;
    CLI::App* cln = app.add_subcommand("clone", "Clone a pure state from a JSON state file");
    cln->add_option("--state", clone_state_path, "JSON array of [re, im] amplitude pairs")
        ->required();
    cln->add_option("--n", clone_n, "Expected number of levels (checked against the file)");
    cln->add_option("--m", clone_m, "Number of copies M")->required();
    cln->add_flag("--renormalize", clone_renorm, "Accept and renormalize unnormalized input");
    cln->add_option("--tol", clone_tol, "Agreement tolerance")->default_str("1e-10");
    clone_common.attach(cln);

    int spec_n = 0, spec_m = 0;
    double spec_tol = 1e-10;
    CLI::App* spc = app.add_subcommand("spectrum", "Moment-matrix spectrum vs closed form");
    spc->add_option("--n", spec_n, "Number of levels N")->required();
    spc->add_option("--m", spec_m, "Number of copies M")->required();
    spc->add_option("--tol", spec_tol, "Deviation tolerance")->default_str("1e-10");
    spec_common.attach(spc);

    int mom_n = 0, mom_workers = 1;
    std::int64_t mom_samples = 100000;
    std::string mom_pattern;
    CLI::App* mom = app.add_subcommand("moments", "Monte Carlo check of the moment table");
    mom->add_option("--n", mom_n, "Number of levels N")->required();
    mom->add_option("--samples", mom_samples, "Sample count")->default_str("100000");
    mom->add_option("--workers", mom_workers, "Worker streams")->default_str("1");
    mom->add_option("--pattern", mom_pattern, "Moment indices j',i',i,j (1-based, comma separated)");
    mom_common.attach(mom);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(fid))
            return run_fidelity(fid_n, fid_nprime, fid_m, fid_nmax, fid_mmax, fid_tol,
                                fid_common);
        if (app.got_subcommand(ver))
            return run_verify(ver_nmax, ver_mmax, ver_npmax, ver_tol, ver_states, ver_draws,
                              ver_common);
        if (app.got_subcommand(cln))
            return run_clone(clone_state_path, clone_n, clone_m, clone_renorm, clone_tol,
                             clone_common);
        if (app.got_subcommand(spc)) return run_spectrum(spec_n, spec_m, spec_tol, spec_common);
        if (app.got_subcommand(mom))
            return run_moments(mom_n, mom_samples, mom_workers, mom_pattern, mom_common);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

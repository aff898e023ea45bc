// pipeline.cpp — Analysis orchestration and report formatting

#include "qasym/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace qasym {

namespace {

class StageTimer {
public:
    explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}

    template <typename F>
    auto run(const std::string& name, F&& f) {
        const auto start = std::chrono::steady_clock::now();
        auto result = f();
        const auto stop = std::chrono::steady_clock::now();
        sink_[name] =
            std::chrono::duration<double, std::milli>(stop - start).count();
        return result;
    }

private:
    std::map<std::string, double>& sink_;
};

} // namespace

Analysis analyze(const Channel& phi, const AnalysisOptions& opts) {
    opts.tol.validate();
    Analysis a;
    StageTimer timer(a.timings_ms);

    a.validation = timer.run("validate", [&] { return validate(phi, opts.tol); });
    if (!a.validation.ok()) {
        throw Error("analyze: channel failed CPTP validation (tp defect " +
                    std::to_string(a.validation.tp_defect) + ", min choi eig " +
                    std::to_string(a.validation.min_choi_eig) + ")");
    }

    a.spectral = timer.run("spectrum", [&] { return spectrum(phi, opts.tol); });
    a.reduction = timer.run("reduce", [&] { return reduce(phi, a.spectral, opts.tol); });
    a.reduced_spectral = timer.run("reduced_spectrum", [&] {
        return spectrum(a.reduction.reduced, opts.tol);
    });
    a.reduced_attractor = attractor_basis(a.reduced_spectral);

    a.adjoint_algebra = timer.run("adjoint_algebra", [&] {
        return adjoint_attractor_algebra(a.reduction.reduced, opts.tol);
    });
    const BlockDecomposition skeleton = timer.run("decompose", [&] {
        return decompose_algebra(a.adjoint_algebra, opts.seed, opts.tol);
    });
    a.decomposition = timer.run("extract_rho", [&] {
        return extract_rho(a.reduction.reduced, skeleton, a.reduced_spectral, opts.tol);
    });
    a.action = timer.run("extract_action", [&] {
        return extract_action(a.reduction.reduced, a.decomposition, opts.tol);
    });

    // Report-level consistency: the attractor dimension counted via the
    // peripheral multiplicity must equal Σ d_k².
    Eigen::Index dim_attr = 0;
    for (const Block& b : a.decomposition.blocks) dim_attr += b.d * b.d;
    if (dim_attr != static_cast<Eigen::Index>(a.spectral.peripheral_indices.size()) ||
        dim_attr !=
            static_cast<Eigen::Index>(a.reduced_spectral.peripheral_indices.size())) {
        throw Error("analyze: Σ d_k² disagrees with the peripheral multiplicity");
    }

    a.certificate = timer.run("certify", [&] {
        return certify_unitary(a.decomposition, a.action, opts.tol);
    });
    a.idempotent = is_idempotent(phi, opts.tol);
    a.markov = timer.run("markov", [&] {
        return markov_principal_branch_test(phi, opts.tol);
    });
    if (a.markov.verdict == MarkovVerdict::markovian && a.markov.generator) {
        const Matrix& S = phi.superop();
        a.generator_roundtrip_error =
            (expm(*a.markov.generator) - S).norm() / std::max(1.0, S.norm());
    }

    auto fixed = timer.run("fixed_state", [&] {
        return build_fixed_state(a.decomposition, a.action, opts.tol);
    });
    a.cycles = std::move(fixed.cycles);
    a.modular = std::move(fixed.modular);
    a.cycle_power = timer.run("cycle_power", [&] {
        return verify_cycle_power(a.reduction.reduced, a.decomposition, a.action,
                                  a.modular, opts.tol);
    });

    const Matrix S_rec = reconstruct_peripheral(a.decomposition, a.action);
    double rec_res = 0.0;
    for (const Matrix& X : a.reduced_attractor.elements) {
        const Matrix lhs = a.reduction.reduced.apply(X);
        const Matrix rhs = unvec(S_rec * vec(X), a.reduction.d0, a.reduction.d0);
        rec_res = std::max(rec_res, (lhs - rhs).norm() / X.norm());
    }
    a.reconstruction_residual = rec_res;
    return a;
}

std::string pi_cycle_notation(const PeripheralAction& A) {
    const auto M = static_cast<Eigen::Index>(A.pi.size());
    std::vector<bool> seen(static_cast<std::size_t>(M), false);
    std::ostringstream out;
    for (Eigen::Index start = 0; start < M; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        out << "(";
        Eigen::Index k = start;
        bool first = true;
        do {
            seen[static_cast<std::size_t>(k)] = true;
            out << (first ? "" : " ") << k;
            first = false;
            k = A.pi[static_cast<std::size_t>(k)];
        } while (k != start);
        out << ")";
    }
    return out.str();
}

namespace {

Json complex_list(const Vector& v) {
    Json list = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        list.push_back({v(i).real(), v(i).imag()});
    }
    return list;
}

Json real_list_ascending(const Matrix& H) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(H));
    Json list = Json::array();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        list.push_back(es.eigenvalues()(i));
    }
    return list;
}

const char* verdict_name(MarkovVerdict v) {
    switch (v) {
        case MarkovVerdict::markovian: return "markovian";
        case MarkovVerdict::not_principal_branch: return "not_principal_branch";
        case MarkovVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

} // namespace

Json analysis_to_json(const Analysis& a) {
    Json j;
    j["validation"] = {{"cp", a.validation.cp},
                       {"tp", a.validation.tp},
                       {"min_choi_eig", a.validation.min_choi_eig},
                       {"tp_defect", a.validation.tp_defect}};

    Json peripheral = Json::array();
    for (Eigen::Index idx : a.spectral.peripheral_indices) {
        peripheral.push_back(
            {a.spectral.eigenvalues(idx).real(), a.spectral.eigenvalues(idx).imag()});
    }
    j["spectrum"] = {{"eigenvalues", complex_list(a.spectral.eigenvalues)},
                     {"peripheral", peripheral},
                     {"peripheral_count", a.spectral.peripheral_indices.size()},
                     {"subperipheral_radius", a.spectral.subperipheral_radius},
                     {"gram_condition", a.spectral.gram_condition}};

    j["reduction"] = {{"d0", a.reduction.d0}, {"faithful", a.reduction.faithful}};

    Json blocks = Json::array();
    for (const Block& b : a.decomposition.blocks) {
        blocks.push_back(
            {{"d", b.d}, {"m", b.m}, {"rho_spectrum", real_list_ascending(b.rho)}});
    }
    j["decomposition"] = {{"M", a.decomposition.M()}, {"blocks", blocks}};

    Json us = Json::array();
    for (const Matrix& U : a.action.U) {
        us.push_back(matrix_to_json(U));
    }
    j["action"] = {{"pi", a.action.pi},
                   {"cycles", pi_cycle_notation(a.action)},
                   {"U", us}};

    Json violations = Json::array();
    for (const UnitarityViolation& v : a.certificate.violations) {
        violations.push_back(
            {{"block", v.block},
             {"reason", v.reason == UnitarityViolation::Reason::multiplicity_mismatch
                            ? "multiplicity_mismatch"
                            : "spectrum_mismatch"},
             {"detail", v.detail}});
    }
    j["unitarity"] = {{"unitary", a.certificate.unitary},
                      {"witness_residual", a.certificate.witness_residual},
                      {"violations", violations}};
    if (a.certificate.unitary) {
        j["unitarity"]["witness"] = matrix_to_json(a.certificate.witness);
    }

    j["sufficient_conditions"] = {{"idempotent", a.idempotent},
                     {"markov_verdict", verdict_name(a.markov.verdict)},
                     {"markov_detail", a.markov.detail}};
    if (a.generator_roundtrip_error >= 0) {
        j["sufficient_conditions"]["generator_roundtrip_error"] = a.generator_roundtrip_error;
    }

    j["modular"] = {{"M_lcm", a.modular.M_lcm},
                    {"cycle_power_residual", a.cycle_power.max_residual},
                    {"matches", a.cycle_power.matches},
                    {"one_step_residual", a.cycle_power.one_step_residual},
                    {"sigma_spectrum", real_list_ascending(a.modular.sigma)}};

    j["reconstruction_residual"] = a.reconstruction_residual;
    j["timings_ms"] = a.timings_ms;
    return j;
}

std::string analysis_to_text(const Analysis& a) {
    std::ostringstream out;
    out << "validation: cp=" << (a.validation.cp ? "yes" : "no")
        << " tp=" << (a.validation.tp ? "yes" : "no")
        << " (min choi eig " << a.validation.min_choi_eig << ", tp defect "
        << a.validation.tp_defect << ")\n";
    out << "spectrum: " << a.spectral.eigenvalues.size() << " eigenvalues, "
        << a.spectral.peripheral_indices.size() << " peripheral, subperipheral radius "
        << a.spectral.subperipheral_radius << "\n";
    if (a.spectral.gram_condition > 1e6) {
        out << "warning: peripheral biorthogonalization is ill-conditioned "
               "(gram condition "
            << a.spectral.gram_condition << ")\n";
    }
    out << "reduction: d0=" << a.reduction.d0
        << (a.reduction.faithful ? " (faithful)" : " (non-faithful)") << "\n";
    out << "decomposition: M=" << a.decomposition.M();
    for (const Block& b : a.decomposition.blocks) {
        out << "  [d=" << b.d << " m=" << b.m << "]";
    }
    out << "\n";
    out << "action: pi = " << pi_cycle_notation(a.action) << "\n";
    out << "unitarity: " << (a.certificate.unitary ? "unitary" : "not unitary");
    for (const UnitarityViolation& v : a.certificate.violations) {
        out << "  [block " << v.block << ": "
            << (v.reason == UnitarityViolation::Reason::multiplicity_mismatch
                    ? "multiplicity_mismatch"
                    : "spectrum_mismatch")
            << ", " << v.detail << "]";
    }
    out << "\n";
    out << "sufficient conditions: idempotent=" << (a.idempotent ? "yes" : "no")
        << ", markov=" << verdict_name(a.markov.verdict);
    if (a.generator_roundtrip_error >= 0) {
        out << " (generator roundtrip error " << a.generator_roundtrip_error << ")";
    }
    out << "\n";
    out << "modular: M_lcm=" << a.modular.M_lcm << ", cycle power residual "
        << a.cycle_power.max_residual << " ("
        << (a.cycle_power.matches ? "matches" : "MISMATCH") << ")\n";
    out << "reconstruction residual: " << a.reconstruction_residual << "\n";
    return out.str();
}

} // namespace qasym

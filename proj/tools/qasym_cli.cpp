// qasym_cli.cpp — channel ingestion, analysis pipeline, synthesis, trajectories
//
// Exit codes: 0 success, 1 parse error, 2 validation/spec failure, 3 pipeline
// failure. Reports go to stdout, diagnostics to stderr.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "qasym/io.hpp"
#include "qasym/pipeline.hpp"

namespace {

using namespace qasym;

struct CommonOpts {
    double tol_recon = Tolerances{}.recon;
    std::uint64_t seed = 0;
};

AnalysisOptions make_options(const CommonOpts& c) {
    AnalysisOptions opts;
    opts.tol.recon = c.tol_recon;
    opts.seed = c.seed;
    return opts;
}

int run_analyze(const std::string& input, const CommonOpts& common,
                const std::string& format) {
    const Channel phi = channel_from_json(load_json_file(input));
    const AnalysisOptions opts = make_options(common);

    const ValidationReport vrep = validate(phi, opts.tol);
    if (!vrep.ok()) {
        Json j;
        j["validation"] = {{"cp", vrep.cp},
                           {"tp", vrep.tp},
                           {"min_choi_eig", vrep.min_choi_eig},
                           {"tp_defect", vrep.tp_defect}};
        std::cout << j.dump(2) << "\n";
        std::cerr << "error: input is not a CPTP map at tolerance\n";
        return 2;
    }

    const Analysis a = analyze(phi, opts);
    if (format == "json") {
        std::cout << analysis_to_json(a).dump(2) << "\n";
    } else {
        std::cout << analysis_to_text(a);
    }
    return 0;
}

int run_synthesize(const std::string& spec_path, const std::string& out_path,
                   Eigen::Index dim, const CommonOpts& common) {
    const Json spec = load_json_file(spec_path);
    auto [D, A] = decomposition_from_json(spec);
    Eigen::Index total = dim;
    if (total <= 0) {
        total = 0;
        for (const Block& b : D.blocks) total += b.d * b.m;
        if (!D.blocks.empty() && D.blocks.front().W.size() > 0) {
            total = D.blocks.front().W.rows();
        }
    }
    const AnalysisOptions opts = make_options(common);
    const Channel phi = synthesize_extension(D, A, total, opts.tol);
    save_json_file(out_path, channel_to_json(phi, "superop"));
    std::cerr << "wrote channel of dimension " << total << " to " << out_path << "\n";
    return 0;
}

int run_evolve(const std::string& input, const std::string& state_path, long steps,
               const std::string& out_path, const CommonOpts& common) {
    const Channel phi = channel_from_json(load_json_file(input));
    const AnalysisOptions opts = make_options(common);

    Matrix rho0;
    if (state_path.empty()) {
        rho0 = Matrix::Identity(phi.dim(), phi.dim()) /
               static_cast<double>(phi.dim());
    } else {
        rho0 = state_from_json(load_json_file(state_path));
    }

    const ValidationReport vrep = validate(phi, opts.tol);
    if (!vrep.ok()) {
        std::cerr << "error: input is not a CPTP map at tolerance\n";
        return 2;
    }
    const Analysis a = analyze(phi, opts);
    const auto traj = trajectory(phi, rho0, steps, opts.tol);

    // Phase-averaged asymptotic image: the lambda = 1 component of rho0.
    const Matrix asym = unvec(a.spectral.fixed_projector * vec(rho0), phi.dim(),
                              phi.dim());

    std::ostringstream csv;
    csv << "n,dist_asym,w_perp";
    for (Eigen::Index k = 0; k < a.decomposition.M(); ++k) {
        csv << ",w_block" << k;
    }
    csv << "\n";
    const Matrix Qperp =
        Matrix::Identity(phi.dim(), phi.dim()) - a.reduction.Q;
    for (std::size_t n = 0; n < traj.size(); ++n) {
        // Trace distance via the eigenvalues of the Hermitian difference.
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(traj[n] - asym));
        const double dist = 0.5 * es.eigenvalues().cwiseAbs().sum();
        csv << n << "," << dist << ","
            << (Qperp * traj[n]).trace().real();
        for (const Block& b : a.decomposition.blocks) {
            const Matrix Qk = a.reduction.V * b.W * b.W.adjoint() *
                              a.reduction.V.adjoint();
            csv << "," << (Qk * traj[n]).trace().real();
        }
        csv << "\n";
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) {
            throw Error("cannot write file: " + out_path);
        }
        out << csv.str();
        std::cerr << "wrote trajectory table to " << out_path << "\n";
    }
    return 0;
}

int run_random(Eigen::Index dim, Eigen::Index rank, std::uint64_t seed,
               const std::string& out_path) {
    const Channel phi = random_channel(dim, rank, seed);
    save_json_file(out_path, channel_to_json(phi, "kraus"));
    std::cerr << "wrote random channel (dim " << dim << ", rank " << rank
              << ", seed " << seed << ") to " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic (peripheral) structure of quantum channels"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string input, output, state_path, format = "text";
    Eigen::Index dim = 0, rank = 1;
    long steps = 20;

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "Analyze a channel file");
    analyze_cmd->add_option("input", input, "channel JSON file")->required();
    analyze_cmd->add_option("--tol", common.tol_recon,
                            "reconstruction/verification tolerance");
    analyze_cmd->add_option("--seed", common.seed, "seed for randomized splitting");
    analyze_cmd->add_option("--format", format, "report format: json|text")
        ->check(CLI::IsMember({"json", "text"}));

    CLI::App* synth_cmd =
        app.add_subcommand("synthesize", "Build a channel from a decomposition spec");
    synth_cmd->add_option("spec", input, "decomposition JSON file")->required();
    synth_cmd->add_option("output", output, "output channel file")->required();
    synth_cmd->add_option("--dim", dim, "total dimension (default: fit blocks)");
    synth_cmd->add_option("--tol", common.tol_recon, "verification tolerance");

    CLI::App* evolve_cmd = app.add_subcommand("evolve", "Iterate a state and tabulate");
    evolve_cmd->add_option("input", input, "channel JSON file")->required();
    evolve_cmd->add_option("--state", state_path,
                           "initial state JSON (default maximally mixed)");
    evolve_cmd->add_option("--steps", steps, "number of steps");
    evolve_cmd->add_option("--out", output, "CSV output path (default stdout)");
    evolve_cmd->add_option("--seed", common.seed, "seed for randomized splitting");
    evolve_cmd->add_option("--tol", common.tol_recon, "verification tolerance");

    CLI::App* random_cmd = app.add_subcommand("random", "Sample a random channel");
    random_cmd->add_option("output", output, "output channel file")->required();
    random_cmd->add_option("--dim", dim, "Hilbert-space dimension")->required();
    random_cmd->add_option("--rank", rank, "Kraus rank");
    random_cmd->add_option("--seed", common.seed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze_cmd)) {
            return run_analyze(input, common, format);
        }
        if (app.got_subcommand(synth_cmd)) {
            return run_synthesize(input, output, dim, common);
        }
        if (app.got_subcommand(evolve_cmd)) {
            return run_evolve(input, state_path, steps, output, common);
        }
        if (app.got_subcommand(random_cmd)) {
            return run_random(dim, rank, common.seed, output);
        }
    } catch (const qasym::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const qasym::InvalidSpec& e) {
        std::cerr << "invalid spec: " << e.what() << "\n";
        return 2;
    } catch (const qasym::Error& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

// test_cli.cpp — Golden-file tests for the command-line interface
//
// Drives the built binary through std::system; checks exit codes, report
// schema, seed determinism, and the synthesize/evolve file formats.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "qasym/io.hpp"

using namespace qasym;
using namespace qasym::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(QASYM_TEST_WORKDIR);

int run(const std::string& args, const fs::path& out, const fs::path& err) {
    const std::string cmd = std::string(QASYM_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Paths {
    fs::path out, err;
};

Paths fresh(const std::string& stem) {
    fs::create_directories(kWork);
    return {kWork / (stem + ".out"), kWork / (stem + ".err")};
}

} // namespace

TEST_CASE("analyze: dephasing report fields and exit 0") {
    fs::create_directories(kWork);
    const fs::path channel = kWork / "dephasing.json";
    save_json_file(channel.string(), channel_to_json(dephasing_fixture(), "kraus"));

    auto [out, err] = fresh("deph");
    const int code = run("analyze " + channel.string() + " --format json", out, err);
    CHECK(code == 0);
    const Json j = Json::parse(slurp(out));
    CHECK(j["decomposition"]["M"] == 2);
    CHECK(j["action"]["cycles"] == "(0)(1)");
    CHECK(j["unitarity"]["unitary"] == true);
    CHECK(j["sufficient_conditions"]["idempotent"] == true);
}

TEST_CASE("analyze: amplitude damping reports d0 = 1") {
    const fs::path channel = kWork / "ad.json";
    save_json_file(channel.string(),
                   channel_to_json(amplitude_damping_fixture(0.5), "kraus"));
    auto [out, err] = fresh("ad");
    const int code = run("analyze " + channel.string() + " --format json", out, err);
    CHECK(code == 0);
    const Json j = Json::parse(slurp(out));
    CHECK(j["reduction"]["d0"] == 1);
    CHECK(j["reduction"]["faithful"] == false);
}

TEST_CASE("analyze: malformed JSON exits 1 with a position diagnostic") {
    const fs::path broken = kWork / "broken.json";
    std::ofstream(broken) << "{\"dim\": 2, \"representation\": ";
    auto [out, err] = fresh("broken");
    const int code = run("analyze " + broken.string(), out, err);
    CHECK(code == 1);
    const std::string diag = slurp(err);
    CHECK(diag.find("parse error") != std::string::npos);
    // The parser reports the failure position as line/column.
    CHECK(diag.find("line") != std::string::npos);
    CHECK(diag.find("column") != std::string::npos);
}

TEST_CASE("analyze: non-CPTP input exits 2") {
    const Channel bad = Channel::from_kraus({Matrix::Identity(2, 2), pauli_x()});
    const fs::path channel = kWork / "bad.json";
    save_json_file(channel.string(), channel_to_json(bad, "kraus"));
    auto [out, err] = fresh("bad");
    const int code = run("analyze " + channel.string(), out, err);
    CHECK(code == 2);
    const Json j = Json::parse(slurp(out));
    CHECK(j["validation"]["tp"] == false);
}

TEST_CASE("random: seed determinism, byte for byte") {
    auto [out, err] = fresh("rand");
    const fs::path a = kWork / "rand_a.json";
    const fs::path b = kWork / "rand_b.json";
    const fs::path c = kWork / "rand_c.json";
    CHECK(run("random " + a.string() + " --dim 3 --rank 4 --seed 11", out, err) == 0);
    CHECK(run("random " + b.string() + " --dim 3 --rank 4 --seed 11", out, err) == 0);
    CHECK(run("random " + c.string() + " --dim 3 --rank 4 --seed 12", out, err) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));

    // dims 2/3/4 smoke: outputs validate and analyze cleanly.
    for (int d : {2, 3, 4}) {
        const fs::path p = kWork / ("rand_d" + std::to_string(d) + ".json");
        CHECK(run("random " + p.string() + " --dim " + std::to_string(d) +
                      " --rank " + std::to_string(d) + " --seed 3",
                  out, err) == 0);
        CHECK(run("analyze " + p.string(), out, err) == 0);
    }
}

TEST_CASE("synthesize: two-cycle spec round-trips through files") {
    BlockDecomposition D;
    D.d0 = 3;
    D.blocks.push_back(Block{1, 1, Matrix(), Matrix::Identity(1, 1)});
    D.blocks.push_back(Block{1, 2, Matrix(), 0.5 * Matrix::Identity(2, 2)});
    PeripheralAction A;
    A.pi = {1, 0};
    A.U = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    const fs::path spec = kWork / "spec.json";
    save_json_file(spec.string(), decomposition_to_json(D, A));

    const fs::path synth = kWork / "synth.json";
    auto [out, err] = fresh("synth");
    CHECK(run("synthesize " + spec.string() + " " + synth.string() + " --dim 3", out,
              err) == 0);

    const int code =
        run("analyze " + synth.string() + " --format json", out, err);
    CHECK(code == 0);
    const Json j = Json::parse(slurp(out));
    CHECK(j["decomposition"]["M"] == 2);
    CHECK(j["action"]["cycles"] == "(0 1)");
    CHECK(j["unitarity"]["unitary"] == false);
    CHECK(j["unitarity"]["violations"][0]["reason"] == "multiplicity_mismatch");
    CHECK(j["modular"]["M_lcm"] == 2);

    // Invalid spec exits 2.
    Json broken_spec = decomposition_to_json(D, A);
    broken_spec["pi"] = {0, 0};
    const fs::path bad_spec = kWork / "bad_spec.json";
    save_json_file(bad_spec.string(), broken_spec);
    CHECK(run("synthesize " + bad_spec.string() + " " + (kWork / "x.json").string(),
              out, err) == 2);
}

TEST_CASE("evolve: depolarizing distance halves each step") {
    const fs::path channel = kWork / "dep.json";
    save_json_file(channel.string(),
                   channel_to_json(depolarizing_fixture(0.5), "kraus"));
    const fs::path state = kWork / "state.json";
    save_json_file(state.string(), state_to_json(mat2(1, 0, 0, 0)));

    const fs::path csv = kWork / "traj.csv";
    auto [out, err] = fresh("evolve");
    CHECK(run("evolve " + channel.string() + " --state " + state.string() +
                  " --steps 8 --out " + csv.string(),
              out, err) == 0);

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,dist_asym,w_perp,w_block0");
    std::vector<double> dist;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');  // n
        std::getline(ss, field, ',');  // dist
        dist.push_back(std::stod(field));
    }
    REQUIRE(dist.size() == 9);
    for (std::size_t n = 1; n < dist.size(); ++n) {
        CHECK(dist[n] == doctest::Approx(0.5 * dist[n - 1]).epsilon(1e-6));
    }
}

TEST_CASE("evolve: two-cycle block weights oscillate with period 2") {
    const fs::path channel = kWork / "swap.json";
    save_json_file(channel.string(), channel_to_json(swap_block_fixture(), "kraus"));
    const fs::path state = kWork / "swap_state.json";
    save_json_file(state.string(), state_to_json(mat2(0.8, 0, 0, 0.2)));

    auto [out, err] = fresh("swap_traj");
    CHECK(run("evolve " + channel.string() + " --state " + state.string() +
                  " --steps 5",
              out, err) == 0);
    std::stringstream ss(slurp(out));
    std::string header;
    std::getline(ss, header);
    CHECK(header == "n,dist_asym,w_perp,w_block0,w_block1");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
        rows.push_back(row);
    }
    REQUIRE(rows.size() == 6);
    for (std::size_t n = 0; n + 2 < rows.size(); ++n) {
        CHECK(rows[n][3] == doctest::Approx(rows[n + 2][3]));
        CHECK(rows[n][3] != doctest::Approx(rows[n + 1][3]).epsilon(1e-3));
    }
}

TEST_CASE("identity channel: constant evolve columns") {
    const fs::path channel = kWork / "id.json";
    save_json_file(channel.string(), channel_to_json(Channel::identity(2), "superop"));
    auto [out, err] = fresh("id_traj");
    CHECK(run("evolve " + channel.string() + " --steps 3", out, err) == 0);
    std::stringstream ss(slurp(out));
    std::string header, first, line;
    std::getline(ss, header);
    std::getline(ss, first);
    // All data rows equal except the leading step index.
    std::size_t row_index = 1;
    while (std::getline(ss, line)) {
        CHECK(line.substr(line.find(',')) == first.substr(first.find(',')));
        ++row_index;
    }
    CHECK(row_index == 4);
}

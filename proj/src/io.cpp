// io.cpp — JSON readers/writers for the interchange formats

#include "qasym/io.hpp"

#include <cmath>
#include <fstream>

namespace qasym {

Json matrix_to_json(const Matrix& A) {
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        for (Eigen::Index c = 0; c < A.cols(); ++c) {
            entries.push_back({A(r, c).real(), A(r, c).imag()});
        }
    }
    return entries;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols) {
        throw ParseError("matrix entry list has wrong length (expected " +
                         std::to_string(rows * cols) + ")");
    }
    Matrix A(rows, cols);
    Eigen::Index t = 0;
    for (const Json& e : j) {
        if (!e.is_array() || e.size() != 2) {
            throw ParseError("matrix entries must be [re, im] pairs");
        }
        A(t / cols, t % cols) = Complex(e[0].get<double>(), e[1].get<double>());
        ++t;
    }
    return A;
}

Json channel_to_json(const Channel& phi, const std::string& representation) {
    Json j;
    j["dim"] = phi.dim();
    j["representation"] = representation;
    Json mats = Json::array();
    if (representation == "kraus") {
        for (const Matrix& K : phi.kraus()) {
            mats.push_back(matrix_to_json(K));
        }
    } else if (representation == "choi") {
        mats.push_back(matrix_to_json(phi.choi()));
    } else if (representation == "superop") {
        mats.push_back(matrix_to_json(phi.superop()));
    } else {
        throw Error("channel_to_json: unknown representation " + representation);
    }
    j["matrices"] = std::move(mats);
    return j;
}

Channel channel_from_json(const Json& j) {
    try {
        const auto d = j.at("dim").get<Eigen::Index>();
        if (d < 1) {
            throw ParseError("channel dim must be positive");
        }
        const auto rep = j.at("representation").get<std::string>();
        const Json& mats = j.at("matrices");
        if (!mats.is_array() || mats.empty()) {
            throw ParseError("channel needs a nonempty matrices list");
        }
        if (rep == "kraus") {
            std::vector<Matrix> kraus;
            for (const Json& m : mats) {
                kraus.push_back(matrix_from_json(m, d, d));
            }
            return Channel::from_kraus(std::move(kraus));
        }
        if (rep == "choi") {
            return Channel::from_choi(matrix_from_json(mats.at(0), d * d, d * d));
        }
        if (rep == "superop") {
            return Channel::from_superop(matrix_from_json(mats.at(0), d * d, d * d));
        }
        throw ParseError("unknown channel representation: " + rep);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("channel JSON: ") + e.what());
    }
}

Json state_to_json(const Matrix& rho) {
    Json j;
    j["dim"] = rho.rows();
    j["matrix"] = matrix_to_json(rho);
    return j;
}

Matrix state_from_json(const Json& j) {
    try {
        const auto d = j.at("dim").get<Eigen::Index>();
        return matrix_from_json(j.at("matrix"), d, d);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("state JSON: ") + e.what());
    }
}

Json decomposition_to_json(const BlockDecomposition& D, const PeripheralAction& A) {
    Json j;
    j["M"] = D.M();
    Json blocks = Json::array();
    for (const Block& b : D.blocks) {
        Json jb;
        jb["d"] = b.d;
        jb["m"] = b.m;
        if (b.W.size() > 0) {
            jb["W"] = matrix_to_json(b.W);
        }
        jb["rho"] = matrix_to_json(b.rho);
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    j["pi"] = A.pi;
    Json us = Json::array();
    for (const Matrix& U : A.U) {
        us.push_back(matrix_to_json(U));
    }
    j["U"] = std::move(us);
    return j;
}

std::pair<BlockDecomposition, PeripheralAction> decomposition_from_json(const Json& j) {
    try {
        BlockDecomposition D;
        PeripheralAction A;
        const Json& blocks = j.at("blocks");
        if (!blocks.is_array() || blocks.empty()) {
            throw ParseError("decomposition needs a nonempty blocks list");
        }
        if (j.contains("M") &&
            j.at("M").get<Eigen::Index>() != static_cast<Eigen::Index>(blocks.size())) {
            throw ParseError("decomposition M does not match blocks length");
        }
        Eigen::Index d0 = 0;
        Eigen::Index wrows = -1;
        for (const Json& jb : blocks) {
            Block b;
            b.d = jb.at("d").get<Eigen::Index>();
            b.m = jb.at("m").get<Eigen::Index>();
            if (b.d < 1 || b.m < 1) {
                throw ParseError("block dimensions must be positive");
            }
            b.rho = matrix_from_json(jb.at("rho"), b.m, b.m);
            if (jb.contains("W") && !jb.at("W").is_null()) {
                const auto entries = static_cast<Eigen::Index>(jb.at("W").size());
                if (entries % (b.d * b.m) != 0) {
                    throw ParseError("block W entry count is not a multiple of d*m");
                }
                const Eigen::Index rows = entries / (b.d * b.m);
                if (wrows >= 0 && rows != wrows) {
                    throw ParseError("block W row counts disagree");
                }
                wrows = rows;
                b.W = matrix_from_json(jb.at("W"), rows, b.d * b.m);
            }
            d0 += b.d * b.m;
            D.blocks.push_back(std::move(b));
        }
        D.d0 = (wrows >= 0) ? wrows : d0;

        A.pi = j.at("pi").get<std::vector<Eigen::Index>>();
        for (const Json& ju : j.at("U")) {
            const auto entries = static_cast<Eigen::Index>(ju.size());
            const auto d = static_cast<Eigen::Index>(std::llround(
                std::sqrt(static_cast<double>(entries))));
            if (d * d != entries) {
                throw ParseError("U entry count is not a perfect square");
            }
            A.U.push_back(matrix_from_json(ju, d, d));
        }
        if (A.pi.size() != D.blocks.size() || A.U.size() != D.blocks.size()) {
            throw ParseError("pi/U lengths do not match block count");
        }
        return {std::move(D), std::move(A)};
    } catch (const Json::exception& e) {
        throw ParseError(std::string("decomposition JSON: ") + e.what());
    }
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("JSON parse failure in ") + path + ": " + e.what());
    }
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write file: " + path);
    }
    out << j.dump(2) << "\n";
}

} // namespace qasym

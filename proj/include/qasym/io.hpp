// io.hpp — JSON interchange: channel files, decomposition/synthesis specs, states
//
// Matrix encoding: a flat row-major list of [re, im] pairs, read as 64-bit
// floats. Channel files: {"dim": d, "representation": "kraus"|"choi"|"superop",
// "matrices": [...]}. Decomposition files: {"M": .., "blocks": [{"d", "m",
// "W" (optional), "rho"}], "pi": [..] (0-based), "U": [..]}.

#pragma once

#include <string>
#include <utility>

#include "json.hpp"

#include "qasym/channel.hpp"
#include "qasym/structure.hpp"

namespace qasym {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& A);
Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols);

Json channel_to_json(const Channel& phi, const std::string& representation = "superop");
Channel channel_from_json(const Json& j);

Json state_to_json(const Matrix& rho);
Matrix state_from_json(const Json& j);

Json decomposition_to_json(const BlockDecomposition& D, const PeripheralAction& A);
std::pair<BlockDecomposition, PeripheralAction> decomposition_from_json(const Json& j);

// Throws ParseError (with the parser's byte position) on malformed input.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

} // namespace qasym

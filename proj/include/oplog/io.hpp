#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "oplog/applications.hpp"
#include "oplog/linops.hpp"

namespace oplog {

/// Insertion-ordered JSON keeps reports in schema order.
using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
/// Accepts [re, im] or a bare number.
Complex complex_from_json(const Json& j);

/// Parses "2", "-0.5", "1+2i", "3-4j", "i", "-2.5i". Throws InvalidInput.
Complex parse_complex(std::string_view text);

/// { "n": n, "entries": [[[re, im], ...], ...] } row-major.
Json matrix_to_json(const OperatorMatrix& m);
/// Throws InvalidInput on malformed, non-square or non-finite input.
OperatorMatrix matrix_from_json(const Json& j);
OperatorMatrix read_matrix_file(const std::filesystem::path& path);

/// { "n": n, "L": L, "values": [[re, im], ...] }
Json grid_to_json(const GridFunction& f);
GridFunction grid_from_json(const Json& j);

}  // namespace oplog

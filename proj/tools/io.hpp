#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "ripsel/ripsel.hpp"

namespace ripsel::cli {

using Json = nlohmann::ordered_json;

/// Parses CSV text: one row per line, comma-separated decimals, no header.
/// Errors name the offending line and column.
Matrix parse_matrix(std::string_view text);
DenseMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Matrix& m);
/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);
std::string format_matrix(const Matrix& m);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

Json certificate_to_json(const SelectionCertificate& cert);
SelectionCertificate certificate_from_json(const Json& j);

Json decomposition_to_json(const JohnDecomposition& d);
JohnDecomposition decomposition_from_json(const Json& j);

} // namespace ripsel::cli

#pragma once

// Private: nlohmann for parsing, an own writer so doubles keep 17 significant
// digits and files stay byte-stable.

#include <filesystem>
#include <string>

#include <json.hpp>

namespace bn6::detail {

using Json = nlohmann::ordered_json;

[[nodiscard]] std::string dump_json(const Json& j);
[[nodiscard]] Json read_json_file(const std::filesystem::path& p);
/// Writes `text` to `p` via a temporary file in the same directory.
void write_text_file(const std::filesystem::path& p, const std::string& text);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& p);

/// Doubles as JSON numbers; NaN and infinities become strings.
[[nodiscard]] Json real(double x);

}  // namespace bn6::detail

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace anchordoc {

using njson = nlohmann::ordered_json;

// File helpers; throw Error(Errc::Io) on filesystem failures and
// Error(Errc::Config) on unparseable JSON.
std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, std::string_view content);
njson read_json_file(const std::filesystem::path& file);
void write_json_file(const std::filesystem::path& file, const njson& value);

}  // namespace anchordoc

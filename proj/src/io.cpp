#include "anchordoc/io.hpp"

#include <fstream>
#include <sstream>

#include "anchordoc/error.hpp"

namespace anchordoc {

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) raise(Errc::Io, "cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) raise(Errc::Io, "read failed for " + file.string());
  return std::move(buf).str();
}

void write_text_file(const std::filesystem::path& file, std::string_view content) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::Io, "cannot open " + file.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) raise(Errc::Io, "write failed for " + file.string());
}

njson read_json_file(const std::filesystem::path& file) {
  const std::string text = read_text_file(file);
  njson value = njson::parse(text, nullptr, false);
  if (value.is_discarded())
    raise(Errc::Config, "invalid JSON in " + file.string());
  return value;
}

void write_json_file(const std::filesystem::path& file, const njson& value) {
  write_text_file(file, value.dump(2) + "\n");
}

}  // namespace anchordoc

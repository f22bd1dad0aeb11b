#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nca {

// Shortest decimal representation that round-trips the exact double; the
// same value always formats to the same bytes, which is what makes CSV
// outputs byte-identical across reruns.
std::string format_double(double v);

// Strict double parse; throws IoError on trailing garbage or empty field.
double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

// Split one CSV line on commas (no quoting in any of our formats).
std::vector<std::string> split_csv_line(const std::string& line);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// FNV-1a 64-bit over a file's bytes; provenance hash for manifests.
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

}  // namespace nca

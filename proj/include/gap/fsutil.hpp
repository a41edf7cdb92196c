#pragma once

#include <filesystem>
#include <string>

namespace gap {

// Writes via a sibling temp file + rename, so a killed run never leaves a
// half-written output.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);
void atomic_write_binary(const std::filesystem::path& path, const std::string& bytes);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gap

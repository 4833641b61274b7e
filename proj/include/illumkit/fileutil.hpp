#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace illumkit {

// Whole-file read; throws IoError.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over the target so readers
// never observe a partially written file. Parent directories are created.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const char> bytes);
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& text);

}  // namespace illumkit

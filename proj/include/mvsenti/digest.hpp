#pragma once

#include <filesystem>
#include <string>

namespace mvsenti {

/// Streaming SHA-256 of a file, lowercase hex.
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace mvsenti

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stsg {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Digest of fields joined with \x00 separators; used for cache keys and
// stage-resume fingerprints.
std::string sha256_hex_fields(const std::vector<std::string>& fields);

std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace stsg

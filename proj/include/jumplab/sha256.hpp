#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace jumplab {

/// SHA-256 of a byte buffer, returned as lowercase hex. Used for content
/// hashes in run manifests; implemented locally to keep artifacts dependency-free.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's contents (streamed). Throws std::runtime_error if unreadable.
std::string sha256_file(const std::string& path);

} // namespace jumplab

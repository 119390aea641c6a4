#pragma once

#include <string>
#include <string_view>

namespace dalk {

// Lowercase hex SHA-256 of the given bytes (64 characters).
std::string sha256_hex(std::string_view data);

}  // namespace dalk

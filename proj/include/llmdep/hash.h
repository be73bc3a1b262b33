#ifndef LLMDEP_HASH_H_
#define LLMDEP_HASH_H_

#include <string>
#include <string_view>

namespace llmdep {

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);
// Throws IoError if the file cannot be read.
std::string Sha256File(const std::string& path);

}  // namespace llmdep

#endif  // LLMDEP_HASH_H_

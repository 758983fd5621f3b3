#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace geoscale::util {

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);

}  // namespace geoscale::util

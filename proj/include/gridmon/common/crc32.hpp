#pragma once

#include <cstdint>

#include "gridmon/common/bytes.hpp"

namespace gridmon {

// IEEE 802.3 CRC-32 (zlib polynomial).
std::uint32_t crc32(ByteView data, std::uint32_t seed = 0);

}  // namespace gridmon

#include "gridmon/common/crc32.hpp"

#include <zlib.h>

namespace gridmon {

std::uint32_t crc32(ByteView data, std::uint32_t seed) {
  return static_cast<std::uint32_t>(
      ::crc32_z(seed, data.data(), data.size()));
}

}  // namespace gridmon

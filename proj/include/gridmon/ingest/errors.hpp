#pragma once

#include <stdexcept>
#include <string>

namespace gridmon::ingest {

enum class IngestErrc { kDecodeFailed, kWalIo, kCorruptWal };

class IngestError : public std::runtime_error {
 public:
  IngestError(IngestErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  IngestErrc code() const { return code_; }

 private:
  IngestErrc code_;
};

}  // namespace gridmon::ingest

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridmon::store {

enum class StoreErrc { kCrcMismatch, kBadMagic, kBadFooter, kUnknownPoint, kIoError };

std::string_view store_errc_name(StoreErrc e);

class StoreError : public std::runtime_error {
 public:
  StoreError(StoreErrc code, const std::string& what)
      : std::runtime_error(std::string(store_errc_name(code)) + ": " + what), code_(code) {}
  StoreErrc code() const { return code_; }

 private:
  StoreErrc code_;
};

}  // namespace gridmon::store

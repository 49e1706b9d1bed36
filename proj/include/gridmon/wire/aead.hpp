#pragma once

#include <optional>

#include "gridmon/common/bytes.hpp"
#include "gridmon/wire/frame.hpp"

namespace gridmon::wire {

// AES-128-GCM: returns ciphertext || 16-byte tag.
Bytes aead_seal(const Key& key, const Nonce& nonce, ByteView aad, ByteView plaintext);

// Returns the plaintext, or nullopt if the tag does not verify.
std::optional<Bytes> aead_open(const Key& key, const Nonce& nonce, ByteView aad,
                               ByteView ciphertext_and_tag);

}  // namespace gridmon::wire

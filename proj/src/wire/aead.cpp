#include "gridmon/wire/aead.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace gridmon::wire {
namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};

// One context per thread, reinitialised for every operation.
EVP_CIPHER_CTX* thread_ctx() {
  thread_local std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  return ctx.get();
}

int as_int(std::size_t n) { return static_cast<int>(n); }

}  // namespace

Bytes aead_seal(const Key& key, const Nonce& nonce, ByteView aad, ByteView plaintext) {
  EVP_CIPHER_CTX* ctx = thread_ctx();
  Bytes out(plaintext.size() + kTagSize);
  int len = 0;
  bool ok = EVP_EncryptInit_ex(ctx, EVP_aes_128_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_IVLEN, as_int(kNonceSize), nullptr) == 1 &&
            EVP_EncryptInit_ex(ctx, nullptr, nullptr, key.data(), nonce.data()) == 1 &&
            EVP_EncryptUpdate(ctx, nullptr, &len, aad.data(), as_int(aad.size())) == 1;
  if (ok && !plaintext.empty())
    ok = EVP_EncryptUpdate(ctx, out.data(), &len, plaintext.data(), as_int(plaintext.size())) == 1;
  ok = ok && EVP_EncryptFinal_ex(ctx, out.data() + plaintext.size(), &len) == 1 &&
       EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG, as_int(kTagSize),
                           out.data() + plaintext.size()) == 1;
  if (!ok) throw std::runtime_error("AES-GCM seal failed");
  return out;
}

std::optional<Bytes> aead_open(const Key& key, const Nonce& nonce, ByteView aad,
                               ByteView ciphertext_and_tag) {
  if (ciphertext_and_tag.size() < kTagSize) return std::nullopt;
  const std::size_t ct_len = ciphertext_and_tag.size() - kTagSize;
  EVP_CIPHER_CTX* ctx = thread_ctx();
  Bytes out(ct_len);
  int len = 0;
  bool ok = EVP_DecryptInit_ex(ctx, EVP_aes_128_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_IVLEN, as_int(kNonceSize), nullptr) == 1 &&
            EVP_DecryptInit_ex(ctx, nullptr, nullptr, key.data(), nonce.data()) == 1 &&
            EVP_DecryptUpdate(ctx, nullptr, &len, aad.data(), as_int(aad.size())) == 1;
  if (ok && ct_len > 0)
    ok = EVP_DecryptUpdate(ctx, out.data(), &len, ciphertext_and_tag.data(), as_int(ct_len)) == 1;
  if (!ok) return std::nullopt;
  // OpenSSL takes a non-const tag pointer.
  std::array<std::uint8_t, kTagSize> tag;
  std::copy(ciphertext_and_tag.end() - kTagSize, ciphertext_and_tag.end(), tag.begin());
  if (EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_TAG, as_int(kTagSize), tag.data()) != 1)
    return std::nullopt;
  if (EVP_DecryptFinal_ex(ctx, out.data() + ct_len, &len) != 1) return std::nullopt;
  return out;
}

}  // namespace gridmon::wire

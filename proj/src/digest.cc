#include "gfse/digest.h"

#include <array>
#include <cstdio>
#include <mutex>
#include <stdexcept>

namespace gfse {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  });
}

void put_u64(unsigned char* out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<unsigned char>(v & 0xff);
    v >>= 8;
  }
}

}  // namespace

std::string Digest::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

Hasher::Hasher() {
  ensure_sodium();
  crypto_generichash_init(&state_, nullptr, 0, 16);
}

Hasher& Hasher::update(std::span<const unsigned char> bytes) {
  crypto_generichash_update(&state_, bytes.data(), bytes.size());
  return *this;
}

Hasher& Hasher::update(const Digest& d) {
  std::array<unsigned char, 16> buf;
  put_u64(buf.data(), d.hi);
  put_u64(buf.data() + 8, d.lo);
  return update(buf);
}

Hasher& Hasher::update_u64(std::uint64_t v) {
  std::array<unsigned char, 8> buf;
  put_u64(buf.data(), v);
  return update(buf);
}

Digest Hasher::finish() {
  std::array<unsigned char, 16> out;
  crypto_generichash_final(&state_, out.data(), out.size());
  Digest d;
  for (int i = 0; i < 8; ++i) d.hi = (d.hi << 8) | out[i];
  for (int i = 8; i < 16; ++i) d.lo = (d.lo << 8) | out[i];
  return d;
}

Digest digest_of(std::string_view bytes) { return Hasher().update(bytes).finish(); }

}  // namespace gfse

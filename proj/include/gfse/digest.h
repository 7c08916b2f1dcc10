#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <sodium.h>

namespace gfse {

/// 128-bit content digest (BLAKE2b truncated to 16 bytes).
struct Digest {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend auto operator<=>(const Digest&, const Digest&) = default;
  std::string hex() const;
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    return static_cast<std::size_t>(d.lo ^ (d.hi * 0x9e3779b97f4a7c15ULL));
  }
};

class Hasher {
 public:
  Hasher();
  Hasher& update(std::span<const unsigned char> bytes);
  Hasher& update(std::string_view s) {
    return update({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
  }
  Hasher& update(const Digest& d);
  Hasher& update_u64(std::uint64_t v);
  Digest finish();

 private:
  crypto_generichash_state state_;
};

Digest digest_of(std::string_view bytes);

}  // namespace gfse

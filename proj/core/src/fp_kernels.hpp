// Internal modular-arithmetic kernels shared by fields.cpp and the flat
// incidence sweep in config.cpp. Not installed.
#pragma once

#include <cstdint>

namespace staudt::fpk {

inline std::uint64_t addm(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t s = a + b;
  return s >= p ? s - p : s;
}
inline std::uint64_t subm(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return a >= b ? a - b : a + p - b;
}
inline std::uint64_t mulm(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((unsigned __int128)a * b % p);
}

inline int bit_deg(std::uint64_t a) { return a ? 63 - __builtin_clzll(a) : -1; }

inline unsigned __int128 clmul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 r = 0;
  while (b) {
    int i = __builtin_ctzll(b);
    r ^= (unsigned __int128)a << i;
    b &= b - 1;
  }
  return r;
}

inline std::uint64_t bit_mod(unsigned __int128 a, std::uint64_t f) {
  const int df = bit_deg(f);
  while (true) {
    int da;
    if (a >> 64) {
      da = 64 + bit_deg(static_cast<std::uint64_t>(a >> 64));
    } else {
      da = bit_deg(static_cast<std::uint64_t>(a));
    }
    if (da < df) break;
    a ^= (unsigned __int128)f << (da - df);
  }
  return static_cast<std::uint64_t>(a);
}

inline std::uint64_t bit_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t f) {
  return bit_mod(clmul(a, b), f);
}

}  // namespace staudt::fpk

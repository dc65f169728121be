#include <w3a/crypto.hpp>

#include <cstring>

namespace w3a::crypto
{
namespace
{
constexpr std::array<std::uint64_t, 24> round_constants{
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

constexpr std::array<int, 24> rotations{1,  3,  6,  10, 15, 21, 28, 36,
                                        45, 55, 2,  14, 27, 41, 56, 8,
                                        25, 43, 62, 18, 39, 61, 20, 44};

constexpr std::array<int, 24> lanes{10, 7,  11, 17, 18, 3,  5,  16,
                                    8,  21, 24, 4,  15, 23, 19, 13,
                                    12, 2,  20, 14, 22, 9,  6,  1};

constexpr std::size_t rate = 136; // 1088-bit rate for a 256-bit digest

std::uint64_t rotl(std::uint64_t x, int n)
{
  return (x << n) | (x >> (64 - n));
}

void keccak_f(std::array<std::uint64_t, 25>& st)
{
  for (auto rc : round_constants)
  {
    std::uint64_t c[5];
    for (int x = 0; x < 5; ++x)
      c[x] = st[x] ^ st[x + 5] ^ st[x + 10] ^ st[x + 15] ^ st[x + 20];
    for (int x = 0; x < 5; ++x)
    {
      auto const d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
      for (int y = 0; y < 25; y += 5)
        st[y + x] ^= d;
    }

    auto t = st[1];
    for (int i = 0; i < 24; ++i)
    {
      auto const j = lanes[i];
      auto const next = st[j];
      st[j] = rotl(t, rotations[i]);
      t = next;
    }

    for (int y = 0; y < 25; y += 5)
    {
      std::uint64_t row[5];
      for (int x = 0; x < 5; ++x)
        row[x] = st[y + x];
      for (int x = 0; x < 5; ++x)
        st[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
    }

    st[0] ^= rc;
  }
}

void absorb_block(std::array<std::uint64_t, 25>& st, std::uint8_t const* block)
{
  for (std::size_t i = 0; i < rate / 8; ++i)
  {
    std::uint64_t lane = 0;
    for (int b = 7; b >= 0; --b)
      lane = (lane << 8) | block[i * 8 + b];
    st[i] ^= lane;
  }
  keccak_f(st);
}
}

// Original Keccak padding (0x01), not the FIPS-202 SHA3 domain byte.
Hash256 keccak256(std::span<const std::uint8_t> data)
{
  std::array<std::uint64_t, 25> st{};
  auto p = data.data();
  auto remaining = data.size();
  while (remaining >= rate)
  {
    absorb_block(st, p);
    p += rate;
    remaining -= rate;
  }

  std::array<std::uint8_t, rate> last{};
  if (remaining > 0)
    std::memcpy(last.data(), p, remaining);
  last[remaining] ^= 0x01;
  last[rate - 1] ^= 0x80;
  absorb_block(st, last.data());

  Hash256 out{};
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(st[i / 8] >> (8 * (i % 8)));
  return out;
}

Hash256 keccak256(std::string_view data)
{
  return keccak256(std::span<const std::uint8_t>(
      reinterpret_cast<std::uint8_t const*>(data.data()), data.size()));
}
}

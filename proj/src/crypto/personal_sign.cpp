#include <w3a/crypto.hpp>

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace w3a::crypto
{
namespace
{
constexpr char digits[] = "0123456789abcdef";

int nibble(char c)
{
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  if (c >= 'A' && c <= 'F')
    return c - 'A' + 10;
  return -1;
}

std::string_view strip_0x(std::string_view hex)
{
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X'))
    hex.remove_prefix(2);
  return hex;
}
}

std::string to_hex(std::span<const std::uint8_t> data)
{
  std::string out = "0x";
  out.reserve(2 + data.size() * 2);
  for (auto b : data)
  {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex)
{
  hex = strip_0x(hex);
  if (hex.size() % 2 != 0)
    throw std::invalid_argument("odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2)
  {
    auto const hi = nibble(hex[i]);
    auto const lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0)
      throw std::invalid_argument("non-hex character");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

std::string Address::hex() const
{
  return to_hex(bytes);
}

Address Address::parse(std::string_view text)
{
  if (text.size() != 42 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
    throw std::invalid_argument("address must be 0x followed by 40 hex digits");
  auto const raw = from_hex(text);
  Address a;
  std::copy(raw.begin(), raw.end(), a.bytes.begin());
  return a;
}

std::string to_checksum_address(Address const& address)
{
  auto const lower = address.hex().substr(2);
  auto const h = keccak256(lower);
  std::string out = "0x";
  for (std::size_t i = 0; i < lower.size(); ++i)
  {
    auto const hash_nibble = (i % 2 == 0) ? (h[i / 2] >> 4) : (h[i / 2] & 0x0f);
    auto const c = lower[i];
    out.push_back(hash_nibble >= 8 ? static_cast<char>(std::toupper(c)) : c);
  }
  return out;
}

std::array<std::uint8_t, 65> SignatureBundle::encoded() const
{
  std::array<std::uint8_t, 65> out{};
  std::copy(r.begin(), r.end(), out.begin());
  std::copy(s.begin(), s.end(), out.begin() + 32);
  out[64] = v;
  return out;
}

std::string SignatureBundle::hex() const
{
  return to_hex(encoded());
}

SignatureBundle SignatureBundle::from_hex(std::string_view hex)
{
  Bytes raw;
  try
  {
    raw = crypto::from_hex(hex);
  }
  catch (std::invalid_argument const& e)
  {
    throw InvalidSignature(e.what());
  }
  if (raw.size() != 65)
    throw InvalidSignature("signature must be 65 bytes");
  SignatureBundle sig;
  std::copy(raw.begin(), raw.begin() + 32, sig.r.begin());
  std::copy(raw.begin() + 32, raw.begin() + 64, sig.s.begin());
  sig.v = raw[64];
  return sig;
}

Hash256 personal_message_hash(std::string_view message)
{
  std::string prefixed = "\x19" "Ethereum Signed Message:\n";
  prefixed += std::to_string(message.size());
  prefixed += message;
  return keccak256(prefixed);
}

SignatureBundle personal_sign(std::string_view message, KeyPair const& key)
{
  return sign_digest(personal_message_hash(message), key);
}

Address recover_address(std::string_view message, SignatureBundle const& sig)
{
  return recover_digest(personal_message_hash(message), sig);
}
}

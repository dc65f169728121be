#pragma once

#include <w3a/error.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Ethereum account keys and the Personal Sign (EIP-191) scheme.
namespace w3a::crypto
{
class InvalidSeed : public Error
{
public:
  InvalidSeed() : Error("seed reduces to the zero scalar") {}
};

class InvalidSignature : public Error
{
public:
  using Error::Error;
};

using Bytes = std::vector<std::uint8_t>;
using Hash256 = std::array<std::uint8_t, 32>;

Hash256 keccak256(std::span<const std::uint8_t> data);
Hash256 keccak256(std::string_view data);

// Lowercase hex with a "0x" prefix.
std::string to_hex(std::span<const std::uint8_t> data);
// Accepts an optional "0x" prefix and either case. Throws std::invalid_argument.
Bytes from_hex(std::string_view hex);

struct Address
{
  std::array<std::uint8_t, 20> bytes{};

  // "0x" + 40 lowercase hex digits.
  std::string hex() const;
  // Throws std::invalid_argument unless the input is 0x followed by 40 hex digits.
  static Address parse(std::string_view text);

  friend bool operator==(Address const&, Address const&) = default;
  friend auto operator<=>(Address const&, Address const&) = default;
};

// EIP-55 mixed-case checksum encoding.
std::string to_checksum_address(Address const& address);

class KeyPair
{
public:
  // The seed is read as a big-endian integer and reduced modulo the curve
  // order; a zero result is rejected.
  static KeyPair from_seed(std::span<const std::uint8_t, 32> seed);
  static KeyPair from_seed(std::array<std::uint8_t, 32> const& seed)
  {
    return from_seed(std::span<const std::uint8_t, 32>(seed));
  }

  std::array<std::uint8_t, 32> const& secret() const
  {
    return secret_;
  }
  Address const& address() const
  {
    return address_;
  }

private:
  KeyPair() = default;

  std::array<std::uint8_t, 32> secret_{};
  Address address_;
};

struct SignatureBundle
{
  std::array<std::uint8_t, 32> r{};
  std::array<std::uint8_t, 32> s{};
  std::uint8_t v = 27;

  // r || s || v
  std::array<std::uint8_t, 65> encoded() const;
  // 132 characters including the "0x" prefix.
  std::string hex() const;
  // Throws InvalidSignature on malformed hex or a length other than 65 bytes.
  static SignatureBundle from_hex(std::string_view hex);

  friend bool operator==(SignatureBundle const&, SignatureBundle const&) = default;
};

// keccak256("\x19Ethereum Signed Message:\n" || len(message) || message)
Hash256 personal_message_hash(std::string_view message);

// Raw ECDSA over an already hashed 32-byte digest. Deterministic nonce
// (RFC 6979, HMAC-SHA256) and low-s normalisation.
SignatureBundle sign_digest(Hash256 const& digest, KeyPair const& key);
// Throws InvalidSignature for out-of-range r/s, high s, v outside {27, 28},
// or when no public key can be recovered.
Address recover_digest(Hash256 const& digest, SignatureBundle const& sig);

SignatureBundle personal_sign(std::string_view message, KeyPair const& key);
Address recover_address(std::string_view message, SignatureBundle const& sig);

// True when s is at most half the curve order.
bool is_canonical(SignatureBundle const& sig);
}

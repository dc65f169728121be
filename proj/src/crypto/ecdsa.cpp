#include <w3a/crypto.hpp>

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace w3a::crypto
{
namespace
{
struct BnFree
{
  void operator()(BIGNUM* p) const
  {
    BN_clear_free(p);
  }
};
struct CtxFree
{
  void operator()(BN_CTX* p) const
  {
    BN_CTX_free(p);
  }
};
struct PointFree
{
  void operator()(EC_POINT* p) const
  {
    EC_POINT_clear_free(p);
  }
};
struct GroupFree
{
  void operator()(EC_GROUP* p) const
  {
    EC_GROUP_free(p);
  }
};

using Bn = std::unique_ptr<BIGNUM, BnFree>;
using Ctx = std::unique_ptr<BN_CTX, CtxFree>;
using Point = std::unique_ptr<EC_POINT, PointFree>;

void ensure(int ok, char const* what)
{
  if (ok != 1)
    throw Error(std::string("secp256k1: ") + what);
}

template <typename T>
T ensure_ptr(T p, char const* what)
{
  if (!p)
    throw Error(std::string("secp256k1: ") + what);
  return p;
}

EC_GROUP const* curve()
{
  static std::unique_ptr<EC_GROUP, GroupFree> const group{
      EC_GROUP_new_by_curve_name(NID_secp256k1)};
  return ensure_ptr(group.get(), "curve unavailable");
}

BIGNUM const* order()
{
  return EC_GROUP_get0_order(curve());
}

Bn bn_new()
{
  return Bn{ensure_ptr(BN_new(), "BN_new")};
}

Bn bn_from(std::span<const std::uint8_t> bytes)
{
  return Bn{ensure_ptr(
      BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr),
      "BN_bin2bn")};
}

std::array<std::uint8_t, 32> bn_to32(BIGNUM const* n)
{
  std::array<std::uint8_t, 32> out{};
  ensure(BN_bn2binpad(n, out.data(), 32) == 32 ? 1 : 0, "BN_bn2binpad");
  return out;
}

Ctx ctx_new()
{
  return Ctx{ensure_ptr(BN_CTX_new(), "BN_CTX_new")};
}

Address address_of(EC_POINT const* pub, BN_CTX* ctx)
{
  std::array<std::uint8_t, 65> buf{};
  auto const n = EC_POINT_point2oct(curve(), pub, POINT_CONVERSION_UNCOMPRESSED,
                                    buf.data(), buf.size(), ctx);
  ensure(n == buf.size() ? 1 : 0, "point encoding");
  auto const h = keccak256(std::span<const std::uint8_t>(buf).subspan(1));
  Address a;
  std::copy(h.begin() + 12, h.end(), a.bytes.begin());
  return a;
}

Bn half_order()
{
  auto h = bn_new();
  ensure(BN_rshift1(h.get(), order()), "BN_rshift1");
  return h;
}

using Mac = std::array<std::uint8_t, 32>;

Mac hmac(Mac const& key, std::span<const std::uint8_t> a,
         std::span<const std::uint8_t> b = {},
         std::span<const std::uint8_t> c = {},
         std::span<const std::uint8_t> d = {})
{
  Bytes msg;
  msg.reserve(a.size() + b.size() + c.size() + d.size());
  for (auto part : {a, b, c, d})
    msg.insert(msg.end(), part.begin(), part.end());
  Mac out{};
  unsigned int len = 0;
  ensure_ptr(HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
                  msg.data(), msg.size(), out.data(), &len),
             "HMAC");
  return out;
}

// RFC 6979 section 3.2 with HMAC-SHA256 and qlen = hlen = 256.
class NonceStream
{
public:
  NonceStream(std::array<std::uint8_t, 32> const& secret, Hash256 const& digest)
  {
    auto ctx = ctx_new();
    auto h = bn_from(digest);
    ensure(BN_nnmod(h.get(), h.get(), order(), ctx.get()), "BN_nnmod");
    auto const h_octets = bn_to32(h.get());

    v_.fill(0x01);
    k_.fill(0x00);
    std::uint8_t const zero = 0x00;
    std::uint8_t const one = 0x01;
    k_ = hmac(k_, v_, {&zero, 1}, secret, h_octets);
    v_ = hmac(k_, v_);
    k_ = hmac(k_, v_, {&one, 1}, secret, h_octets);
    v_ = hmac(k_, v_);
  }

  Bn next()
  {
    for (;;)
    {
      if (started_)
      {
        std::uint8_t const zero = 0x00;
        k_ = hmac(k_, v_, {&zero, 1});
        v_ = hmac(k_, v_);
      }
      started_ = true;
      v_ = hmac(k_, v_);
      auto k = bn_from(v_);
      if (!BN_is_zero(k.get()) && BN_cmp(k.get(), order()) < 0)
        return k;
    }
  }

private:
  Mac k_{};
  Mac v_{};
  bool started_ = false;
};
}

KeyPair KeyPair::from_seed(std::span<const std::uint8_t, 32> seed)
{
  auto ctx = ctx_new();
  auto d = bn_from(seed);
  ensure(BN_nnmod(d.get(), d.get(), order(), ctx.get()), "BN_nnmod");
  if (BN_is_zero(d.get()))
    throw InvalidSeed();

  Point pub{ensure_ptr(EC_POINT_new(curve()), "EC_POINT_new")};
  ensure(EC_POINT_mul(curve(), pub.get(), d.get(), nullptr, nullptr, ctx.get()),
         "EC_POINT_mul");

  KeyPair kp;
  kp.secret_ = bn_to32(d.get());
  kp.address_ = address_of(pub.get(), ctx.get());
  return kp;
}

SignatureBundle sign_digest(Hash256 const& digest, KeyPair const& key)
{
  auto ctx = ctx_new();
  auto const d = bn_from(key.secret());
  auto const e = bn_from(digest);
  auto const half = half_order();

  NonceStream nonces(key.secret(), digest);
  Point big_r{ensure_ptr(EC_POINT_new(curve()), "EC_POINT_new")};
  auto rx = bn_new();
  auto ry = bn_new();
  auto r = bn_new();
  auto s = bn_new();
  auto kinv = bn_new();
  auto tmp = bn_new();

  for (;;)
  {
    auto const k = nonces.next();
    ensure(EC_POINT_mul(curve(), big_r.get(), k.get(), nullptr, nullptr, ctx.get()),
           "EC_POINT_mul");
    ensure(EC_POINT_get_affine_coordinates(curve(), big_r.get(), rx.get(),
                                           ry.get(), ctx.get()),
           "affine coordinates");
    // Rx >= n cannot be expressed with v in {27, 28}; draw the next nonce.
    if (BN_cmp(rx.get(), order()) >= 0)
      continue;
    ensure(BN_copy(r.get(), rx.get()) ? 1 : 0, "BN_copy");
    if (BN_is_zero(r.get()))
      continue;

    ensure(BN_mod_mul(tmp.get(), r.get(), d.get(), order(), ctx.get()), "BN_mod_mul");
    ensure(BN_mod_add(tmp.get(), tmp.get(), e.get(), order(), ctx.get()), "BN_mod_add");
    ensure_ptr(BN_mod_inverse(kinv.get(), k.get(), order(), ctx.get()), "BN_mod_inverse");
    ensure(BN_mod_mul(s.get(), kinv.get(), tmp.get(), order(), ctx.get()), "BN_mod_mul");
    if (BN_is_zero(s.get()))
      continue;

    int recid = BN_is_odd(ry.get()) ? 1 : 0;
    if (BN_cmp(s.get(), half.get()) > 0)
    {
      ensure(BN_sub(s.get(), order(), s.get()), "BN_sub");
      recid ^= 1;
    }

    SignatureBundle sig;
    sig.r = bn_to32(r.get());
    sig.s = bn_to32(s.get());
    sig.v = static_cast<std::uint8_t>(27 + recid);
    return sig;
  }
}

Address recover_digest(Hash256 const& digest, SignatureBundle const& sig)
{
  if (sig.v != 27 && sig.v != 28)
    throw InvalidSignature("recovery id must be 27 or 28");

  auto ctx = ctx_new();
  auto const r = bn_from(sig.r);
  auto const s = bn_from(sig.s);
  if (BN_is_zero(r.get()) || BN_cmp(r.get(), order()) >= 0)
    throw InvalidSignature("r out of range");
  if (BN_is_zero(s.get()) || BN_cmp(s.get(), half_order().get()) > 0)
    throw InvalidSignature("s out of range or not canonical");

  Point big_r{ensure_ptr(EC_POINT_new(curve()), "EC_POINT_new")};
  if (EC_POINT_set_compressed_coordinates(curve(), big_r.get(), r.get(),
                                          sig.v - 27, ctx.get()) != 1)
    throw InvalidSignature("r is not the x coordinate of a curve point");

  auto const e = bn_from(digest);
  auto rinv = bn_new();
  ensure_ptr(BN_mod_inverse(rinv.get(), r.get(), order(), ctx.get()), "BN_mod_inverse");

  // Q = r^-1 (s R - e G) = (-e r^-1) G + (s r^-1) R
  auto g_scalar = bn_new();
  ensure(BN_mod_mul(g_scalar.get(), e.get(), rinv.get(), order(), ctx.get()), "BN_mod_mul");
  ensure(BN_mod_sub(g_scalar.get(), order(), g_scalar.get(), order(), ctx.get()),
         "BN_mod_sub");
  auto r_scalar = bn_new();
  ensure(BN_mod_mul(r_scalar.get(), s.get(), rinv.get(), order(), ctx.get()), "BN_mod_mul");

  Point q{ensure_ptr(EC_POINT_new(curve()), "EC_POINT_new")};
  ensure(EC_POINT_mul(curve(), q.get(), g_scalar.get(), big_r.get(), r_scalar.get(),
                      ctx.get()),
         "EC_POINT_mul");
  if (EC_POINT_is_at_infinity(curve(), q.get()))
    throw InvalidSignature("recovered point at infinity");
  return address_of(q.get(), ctx.get());
}

bool is_canonical(SignatureBundle const& sig)
{
  auto const s = bn_from(sig.s);
  return !BN_is_zero(s.get()) && BN_cmp(s.get(), half_order().get()) <= 0;
}
}

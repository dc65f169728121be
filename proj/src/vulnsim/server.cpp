#include <w3a/crypto.hpp>
#include <w3a/vulnsim.hpp>

#include <algorithm>
#include <regex>

namespace w3a::sim
{
namespace
{
std::string regex_escape(std::string_view text)
{
  static constexpr std::string_view special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : text)
  {
    if (special.find(c) != std::string_view::npos)
      out += '\\';
    out += c;
  }
  return out;
}

struct Extracted
{
  bool matched = false;
  std::map<LayoutPart::Slot, std::string> values;
};

Extracted match_layout(std::vector<LayoutPart> const& layout, std::string const& message,
                       bool whole)
{
  std::string pattern;
  std::vector<LayoutPart::Slot> slots;
  for (auto const& part : layout)
  {
    if (part.slot == LayoutPart::Slot::Literal)
    {
      pattern += regex_escape(part.text);
    }
    else
    {
      pattern += R"((\S*))";
      slots.push_back(part.slot);
    }
  }
  std::regex const re(pattern);
  std::smatch m;
  Extracted out;
  out.matched = whole ? std::regex_match(message, m, re) : std::regex_search(message, m, re);
  if (out.matched)
    for (std::size_t i = 0; i < slots.size(); ++i)
      out.values[slots[i]] = m[i + 1].str();
  return out;
}

// Only the labelled fields matter: each label must appear, and the version
// line must be present verbatim.
Extracted match_labels(VulnProfile const& profile, std::vector<LayoutPart> const& layout,
                       std::string const& message)
{
  Extracted out;
  if (!profile.version_line.empty() && message.find(profile.version_line) == std::string::npos)
    return out;
  for (auto const& part : layout)
  {
    if (part.slot == LayoutPart::Slot::Literal)
      continue;
    std::regex const re(regex_escape(part.label) + R"([ \t]*\n?[ \t]*(\S*))");
    std::smatch m;
    if (!std::regex_search(message, m, re))
      return out;
    out.values[part.slot] = m[1].str();
  }
  out.matched = true;
  return out;
}

std::string normalize_address(std::string const& text)
{
  return crypto::Address::parse(text).hex();
}
}

ProfileServer::ProfileServer(VulnProfile profile, Clock clock)
  : profile_(std::move(profile)), clock_(std::move(clock))
{
  if (!clock_)
    clock_ = [] { return std::chrono::system_clock::now(); };
}

std::string ProfileServer::fresh_nonce(std::chrono::system_clock::time_point now) const
{
  switch (profile_.nonce_format)
  {
  case NonceFormat::Uuid:
    return *flex::builtin_value("uuid4");
  case NonceFormat::Digits8: {
    // No leading zero, so the value stays eight digits when read back as a number.
    auto v = *flex::builtin_value("rand_digits(8)");
    if (v[0] == '0')
      v[0] = '1';
    return v;
  }
  case NonceFormat::Hex8:
    return *flex::builtin_value("rand_hex(8)");
  case NonceFormat::Timestamp10:
    return message::format_time_value(message::NonceValueKind::Timestamp10, now);
  case NonceFormat::Timestamp13:
    return message::format_time_value(message::NonceValueKind::Timestamp13, now);
  case NonceFormat::DateTime:
    return message::format_time_value(message::NonceValueKind::DateTime, now);
  }
  return {};
}

QueryResult ProfileServer::handle_query(std::string const& address)
{
  std::string normalized;
  try
  {
    normalized = normalize_address(address);
  }
  catch (std::exception const&)
  {
    throw Error("query needs a wallet address");
  }

  std::lock_guard lock(mutex_);
  auto const now = clock_();
  QueryResult out;
  if (profile_.nonce_kind != NonceKind::None)
  {
    out.nonce = fresh_nonce(now);
    if (profile_.nonce_kind == NonceKind::OneTime || profile_.nonce_kind == NonceKind::Temporary)
      nonces_[out.nonce] = {normalized, now, false};
  }
  if (profile_.query_mode != QueryMode::Nonce)
  {
    SlotValues v;
    v.address = address;
    v.nonce = out.nonce;
    v.issued_at = message::format_time_value(message::NonceValueKind::DateTime, now);
    v.expiration = message::format_time_value(message::NonceValueKind::DateTime,
                                              now + std::chrono::hours(24));
    out.message = compose_message(profile_, v);
  }
  return out;
}

Rejection ProfileServer::check_nonce(std::string const& value, std::string const& identity,
                                     std::chrono::system_clock::time_point now,
                                     std::string& reason)
{
  switch (profile_.nonce_kind)
  {
  case NonceKind::None:
  case NonceKind::Unchecked:
    return Rejection::None;

  case NonceKind::OneTime: {
    auto it = nonces_.find(value);
    if (it == nonces_.end())
      reason = "unknown nonce";
    else if (it->second.used)
      reason = "nonce already used";
    else if (it->second.address != identity)
      reason = "nonce issued to another address";
    else
    {
      it->second.used = true;
      return Rejection::None;
    }
    return Rejection::Nonce;
  }

  case NonceKind::Temporary: {
    auto it = nonces_.find(value);
    if (it == nonces_.end())
      reason = "unknown nonce";
    else if (now - it->second.issued_at > profile_.nonce_ttl)
      reason = "nonce expired";
    else
      return Rejection::None;
    return Rejection::Nonce;
  }

  case NonceKind::TimeBased: {
    if (value.empty())
    {
      if (profile_.no_expiry)
        return Rejection::None;
      reason = "missing timestamp";
      return Rejection::Nonce;
    }
    auto const t = message::parse_time_value(value);
    if (!t)
      reason = "timestamp not understood";
    else if (*t > now + profile_.time_window)
      reason = "timestamp in the future";
    else if (!profile_.no_expiry && now - *t > profile_.time_window)
      reason = "timestamp expired";
    else
      return Rejection::None;
    return Rejection::Nonce;
  }
  }
  return Rejection::None;
}

AuthResult ProfileServer::handle_auth(std::string const& address, std::string const& message,
                                      std::string const& signature)
{
  AuthResult out;
  auto reject = [&](Rejection r, std::string reason) {
    out.rejection = r;
    out.reason = std::move(reason);
    return out;
  };

  std::optional<crypto::Address> claimed;
  try
  {
    claimed = crypto::Address::parse(address);
  }
  catch (std::exception const&)
  {
  }

  std::string identity;
  if (profile_.sig_check)
  {
    crypto::Address recovered;
    try
    {
      recovered = crypto::recover_address(message, crypto::SignatureBundle::from_hex(signature));
    }
    catch (std::exception const& e)
    {
      return reject(Rejection::Signature, std::string("signature rejected: ") + e.what());
    }
    if (profile_.addr_check)
    {
      if (!claimed || *claimed != recovered)
        return reject(Rejection::Address, "signer does not match the claimed address");
      identity = recovered.hex();
    }
    else
    {
      identity = claimed ? claimed->hex() : recovered.hex();
    }
  }
  else
  {
    if (!claimed)
      return reject(Rejection::Malformed, "address is not an 0x-address");
    identity = claimed->hex();
  }

  std::lock_guard lock(mutex_);
  auto const now = clock_();
  if (profile_.message_check)
  {
    if (message.empty())
      return reject(Rejection::Message, "empty message");

    auto const layout = message_layout(profile_);
    Extracted fields;
    switch (profile_.body_check)
    {
    case BodyCheck::Exact:
      fields = match_layout(layout, message, true);
      break;
    case BodyCheck::RegexContains:
      fields = match_layout(layout, message, false);
      break;
    case BodyCheck::None:
      fields = match_labels(profile_, layout, message);
      break;
    }
    if (!fields.matched)
      return reject(Rejection::Body, "message does not match the issued message");

    std::string reason;
    auto const r = check_nonce(fields.values[LayoutPart::Slot::Nonce], identity, now, reason);
    if (r != Rejection::None)
      return reject(r, reason);
  }

  out.token = *flex::builtin_value("rand_hex(32)");
  out.address = identity;
  tokens_[out.token] = {identity, now + profile_.token_ttl};
  return out;
}

std::optional<AccessInfo> ProfileServer::handle_access(std::string const& token)
{
  std::lock_guard lock(mutex_);
  auto it = tokens_.find(token);
  if (it == tokens_.end())
    return std::nullopt;
  if (clock_() >= it->second.expires_at)
  {
    tokens_.erase(it);
    return std::nullopt;
  }
  return AccessInfo{it->second.address, profile_.label};
}
}

#include <w3a/vulnsim.hpp>

#include <json.hpp>

#include <array>

namespace w3a::sim
{
namespace
{
using ojson = nlohmann::ordered_json;

template <typename E, std::size_t N>
E enum_from(std::string const& text, std::array<E, N> const& all, char const* what)
{
  for (auto v : all)
    if (to_string(v) == text)
      return v;
  throw Error(std::string("unknown ") + what + " '" + text + "'");
}

constexpr std::array all_nonce_kinds{NonceKind::None, NonceKind::OneTime, NonceKind::Temporary,
                                     NonceKind::TimeBased, NonceKind::Unchecked};
constexpr std::array all_formats{NonceFormat::Uuid,        NonceFormat::Digits8,
                                 NonceFormat::Hex8,        NonceFormat::Timestamp10,
                                 NonceFormat::Timestamp13, NonceFormat::DateTime};
constexpr std::array all_body_checks{BodyCheck::Exact, BodyCheck::RegexContains, BodyCheck::None};
constexpr std::array all_query_modes{QueryMode::Message, QueryMode::Nonce, QueryMode::None};

void replace_all(std::string& s, std::string_view from, std::string_view to)
{
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

std::string generator_for(NonceFormat f)
{
  switch (f)
  {
  case NonceFormat::Uuid:
    return "{{ uuid4 }}";
  case NonceFormat::Digits8:
    return "{{ rand_digits(8) }}";
  case NonceFormat::Hex8:
    return "{{ rand_hex(8) }}";
  case NonceFormat::Timestamp10:
    return "{{ now_s }}";
  case NonceFormat::Timestamp13:
    return "{{ now_ms }}";
  case NonceFormat::DateTime:
    return "{{ now_iso }}";
  }
  return "{{ uuid4 }}";
}
}

std::string_view to_string(NonceKind v)
{
  switch (v)
  {
  case NonceKind::None:
    return "none";
  case NonceKind::OneTime:
    return "one_time";
  case NonceKind::Temporary:
    return "temporary";
  case NonceKind::TimeBased:
    return "time_based";
  case NonceKind::Unchecked:
    return "unchecked";
  }
  return "none";
}

std::string_view to_string(NonceFormat v)
{
  switch (v)
  {
  case NonceFormat::Uuid:
    return "uuid";
  case NonceFormat::Digits8:
    return "digits8";
  case NonceFormat::Hex8:
    return "hex8";
  case NonceFormat::Timestamp10:
    return "timestamp10";
  case NonceFormat::Timestamp13:
    return "timestamp13";
  case NonceFormat::DateTime:
    return "datetime";
  }
  return "uuid";
}

std::string_view to_string(BodyCheck v)
{
  switch (v)
  {
  case BodyCheck::Exact:
    return "exact";
  case BodyCheck::RegexContains:
    return "regex_contains";
  case BodyCheck::None:
    return "none";
  }
  return "exact";
}

std::string_view to_string(QueryMode v)
{
  switch (v)
  {
  case QueryMode::Message:
    return "message";
  case QueryMode::Nonce:
    return "nonce";
  case QueryMode::None:
    return "none";
  }
  return "message";
}

std::string_view to_string(Rejection r)
{
  switch (r)
  {
  case Rejection::None:
    return "none";
  case Rejection::Malformed:
    return "malformed";
  case Rejection::Signature:
    return "signature";
  case Rejection::Address:
    return "address";
  case Rejection::Message:
    return "message";
  case Rejection::Body:
    return "body";
  case Rejection::Nonce:
    return "nonce";
  }
  return "none";
}

std::vector<VulnProfile> load_profiles(std::string_view document)
{
  auto doc = ojson::parse(document.begin(), document.end(), nullptr, false);
  if (doc.is_discarded())
    throw Error("malformed profile file");
  if (doc.is_object() && doc.contains("profiles"))
    doc = doc["profiles"];
  if (!doc.is_array())
    throw Error("profile file must be a JSON list");

  std::vector<VulnProfile> out;
  for (auto const& p : doc)
  {
    VulnProfile v;
    auto str = [&](char const* key, std::string& field) {
      if (p.contains(key))
        field = p.at(key).get<std::string>();
    };
    auto flag = [&](char const* key, bool& field) {
      if (p.contains(key))
        field = p.at(key).get<bool>();
    };
    auto ms = [&](char const* key, std::chrono::milliseconds& field) {
      if (p.contains(key))
        field = std::chrono::milliseconds(p.at(key).get<long long>());
    };
    str("label", v.label);
    if (v.label.empty())
      throw Error("profile without label");
    str("site_domain", v.site_domain);
    str("site_name", v.site_name);
    str("statement", v.statement);
    flag("include_domain", v.include_domain);
    flag("include_name", v.include_name);
    flag("include_address", v.include_address);
    str("version_line", v.version_line);
    flag("include_issued_at", v.include_issued_at);
    flag("include_expiration", v.include_expiration);
    str("field_separator", v.field_separator);
    if (p.contains("nonce_kind"))
      v.nonce_kind = enum_from(p["nonce_kind"].get<std::string>(), all_nonce_kinds, "nonce kind");
    if (p.contains("nonce_format"))
      v.nonce_format = enum_from(p["nonce_format"].get<std::string>(), all_formats, "nonce format");
    str("nonce_label", v.nonce_label);
    ms("nonce_ttl_ms", v.nonce_ttl);
    ms("time_window_ms", v.time_window);
    flag("no_expiry", v.no_expiry);
    if (p.contains("body_check"))
      v.body_check = enum_from(p["body_check"].get<std::string>(), all_body_checks, "body check");
    flag("message_check", v.message_check);
    flag("sig_check", v.sig_check);
    flag("addr_check", v.addr_check);
    ms("token_ttl_ms", v.token_ttl);
    if (p.contains("query_mode"))
      v.query_mode = enum_from(p["query_mode"].get<std::string>(), all_query_modes, "query mode");
    flag("address_in_header", v.address_in_header);
    out.push_back(std::move(v));
  }
  return out;
}

std::string dump_profiles(std::vector<VulnProfile> const& profiles)
{
  auto list = ojson::array();
  for (auto const& v : profiles)
  {
    ojson p;
    p["label"] = v.label;
    p["site_domain"] = v.site_domain;
    p["site_name"] = v.site_name;
    p["statement"] = v.statement;
    p["include_domain"] = v.include_domain;
    p["include_name"] = v.include_name;
    p["include_address"] = v.include_address;
    p["version_line"] = v.version_line;
    p["include_issued_at"] = v.include_issued_at;
    p["include_expiration"] = v.include_expiration;
    p["field_separator"] = v.field_separator;
    p["nonce_kind"] = std::string(to_string(v.nonce_kind));
    p["nonce_format"] = std::string(to_string(v.nonce_format));
    p["nonce_label"] = v.nonce_label;
    p["nonce_ttl_ms"] = v.nonce_ttl.count();
    p["time_window_ms"] = v.time_window.count();
    p["no_expiry"] = v.no_expiry;
    p["body_check"] = std::string(to_string(v.body_check));
    p["message_check"] = v.message_check;
    p["sig_check"] = v.sig_check;
    p["addr_check"] = v.addr_check;
    p["token_ttl_ms"] = v.token_ttl.count();
    p["query_mode"] = std::string(to_string(v.query_mode));
    p["address_in_header"] = v.address_in_header;
    list.push_back(std::move(p));
  }
  return list.dump(2) + "\n";
}

std::vector<LayoutPart> message_layout(VulnProfile const& profile)
{
  auto statement = profile.statement;
  if (profile.include_name && statement.find("{name}") == std::string::npos)
    statement = "Welcome to {name}!\n\n" + statement;
  if (profile.include_domain && statement.find("{domain}") == std::string::npos)
    statement += "\n\nURI: https://{domain}";
  replace_all(statement, "{name}", profile.site_name);
  replace_all(statement, "{domain}", profile.site_domain);

  std::vector<LayoutPart> parts;
  auto literal = [&](std::string text) {
    if (!parts.empty() && parts.back().slot == LayoutPart::Slot::Literal)
      parts.back().text += text;
    else
      parts.push_back({LayoutPart::Slot::Literal, std::move(text), {}});
  };
  bool first_field = true;
  auto line_break = [&] {
    literal(first_field ? "\n\n" : "\n");
    first_field = false;
  };
  auto slot = [&](LayoutPart::Slot kind, std::string const& label) {
    line_break();
    literal(label + ":" + profile.field_separator);
    parts.push_back({kind, {}, label + ":"});
  };

  literal(statement);
  if (profile.include_address)
    slot(LayoutPart::Slot::Address, "Wallet address");
  if (!profile.version_line.empty())
  {
    line_break();
    literal(profile.version_line);
  }
  if (profile.nonce_kind != NonceKind::None)
    slot(LayoutPart::Slot::Nonce, profile.nonce_label);
  if (profile.include_issued_at)
    slot(LayoutPart::Slot::IssuedAt, "Issued At");
  if (profile.include_expiration)
    slot(LayoutPart::Slot::ExpirationTime, "Expiration Time");
  return parts;
}

std::string compose_message(VulnProfile const& profile, SlotValues const& values)
{
  std::string out;
  for (auto const& part : message_layout(profile))
  {
    switch (part.slot)
    {
    case LayoutPart::Slot::Literal:
      out += part.text;
      break;
    case LayoutPart::Slot::Address:
      out += values.address;
      break;
    case LayoutPart::Slot::Nonce:
      out += values.nonce;
      break;
    case LayoutPart::Slot::IssuedAt:
      out += values.issued_at;
      break;
    case LayoutPart::Slot::ExpirationTime:
      out += values.expiration;
      break;
    }
  }
  return out;
}

std::string frontend_template(VulnProfile const& profile)
{
  SlotValues v;
  v.address = "{{ addr }}";
  v.nonce = profile.query_mode == QueryMode::Nonce ? "{{ nonce }}"
                                                   : generator_for(profile.nonce_format);
  v.issued_at = "{{ now_iso }}";
  v.expiration = "{{ now_iso }}";
  return compose_message(profile, v);
}

VulnProfile strict_profile(std::string label)
{
  VulnProfile p;
  p.label = std::move(label);
  p.site_domain = "strict.example";
  p.site_name = "Strictland";
  p.statement = "Sign in to {name} at https://{domain} to continue.";
  p.include_address = true;
  return p;
}
}

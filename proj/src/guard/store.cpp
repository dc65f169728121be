#include <w3a/guard.hpp>
#include <w3a/message.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace w3a::guard
{
namespace
{
using ordered = nlohmann::ordered_json;

std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

WildcardClass class_from_string(std::string const& s)
{
  for (auto c : {WildcardClass::Address, WildcardClass::Number, WildcardClass::DateTime,
                 WildcardClass::Uuid, WildcardClass::Generic, WildcardClass::Span})
    if (to_string(c) == s)
      return c;
  throw StoreError("unknown wildcard class: " + s);
}

ordered to_node(MessageTemplate const& t)
{
  auto tokens = ordered::array();
  std::string pending;
  auto flush = [&] {
    if (!pending.empty())
      tokens.push_back({{"lit", pending}});
    pending.clear();
  };
  for (auto const& tok : t.tokens)
  {
    if (tok.literal)
    {
      pending += tok.text;
      continue;
    }
    flush();
    tokens.push_back({{"wc", to_string(tok.wildcard)}});
  }
  flush();
  ordered node;
  node["tokens"] = std::move(tokens);
  node["updated_at"] = message::format_time_value(message::NonceValueKind::DateTime, t.updated_at);
  node["sample_count"] = t.sample_count;
  return node;
}

MessageTemplate from_node(std::string const& domain, nlohmann::json const& node)
{
  MessageTemplate t;
  t.origin_domain = domain;
  for (auto const& tok : node.at("tokens"))
  {
    if (tok.contains("lit"))
      for (auto& piece : message::tokenize(tok.at("lit").get<std::string>()))
        t.tokens.push_back(TemplateToken::lit(std::move(piece)));
    else
      t.tokens.push_back(TemplateToken::wild(class_from_string(tok.at("wc").get<std::string>())));
  }
  auto const when = message::parse_time_value(node.value("updated_at", std::string{}));
  if (!when)
    throw StoreError("bad updated_at for " + domain);
  t.updated_at = *when;
  t.sample_count = node.value("sample_count", std::size_t{1});
  if (t.sample_count < 1)
    throw StoreError("sample_count must be at least 1 for " + domain);
  return t;
}

std::size_t literal_chars(MessageTemplate const& t)
{
  std::size_t n = 0;
  for (auto const& tok : t.tokens)
    n += tok.literal ? tok.text.size() : 0;
  return n;
}
}

std::string normalize_origin(std::string_view origin)
{
  auto s = lower(origin);
  if (auto const p = s.find("://"); p != std::string::npos)
    s.erase(0, p + 3);
  if (auto const p = s.find_first_of("/?#"); p != std::string::npos)
    s.erase(p);
  if (auto const p = s.rfind('@'); p != std::string::npos)
    s.erase(0, p + 1);
  if (auto const p = s.rfind(':'); p != std::string::npos && s.find(']') == std::string::npos)
    s.erase(p);
  if (s.starts_with("www."))
    s.erase(0, 4);
  while (!s.empty() && s.back() == '.')
    s.pop_back();
  return s;
}

std::string template_json(MessageTemplate const& t)
{
  return to_node(t).dump();
}

TemplateStore TemplateStore::from_json(std::string_view document)
{
  TemplateStore store;
  try
  {
    auto const doc = nlohmann::json::parse(document);
    if (!doc.is_object())
      throw StoreError("template store must be a JSON object");
    for (auto const& [domain, node] : doc.items())
    {
      auto t = from_node(domain, node);
      store.matchers_.insert_or_assign(domain, Matcher(t));
      store.templates_.insert_or_assign(domain, std::move(t));
    }
  }
  catch (nlohmann::json::exception const& e)
  {
    throw StoreError(std::string("malformed template store: ") + e.what());
  }
  return store;
}

std::string TemplateStore::to_json() const
{
  ordered doc = ordered::object();
  for (auto const& [domain, t] : templates_)
    doc[domain] = to_node(t);
  return doc.dump(1) + "\n";
}

TemplateStore TemplateStore::load(std::filesystem::path const& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void TemplateStore::save(std::filesystem::path const& path) const
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw StoreError("cannot write " + tmp.string());
    out << to_json();
    out.flush();
    if (!out)
      throw StoreError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw StoreError("cannot replace " + path.string() + ": " + ec.message());
}

void TemplateStore::record_login(std::string const& origin_domain, std::string_view message,
                                 std::chrono::system_clock::time_point now)
{
  auto const domain = normalize_origin(origin_domain);
  auto const it = templates_.find(domain);
  auto t = it == templates_.end() ? template_of(domain, message, now)
                                  : extract_template(it->second, message, now);
  matchers_.insert_or_assign(domain, Matcher(t));
  templates_.insert_or_assign(domain, std::move(t));
}

AlertDecision check_signature_request(std::string_view message, std::string const& origin_domain,
                                      TemplateStore const& store)
{
  AlertDecision out;
  auto const origin = normalize_origin(origin_domain);
  out.yellow = origin.empty() || lower(message).find(origin) == std::string::npos;

  // Several foreign templates may match; the most specific one names the victim.
  std::size_t best = 0;
  for (auto const& [domain, t] : store.templates())
  {
    if (domain == origin || !store.matchers().at(domain).matches(message))
      continue;
    auto const weight = literal_chars(t) + 1;
    if (weight > best)
    {
      best = weight;
      out.red = AlertDecision::Red{domain};
    }
  }
  return out;
}
}

#include <w3a/guard.hpp>
#include <w3a/message.hpp>

#include <algorithm>

namespace w3a::guard
{
namespace
{
std::regex const& compiled(WildcardClass c)
{
  static std::map<WildcardClass, std::regex> const table = [] {
    std::map<WildcardClass, std::regex> t;
    for (auto k : {WildcardClass::Address, WildcardClass::Number, WildcardClass::DateTime,
                   WildcardClass::Uuid, WildcardClass::Generic, WildcardClass::Span})
      t.emplace(k, std::regex(std::string(pattern_of(k))));
    return t;
  }();
  return table.at(c);
}

WildcardClass join(WildcardClass a, WildcardClass b)
{
  if (a == WildcardClass::Span || b == WildcardClass::Span)
    return WildcardClass::Span;
  return a == b ? a : WildcardClass::Generic;
}

WildcardClass class_of_token(TemplateToken const& t)
{
  return t.literal ? class_of(t.text) : t.wildcard;
}

bool pairs_with(TemplateToken const& t, std::string const& token)
{
  if (t.literal)
    return t.text == token;
  return t.wildcard != WildcardClass::Span && !message::is_space_token(token);
}

// Exact literal equality is worth more than a wildcard pairing, so literal
// anchors win when both alignments are possible.
std::vector<std::size_t> align(std::vector<TemplateToken> const& a,
                               std::vector<std::string> const& b)
{
  auto const n = a.size();
  auto const m = b.size();
  auto weight = [&](std::size_t i, std::size_t j) -> std::uint32_t {
    if (!pairs_with(a[i], b[j]))
      return 0;
    return a[i].literal ? 2 : 1;
  };
  std::vector<std::vector<std::uint32_t>> best(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
    {
      auto v = std::max(best[i + 1][j], best[i][j + 1]);
      if (auto const w = weight(i, j))
        v = std::max(v, best[i + 1][j + 1] + w);
      best[i][j] = v;
    }

  std::vector<std::size_t> pair(n, std::string::npos);
  std::size_t i = 0, j = 0;
  while (i < n && j < m)
  {
    auto const w = weight(i, j);
    if (w && best[i][j] == best[i + 1][j + 1] + w)
      pair[i++] = j++;
    else if (best[i + 1][j] >= best[i][j + 1])
      ++i;
    else
      ++j;
  }
  return pair;
}

void append(std::vector<TemplateToken>& out, TemplateToken t)
{
  if (!t.literal && t.wildcard == WildcardClass::Span && !out.empty() && !out.back().literal &&
      out.back().wildcard == WildcardClass::Span)
    return;
  out.push_back(std::move(t));
}

// Tokens between two alignment anchors.
void merge_gap(std::vector<TemplateToken>& out, std::span<const TemplateToken> stored,
               std::span<const std::string> fresh)
{
  if (stored.empty() && fresh.empty())
    return;
  if (stored.size() == 1 && fresh.size() == 1 && !message::is_space_token(fresh[0]) &&
      !(stored[0].literal && message::is_space_token(stored[0].text)))
  {
    append(out, TemplateToken::wild(join(class_of_token(stored[0]), class_of(fresh[0]))));
    return;
  }
  append(out, TemplateToken::wild(WildcardClass::Span));
}

std::string escape_regex(std::string_view text)
{
  std::string out;
  for (char c : text)
  {
    if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos)
      out += '\\';
    out += c;
  }
  return out;
}
}

std::string_view to_string(WildcardClass c)
{
  switch (c)
  {
  case WildcardClass::Address:
    return "addr";
  case WildcardClass::Number:
    return "num";
  case WildcardClass::DateTime:
    return "dt";
  case WildcardClass::Uuid:
    return "uuid";
  case WildcardClass::Generic:
    return "any";
  case WildcardClass::Span:
    return "span";
  }
  return "any";
}

std::string_view pattern_of(WildcardClass c)
{
  switch (c)
  {
  case WildcardClass::Address:
    return "0x[0-9a-fA-F]{40}";
  case WildcardClass::Number:
    return "[0-9]+";
  case WildcardClass::DateTime:
    return "[0-9]{4}-[0-9]{2}-[0-9]{2}[Tt][0-9]{2}:[0-9]{2}:[0-9]{2}(?:\\.[0-9]+)?"
           "(?:[Zz]|[+-][0-9]{2}:[0-9]{2})";
  case WildcardClass::Uuid:
    return "[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}";
  case WildcardClass::Generic:
    return "\\S+";
  case WildcardClass::Span:
    return "[\\s\\S]*?";
  }
  return "\\S+";
}

bool accepts(WildcardClass c, std::string_view token)
{
  return std::regex_match(token.begin(), token.end(), compiled(c));
}

WildcardClass class_of(std::string_view token)
{
  for (auto c : {WildcardClass::Address, WildcardClass::Uuid, WildcardClass::DateTime,
                 WildcardClass::Number})
    if (accepts(c, token))
      return c;
  return WildcardClass::Generic;
}

MessageTemplate template_of(std::string const& origin_domain, std::string_view message,
                            std::chrono::system_clock::time_point now)
{
  MessageTemplate t;
  t.origin_domain = origin_domain;
  for (auto& tok : message::tokenize(message))
    t.tokens.push_back(TemplateToken::lit(std::move(tok)));
  t.updated_at = now;
  return t;
}

MessageTemplate extract_template(MessageTemplate const& stored, std::string_view new_message,
                                 std::chrono::system_clock::time_point now)
{
  auto const fresh = message::tokenize(new_message);
  auto const& old = stored.tokens;
  auto const pair = align(old, fresh);

  MessageTemplate out;
  out.origin_domain = stored.origin_domain;
  out.updated_at = now;
  out.sample_count = stored.sample_count + 1;

  std::size_t gi = 0, gj = 0; // start of the pending gap in old / fresh
  for (std::size_t i = 0; i < old.size(); ++i)
  {
    if (pair[i] == std::string::npos)
      continue;
    auto const j = pair[i];
    merge_gap(out.tokens, std::span(old).subspan(gi, i - gi),
              std::span(fresh).subspan(gj, j - gj));
    auto const& t = old[i];
    if (t.literal || accepts(t.wildcard, fresh[j]))
      append(out.tokens, t);
    else
      append(out.tokens, TemplateToken::wild(join(t.wildcard, class_of(fresh[j]))));
    gi = i + 1;
    gj = j + 1;
  }
  merge_gap(out.tokens, std::span(old).subspan(gi), std::span(fresh).subspan(gj));
  return out;
}

Matcher::Matcher(MessageTemplate const& t)
{
  for (auto const& tok : t.tokens)
    pattern_ += tok.literal ? escape_regex(tok.text) : std::string(pattern_of(tok.wildcard));
  regex_ = std::regex(pattern_, std::regex::ECMAScript | std::regex::optimize);
}

bool Matcher::matches(std::string_view message) const
{
  return std::regex_search(message.begin(), message.end(), regex_);
}
}

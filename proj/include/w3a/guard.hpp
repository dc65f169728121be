#pragma once

#include <w3a/error.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Wallet-side defence: per-domain login message templates, fuzzy matching of
// new signature requests against them, and red / yellow alert decisions.
namespace w3a::guard
{
enum class WildcardClass
{
  Address,
  Number,
  DateTime,
  Uuid,
  Generic,
  Span, // any run of characters, whitespace included (gaps of unequal length)
};

std::string_view to_string(WildcardClass c);
std::string_view pattern_of(WildcardClass c);

struct TemplateToken
{
  bool literal = true;
  std::string text; // literal text
  WildcardClass wildcard = WildcardClass::Generic;

  static TemplateToken lit(std::string text)
  {
    return {true, std::move(text), WildcardClass::Generic};
  }
  static TemplateToken wild(WildcardClass c)
  {
    return {false, {}, c};
  }
  friend bool operator==(TemplateToken const&, TemplateToken const&) = default;
};

// The narrowest class whose pattern accepts the token.
WildcardClass class_of(std::string_view token);
bool accepts(WildcardClass c, std::string_view token);

struct MessageTemplate
{
  std::string origin_domain;
  std::vector<TemplateToken> tokens;
  std::chrono::system_clock::time_point updated_at{};
  std::size_t sample_count = 1;
};

// All-literal template of a single message.
MessageTemplate template_of(std::string const& origin_domain, std::string_view message,
                            std::chrono::system_clock::time_point now =
                              std::chrono::system_clock::now());

// Word-by-word generalisation of `stored` by a new message from the same origin.
MessageTemplate extract_template(MessageTemplate const& stored, std::string_view new_message,
                                 std::chrono::system_clock::time_point now =
                                   std::chrono::system_clock::now());

// Unanchored regex over the template; finds the template inside longer messages.
class Matcher
{
public:
  explicit Matcher(MessageTemplate const& t);

  bool matches(std::string_view message) const;
  std::string const& pattern() const
  {
    return pattern_;
  }

private:
  std::string pattern_;
  std::regex regex_;
};

// Host part of an origin, lowercased, without scheme, "www.", port or path.
std::string normalize_origin(std::string_view origin);

struct AlertDecision
{
  struct Red
  {
    std::string victim_domain;
  };
  std::optional<Red> red;    // the message belongs to another site
  bool yellow = false;       // the message does not name the requesting site
};

class StoreError : public Error
{
public:
  using Error::Error;
};

// One template per domain. Single writer; const members may be used concurrently.
class TemplateStore
{
public:
  TemplateStore() = default;

  // Missing file -> empty store. Malformed content throws StoreError.
  static TemplateStore load(std::filesystem::path const& path);
  // Writes a temp file next to `path` and renames it over the original.
  void save(std::filesystem::path const& path) const;

  static TemplateStore from_json(std::string_view document);
  std::string to_json() const;

  void record_login(std::string const& origin_domain, std::string_view message,
                    std::chrono::system_clock::time_point now = std::chrono::system_clock::now());

  std::map<std::string, MessageTemplate> const& templates() const
  {
    return templates_;
  }
  std::map<std::string, Matcher> const& matchers() const
  {
    return matchers_;
  }
  std::size_t size() const
  {
    return templates_.size();
  }

private:
  std::map<std::string, MessageTemplate> templates_;
  std::map<std::string, Matcher> matchers_;
};

// {"tokens":[{"lit":...}|{"wc":...}],"updated_at","sample_count"}; adjacent
// literals are merged.
std::string template_json(MessageTemplate const& t);

AlertDecision check_signature_request(std::string_view message, std::string const& origin_domain,
                                      TemplateStore const& store);
}

#include <w3a/message.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace w3a::message
{
namespace
{
bool is_space(char c)
{
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_hex(char c)
{
  return std::isxdigit(static_cast<unsigned char>(c)) != 0;
}

bool digits_at(std::string_view s, std::size_t pos, std::size_t n)
{
  if (pos + n > s.size())
    return false;
  return std::all_of(s.begin() + pos, s.begin() + pos + n,
                     [](char c) { return c >= '0' && c <= '9'; });
}

int number_at(std::string_view s, std::size_t pos, std::size_t n)
{
  int v = 0;
  for (std::size_t i = 0; i < n; ++i)
    v = v * 10 + (s[pos + i] - '0');
  return v;
}
}

std::vector<std::string> tokenize(std::string_view text)
{
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size())
  {
    auto const space = is_space(text[i]);
    auto j = i;
    while (j < text.size() && is_space(text[j]) == space)
      ++j;
    out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_space_token(std::string_view token)
{
  return !token.empty() && std::all_of(token.begin(), token.end(), is_space);
}

bool is_digits(std::string_view token)
{
  return !token.empty() && digits_at(token, 0, token.size());
}

bool is_address_token(std::string_view token)
{
  return token.size() == 42 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X') &&
         std::all_of(token.begin() + 2, token.end(), is_hex);
}

bool is_uuid_token(std::string_view token)
{
  if (token.size() != 36)
    return false;
  for (std::size_t i = 0; i < token.size(); ++i)
  {
    auto const dash = i == 8 || i == 13 || i == 18 || i == 23;
    if (dash ? token[i] != '-' : !is_hex(token[i]))
      return false;
  }
  return true;
}

// full-date "T" partial-time time-offset; fractional seconds optional.
bool is_rfc3339(std::string_view s)
{
  if (s.size() < 20)
    return false;
  if (!digits_at(s, 0, 4) || s[4] != '-' || !digits_at(s, 5, 2) || s[7] != '-' ||
      !digits_at(s, 8, 2) || (s[10] != 'T' && s[10] != 't') || !digits_at(s, 11, 2) ||
      s[13] != ':' || !digits_at(s, 14, 2) || s[16] != ':' || !digits_at(s, 17, 2))
    return false;

  auto const month = number_at(s, 5, 2);
  auto const day = number_at(s, 8, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31 || number_at(s, 11, 2) > 23 ||
      number_at(s, 14, 2) > 59 || number_at(s, 17, 2) > 60)
    return false;

  std::size_t pos = 19;
  if (s[pos] == '.')
  {
    auto const start = ++pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9')
      ++pos;
    if (pos == start)
      return false;
  }
  if (pos == s.size())
    return false;
  if (s[pos] == 'Z' || s[pos] == 'z')
    return pos + 1 == s.size();
  if (s[pos] != '+' && s[pos] != '-')
    return false;
  return pos + 6 == s.size() && digits_at(s, pos + 1, 2) && s[pos + 3] == ':' &&
         digits_at(s, pos + 4, 2) && number_at(s, pos + 1, 2) <= 23 &&
         number_at(s, pos + 4, 2) <= 59;
}

NonceValueKind classify_nonce_value(std::string_view token)
{
  if (is_digits(token) && token.size() == 13)
    return NonceValueKind::Timestamp13;
  if (is_digits(token) && token.size() == 10)
    return NonceValueKind::Timestamp10;
  if (is_rfc3339(token))
    return NonceValueKind::DateTime;
  return NonceValueKind::Random;
}

std::string_view to_string(NonceValueKind kind)
{
  switch (kind)
  {
  case NonceValueKind::Timestamp10:
    return "timestamp10";
  case NonceValueKind::Timestamp13:
    return "timestamp13";
  case NonceValueKind::DateTime:
    return "datetime";
  case NonceValueKind::Random:
    return "random";
  }
  return "random";
}

std::string format_time_value(NonceValueKind kind, std::chrono::system_clock::time_point t)
{
  using namespace std::chrono;
  auto const ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
  switch (kind)
  {
  case NonceValueKind::Timestamp10:
    return std::to_string(ms / 1000);
  case NonceValueKind::Timestamp13:
    return std::to_string(ms);
  case NonceValueKind::DateTime: {
    auto const secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms % 1000));
    return buf;
  }
  case NonceValueKind::Random:
    break;
  }
  throw std::invalid_argument("random values carry no time");
}

std::optional<std::chrono::system_clock::time_point> parse_time_value(std::string_view token)
{
  using namespace std::chrono;
  switch (classify_nonce_value(token))
  {
  case NonceValueKind::Timestamp10:
    return system_clock::time_point(seconds(std::stoll(std::string(token))));
  case NonceValueKind::Timestamp13:
    return system_clock::time_point(milliseconds(std::stoll(std::string(token))));
  case NonceValueKind::DateTime: {
    std::tm tm{};
    tm.tm_year = number_at(token, 0, 4) - 1900;
    tm.tm_mon = number_at(token, 5, 2) - 1;
    tm.tm_mday = number_at(token, 8, 2);
    tm.tm_hour = number_at(token, 11, 2);
    tm.tm_min = number_at(token, 14, 2);
    tm.tm_sec = number_at(token, 17, 2);
    auto t = system_clock::from_time_t(timegm(&tm));
    std::size_t pos = 19;
    if (token[pos] == '.')
    {
      ++pos;
      int frac = 0, digits = 0;
      while (pos < token.size() && token[pos] >= '0' && token[pos] <= '9')
      {
        if (digits < 3)
        {
          frac = frac * 10 + (token[pos] - '0');
          ++digits;
        }
        ++pos;
      }
      while (digits++ < 3)
        frac *= 10;
      t += milliseconds(frac);
    }
    if (token[pos] == '+' || token[pos] == '-')
    {
      auto const offset = minutes(number_at(token, pos + 1, 2) * 60 + number_at(token, pos + 4, 2));
      t += token[pos] == '+' ? -offset : offset;
    }
    return t;
  }
  case NonceValueKind::Random:
    break;
  }
  return std::nullopt;
}
}

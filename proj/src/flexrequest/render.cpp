#include <w3a/flexrequest.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <random>

namespace w3a::flex
{
namespace
{
constexpr std::string_view open_mark = "{{ ";
constexpr std::string_view close_mark = " }}";
constexpr int max_depth = 8;

struct Placeholder
{
  std::size_t begin;
  std::size_t end;
  std::string_view key;
};

bool valid_key_char(char c)
{
  return c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '{' && c != '}';
}

std::optional<Placeholder> next_placeholder(std::string_view text, std::size_t from)
{
  while (true)
  {
    auto const open = text.find(open_mark, from);
    if (open == std::string_view::npos)
      return std::nullopt;
    auto const key_begin = open + open_mark.size();
    auto const close = text.find(close_mark, key_begin);
    if (close == std::string_view::npos)
      return std::nullopt;
    auto const key = text.substr(key_begin, close - key_begin);
    if (!key.empty() && std::all_of(key.begin(), key.end(), valid_key_char))
      return Placeholder{open, close + close_mark.size(), key};
    from = open + 1;
  }
}

std::mt19937_64& rng()
{
  thread_local std::mt19937_64 engine{std::random_device{}()};
  return engine;
}

std::string random_chars(std::size_t n, std::string_view alphabet)
{
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out(n, '0');
  for (auto& c : out)
    c = alphabet[pick(rng())];
  return out;
}

std::optional<std::size_t> call_arg(std::string_view key, std::string_view name)
{
  if (!key.starts_with(name) || key.size() < name.size() + 3 || key[name.size()] != '(' ||
      key.back() != ')')
    return std::nullopt;
  auto const arg = key.substr(name.size() + 1, key.size() - name.size() - 2);
  std::size_t n = 0;
  auto const [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
  if (ec != std::errc() || ptr != arg.data() + arg.size() || n == 0 || n > 256)
    return std::nullopt;
  return n;
}

std::string json_escape(std::string const& value)
{
  auto quoted = nlohmann::json(value).dump();
  return quoted.substr(1, quoted.size() - 2);
}

class Renderer
{
public:
  Renderer(RequestItem const& item, SessionContext const& session, Bindings const& local)
    : item_(item), session_(session), local_(local)
  {
  }

  // json_mode: values that land inside a JSON string literal are escaped.
  std::string expand(std::string_view text, bool json_mode, int depth = 0)
  {
    std::string out;
    bool in_string = false;
    std::size_t pos = 0;
    auto scan_literal = [&](std::string_view lit) {
      for (std::size_t i = 0; i < lit.size(); ++i)
      {
        if (in_string && lit[i] == '\\')
          ++i;
        else if (lit[i] == '"')
          in_string = !in_string;
      }
    };
    while (auto ph = next_placeholder(text, pos))
    {
      auto const literal = text.substr(pos, ph->begin - pos);
      out += literal;
      if (json_mode)
        scan_literal(literal);
      auto value = resolve(std::string(ph->key), depth);
      out += json_mode && in_string ? json_escape(value) : value;
      pos = ph->end;
    }
    out += text.substr(pos);
    return out;
  }

private:
  std::string resolve(std::string const& key, int depth)
  {
    if (auto it = local_.find(key); it != local_.end())
      return it->second;
    if (auto it = session_.bindings.find(key); it != session_.bindings.end())
      return it->second;
    if (auto it = item_.inputs.find(key); it != item_.inputs.end())
    {
      if (depth >= max_depth)
        throw MissingKey(key);
      return expand(it->second, false, depth + 1);
    }
    if (auto it = generated_.find(key); it != generated_.end())
      return it->second;
    if (auto value = builtin_value(key))
      return generated_[key] = *value;
    throw MissingKey(key);
  }

  RequestItem const& item_;
  SessionContext const& session_;
  Bindings const& local_;
  // A generator referenced twice in one request yields one value.
  std::map<std::string, std::string> generated_;
};

bool looks_like_json(std::string_view body)
{
  auto const first = body.find_first_not_of(" \t\r\n");
  return first != std::string_view::npos && (body[first] == '{' || body[first] == '[');
}
}

std::vector<std::string> placeholder_keys(std::string_view text)
{
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (auto ph = next_placeholder(text, pos))
  {
    out.emplace_back(ph->key);
    pos = ph->end;
  }
  return out;
}

std::optional<std::string> builtin_value(std::string_view key)
{
  using namespace std::chrono;
  auto const now = system_clock::now();
  if (key == "now_ms")
    return std::to_string(duration_cast<milliseconds>(now.time_since_epoch()).count());
  if (key == "now_s")
    return std::to_string(duration_cast<seconds>(now.time_since_epoch()).count());
  if (key == "now_iso")
  {
    auto const t = system_clock::to_time_t(now);
    auto const ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, int(ms));
    return std::string(buf);
  }
  if (key == "uuid4")
  {
    auto hex = random_chars(32, "0123456789abcdef");
    hex[12] = '4';
    hex[16] = "89ab"[std::uniform_int_distribution<int>(0, 3)(rng())];
    return hex.substr(0, 8) + "-" + hex.substr(8, 4) + "-" + hex.substr(12, 4) + "-" +
           hex.substr(16, 4) + "-" + hex.substr(20);
  }
  if (auto n = call_arg(key, "rand_digits"))
    return random_chars(*n, "0123456789");
  if (auto n = call_arg(key, "rand_hex"))
    return random_chars(*n, "0123456789abcdef");
  return std::nullopt;
}

std::string render_text(std::string_view text, RequestItem const& item,
                        SessionContext const& session, Bindings const& local)
{
  return Renderer(item, session, local).expand(text, false);
}

ConcreteRequest render(RequestItem const& item, SessionContext const& session,
                       Bindings const& local)
{
  Renderer r(item, session, local);
  ConcreteRequest out;
  out.role = item.role;
  out.method = item.method;
  out.url = r.expand(item.url, false);
  for (auto const& [name, value] : item.headers)
    out.headers.emplace_back(name, r.expand(value, false));
  out.body = r.expand(item.body, looks_like_json(item.body));
  return out;
}

std::optional<std::string> SessionContext::get(std::string const& key) const
{
  auto it = bindings.find(key);
  if (it == bindings.end())
    return std::nullopt;
  return it->second;
}
}

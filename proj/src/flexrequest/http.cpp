#include <w3a/flexrequest.hpp>

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <thread>

namespace w3a::flex
{
namespace
{
bool iequals(std::string_view a, std::string_view b)
{
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool has_header(HeaderList const& headers, std::string_view name)
{
  return std::any_of(headers.begin(), headers.end(),
                     [&](auto const& h) { return iequals(h.first, name); });
}

std::optional<std::string> json_leaf(nlohmann::json const& node)
{
  if (node.is_null())
    return std::nullopt;
  if (node.is_string())
    return node.get<std::string>();
  return node.dump();
}
}

std::optional<std::string> Response::header(std::string_view name) const
{
  for (auto const& [k, v] : headers)
    if (iequals(k, name))
      return v;
  return std::nullopt;
}

std::optional<std::string> resolve_path(Response const& response, std::string_view path)
{
  if (path == "status")
    return std::to_string(response.status);
  if (path.starts_with("header:"))
    return response.header(path.substr(7));

  auto doc = nlohmann::json::parse(response.body, nullptr, false);
  if (doc.is_discarded())
    return std::nullopt;

  nlohmann::json const* node = &doc;
  std::size_t pos = 0;
  while (true)
  {
    auto const dot = path.find('.', pos);
    auto const seg = path.substr(pos, dot == std::string_view::npos ? path.npos : dot - pos);
    if (seg.empty())
      return std::nullopt;
    if (node->is_object())
    {
      auto it = node->find(std::string(seg));
      if (it == node->end())
        return std::nullopt;
      node = &*it;
    }
    else if (node->is_array())
    {
      std::size_t index = 0;
      auto const [ptr, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), index);
      if (ec != std::errc() || ptr != seg.data() + seg.size() || index >= node->size())
        return std::nullopt;
      node = &(*node)[index];
    }
    else
    {
      return std::nullopt;
    }
    if (dot == std::string_view::npos)
      break;
    pos = dot + 1;
  }
  return json_leaf(*node);
}

SessionContext extract_outputs(Response const& response,
                               std::map<std::string, std::string> const& outputs,
                               SessionContext session)
{
  for (auto const& [key, path] : outputs)
  {
    auto value = resolve_path(response, path);
    if (!value)
    {
      if (!session.trace.empty())
        session.trace.back().misses.push_back(key);
      continue;
    }
    if (!session.trace.empty())
      session.trace.back().extracted[key] = *value;
    session.bindings[key] = std::move(*value);
  }
  return session;
}

HeaderList header_profile(std::string_view name)
{
  if (name == "none" || name.empty())
    return {};
  if (name == "chrome-like")
    return {
      {"User-Agent", "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, "
                     "like Gecko) Chrome/116.0.0.0 Safari/537.36"},
      {"Accept", "application/json, text/plain, */*"},
      {"Accept-Language", "en-US,en;q=0.9"},
      {"sec-ch-ua", "\"Chromium\";v=\"116\", \"Not)A;Brand\";v=\"24\", \"Google Chrome\";v=\"116\""},
      {"sec-ch-ua-mobile", "?0"},
      {"sec-ch-ua-platform", "\"Windows\""},
      {"Sec-Fetch-Dest", "empty"},
      {"Sec-Fetch-Mode", "cors"},
      {"Sec-Fetch-Site", "same-site"},
    };
  throw Error("unknown header profile '" + std::string(name) + "'");
}

void RateLimiter::wait_turn(std::string const& host, std::chrono::milliseconds interval)
{
  if (interval.count() <= 0)
    return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    auto const now = std::chrono::steady_clock::now();
    auto& next = next_slot_[host];
    slot = std::max(now, next);
    next = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

UrlParts split_url(std::string_view url)
{
  UrlParts out;
  auto const scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos)
    throw Error("url without scheme: " + std::string(url));
  out.scheme = std::string(url.substr(0, scheme_end));
  for (auto& c : out.scheme)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (out.scheme != "http" && out.scheme != "https")
    throw Error("unsupported scheme: " + out.scheme);

  auto rest = url.substr(scheme_end + 3);
  auto const path_begin = rest.find_first_of("/?");
  auto authority = rest.substr(0, path_begin);
  out.path = path_begin == std::string_view::npos ? "/" : std::string(rest.substr(path_begin));
  if (out.path.front() == '?')
    out.path.insert(out.path.begin(), '/');

  out.port = out.scheme == "https" ? 443 : 80;
  if (!authority.empty() && authority.front() == '[')
  {
    auto const close = authority.find(']');
    if (close == std::string_view::npos)
      throw Error("malformed host in url: " + std::string(url));
    out.host = std::string(authority.substr(1, close - 1));
    authority = authority.substr(close + 1);
    if (!authority.empty() && authority.front() == ':')
      authority.remove_prefix(1);
    else
      authority = {};
  }
  else
  {
    auto const colon = authority.rfind(':');
    out.host = std::string(authority.substr(0, colon));
    authority = colon == std::string_view::npos ? std::string_view{} : authority.substr(colon + 1);
  }
  if (!authority.empty())
  {
    int port = 0;
    auto const [ptr, ec] = std::from_chars(authority.data(), authority.data() + authority.size(), port);
    if (ec != std::errc() || ptr != authority.data() + authority.size() || port <= 0 || port > 65535)
      throw Error("bad port in url: " + std::string(url));
    out.port = port;
  }
  if (out.host.empty())
    throw Error("url without host: " + std::string(url));
  return out;
}

bool is_loopback(std::string_view host)
{
  return host == "localhost" || host == "::1" || host.starts_with("127.");
}

HttpClient::HttpClient(Policy policy, std::shared_ptr<RateLimiter> limiter)
  : policy_(std::move(policy)), limiter_(std::move(limiter))
{
  if (policy_.timeout.count() <= 0)
    throw Error("timeout must be positive");
  header_profile(policy_.headers_profile); // validate the name up front
  if (!limiter_)
    limiter_ = std::make_shared<RateLimiter>();
}

Response HttpClient::execute(ConcreteRequest const& request)
{
  auto const url = split_url(request.url);
  auto const interval = policy_.min_interval.value_or(
    is_loopback(url.host) ? std::chrono::milliseconds(0) : std::chrono::milliseconds(60000));
  limiter_->wait_turn(url.host + ":" + std::to_string(url.port), interval);
  ++requests_;

  auto const host = url.host.find(':') != std::string::npos ? "[" + url.host + "]" : url.host;
  httplib::Client client(url.scheme + "://" + host + ":" + std::to_string(url.port));
  client.set_connection_timeout(policy_.timeout);
  client.set_read_timeout(policy_.timeout);
  client.set_write_timeout(policy_.timeout);
  client.set_keep_alive(false);

  httplib::Request req;
  req.method = request.method;
  req.path = url.path;
  for (auto const& [k, v] : request.headers)
    req.headers.emplace(k, v);
  for (auto const& [k, v] : header_profile(policy_.headers_profile))
    if (!has_header(request.headers, k))
      req.headers.emplace(k, v);
  if (!request.body.empty())
  {
    req.body = request.body;
    if (!has_header(request.headers, "Content-Type"))
    {
      auto const first = request.body.find_first_not_of(" \t\r\n");
      auto const json = first != std::string::npos &&
                        (request.body[first] == '{' || request.body[first] == '[');
      req.headers.emplace("Content-Type", json ? "application/json" : "text/plain");
    }
  }

  auto const started = std::chrono::steady_clock::now();
  auto result = client.send(req);
  if (!result)
  {
    auto const err = result.error();
    auto const elapsed = std::chrono::steady_clock::now() - started;
    auto const timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= policy_.timeout * 9 / 10);
    throw TransportError(timed_out ? TransportError::Kind::Timeout
                                   : TransportError::Kind::Network,
                         request.url + ": " + httplib::to_string(err));
  }

  Response out;
  out.status = result->status;
  out.body = result->body;
  for (auto const& [k, v] : result->headers)
    out.headers.emplace_back(k, v);
  return out;
}
}

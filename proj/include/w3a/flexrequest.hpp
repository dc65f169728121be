#pragma once

#include <w3a/error.hpp>

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Templated HTTP requests with "{{ key }}" substitution, a session context
// threaded through QUERY -> AUTH -> ACCESS, and response value extraction.
namespace w3a::flex
{
enum class Role
{
  Query,
  Auth,
  Access,
};

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view text);

using Bindings = std::map<std::string, std::string>;
using HeaderList = std::vector<std::pair<std::string, std::string>>;

struct RequestItem
{
  Role role = Role::Auth;
  std::string method = "POST";
  std::string url;
  HeaderList headers;
  std::string body;
  Bindings inputs;                           // key -> default value
  std::map<std::string, std::string> outputs; // key -> response path
};

struct TargetConfig
{
  std::string label;
  std::string host;          // the site's domain, used as a parse hint
  std::string expected_name; // the site's display name, used as a parse hint
  std::string token_key = "token";
  std::vector<RequestItem> requests;

  RequestItem const* find(Role role) const;
};

class ParseError : public Error
{
public:
  ParseError(std::string const& what, std::size_t line, std::size_t column);

  std::size_t line() const
  {
    return line_;
  }
  std::size_t column() const
  {
    return column_;
  }

private:
  std::size_t line_;
  std::size_t column_;
};

class InvalidTarget : public Error
{
public:
  using Error::Error;
};

class MissingKey : public Error
{
public:
  explicit MissingKey(std::string key);

  std::string const& key() const
  {
    return key_;
  }

private:
  std::string key_;
};

// Collection file: {"targets":[{"label","host","expected_name","token_key",
// "requests":[{"role","method","url","headers":{},"body","inputs":{},"outputs":{}}]}]}
std::vector<TargetConfig> load_targets(std::string_view document);
std::string dump_targets(std::span<const TargetConfig> targets);

// Keys referenced as "{{ key }}" in the text, in order of appearance.
std::vector<std::string> placeholder_keys(std::string_view text);

// now_ms, now_s, now_iso, uuid4, rand_digits(n), rand_hex(n).
std::optional<std::string> builtin_value(std::string_view key);

struct ConcreteRequest
{
  Role role = Role::Auth;
  std::string method;
  std::string url;
  HeaderList headers;
  std::string body;
};

struct Response
{
  int status = 0;
  HeaderList headers;
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
};

struct TraceEntry
{
  Role role = Role::Auth;
  ConcreteRequest request;
  int status = 0;          // 0 when no response was received
  std::string error;       // transport or render failure, empty on success
  Bindings extracted;
  std::vector<std::string> misses; // output keys whose path did not resolve
  std::string response_body;
  std::chrono::milliseconds elapsed{0};
};

struct SessionContext
{
  Bindings bindings;
  std::vector<TraceEntry> trace;

  std::optional<std::string> get(std::string const& key) const;
};

// Resolution order: local, then session, then the item's inputs (which may
// themselves contain placeholders), then built-in generators. Inside a JSON
// body, values landing in a string literal are JSON-escaped.
ConcreteRequest render(RequestItem const& item, SessionContext const& session,
                       Bindings const& local = {});

// Renders a single template string with the same precedence as render().
std::string render_text(std::string_view text, RequestItem const& item,
                        SessionContext const& session, Bindings const& local = {});

// Resolves "status", "header:<name>" or a dotted JSON path ("data.auth.message",
// "items.0.id"). Returns nullopt when the path does not resolve.
std::optional<std::string> resolve_path(Response const& response, std::string_view path);

// Binds every resolvable output into the session. Misses are recorded on the
// newest trace entry, when there is one.
SessionContext extract_outputs(Response const& response,
                               std::map<std::string, std::string> const& outputs,
                               SessionContext session);

class TransportError : public Error
{
public:
  enum class Kind
  {
    Timeout,
    Network,
  };

  TransportError(Kind kind, std::string const& what) : Error(what), kind_(kind) {}

  Kind kind() const
  {
    return kind_;
  }

private:
  Kind kind_;
};

struct Policy
{
  std::chrono::milliseconds timeout{10000};
  // Unset: 60 s for remote hosts, none for loopback.
  std::optional<std::chrono::milliseconds> min_interval;
  std::string headers_profile = "chrome-like";
};

// Header set attached to every request unless the request sets the same name.
HeaderList header_profile(std::string_view name);

// Spaces consecutive requests to one host by at least the given interval.
// Shared by every sequence that runs concurrently.
class RateLimiter
{
public:
  void wait_turn(std::string const& host, std::chrono::milliseconds interval);

private:
  std::mutex mutex_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_slot_;
};

struct UrlParts
{
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path; // includes the query string
};

UrlParts split_url(std::string_view url);
bool is_loopback(std::string_view host);

class HttpClient
{
public:
  explicit HttpClient(Policy policy = {},
                      std::shared_ptr<RateLimiter> limiter = std::make_shared<RateLimiter>());

  // Throws TransportError on timeout or connection failure.
  Response execute(ConcreteRequest const& request);

  Policy const& policy() const
  {
    return policy_;
  }
  std::size_t request_count() const
  {
    return requests_.load();
  }

private:
  Policy policy_;
  std::shared_ptr<RateLimiter> limiter_;
  std::atomic<std::size_t> requests_{0};
};

// Renders, executes and extracts one role, appending a trace entry. Render and
// transport failures are recorded in the trace instead of being thrown.
TraceEntry const& step(TargetConfig const& target, Role role, HttpClient& client,
                       SessionContext& session, Bindings const& local = {});

struct SequenceOptions
{
  std::map<Role, Bindings> overrides;
  std::set<Role> required; // a failure in one of these roles stops the run
  std::function<void(Role, SessionContext&, Bindings& local)> before;
  std::function<void(Role, SessionContext&)> after;
};

// QUERY -> AUTH -> ACCESS, skipping roles the target does not define.
SessionContext run_sequence(TargetConfig const& target, HttpClient& client,
                            SequenceOptions const& options = {});
}

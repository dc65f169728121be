#pragma once

#include <w3a/error.hpp>
#include <w3a/flexrequest.hpp>
#include <w3a/message.hpp>

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

// Reference Web3-authentication servers whose verification can be weakened
// knob by knob. They are the ground truth for the scanner and the guard.
namespace w3a::sim
{
using Clock = std::function<std::chrono::system_clock::time_point()>;

enum class NonceKind
{
  None,      // the message carries no nonce
  OneTime,   // server record, bound to the requesting address, consumed on use
  Temporary, // server record, reusable by anyone until the ttl elapses
  TimeBased, // client-side time value checked against a window
  Unchecked, // present in the message, never verified
};

enum class NonceFormat
{
  Uuid,
  Digits8,
  Hex8,
  Timestamp10,
  Timestamp13,
  DateTime,
};

enum class BodyCheck
{
  Exact,         // the whole message must match the issued layout
  RegexContains, // the issued layout must occur somewhere in the message
  None,          // only the labelled fields have to be present
};

enum class QueryMode
{
  Message, // /query returns the full message
  Nonce,   // /query returns only the nonce; the front-end composes the message
  None,    // the front-end composes the message from scratch
};

std::string_view to_string(NonceKind v);
std::string_view to_string(NonceFormat v);
std::string_view to_string(BodyCheck v);
std::string_view to_string(QueryMode v);

struct VulnProfile
{
  std::string label;
  std::string site_domain;
  std::string site_name;
  // "{name}" and "{domain}" are substituted. With include_name/include_domain
  // set and no placeholder, a greeting / URI line is added.
  std::string statement;
  bool include_domain = true;
  bool include_name = true;
  bool include_address = false;
  std::string version_line; // e.g. "Web3 Token Version: 2"; empty for none
  bool include_issued_at = false;
  bool include_expiration = false;
  std::string field_separator = " "; // between a label and its value

  NonceKind nonce_kind = NonceKind::OneTime;
  NonceFormat nonce_format = NonceFormat::Uuid;
  std::string nonce_label = "Nonce";
  std::chrono::milliseconds nonce_ttl{900000};  // Temporary
  std::chrono::milliseconds time_window{60000}; // TimeBased, either direction
  bool no_expiry = false; // TimeBased: only future values (and absence) are refused

  BodyCheck body_check = BodyCheck::Exact;
  bool message_check = true;
  bool sig_check = true;
  bool addr_check = true;
  std::chrono::milliseconds token_ttl{3600000};

  QueryMode query_mode = QueryMode::Message;
  bool address_in_header = false; // AUTH address travels as x-viewer-addr
};

// Profile files are JSON lists of profile objects; absent keys take defaults.
std::vector<VulnProfile> load_profiles(std::string_view document);
std::string dump_profiles(std::vector<VulnProfile> const& profiles);

// One piece of a message layout: literal text, or a slot filled per message.
struct LayoutPart
{
  enum class Slot
  {
    Literal,
    Address,
    Nonce,
    IssuedAt,
    ExpirationTime,
  };
  Slot slot = Slot::Literal;
  std::string text;  // literal text; empty for slots
  std::string label; // for slots: the label text preceding the value
};

std::vector<LayoutPart> message_layout(VulnProfile const& profile);

struct SlotValues
{
  std::string address;
  std::string nonce;
  std::string issued_at;
  std::string expiration;
};

std::string compose_message(VulnProfile const& profile, SlotValues const& values);

// The message as a front-end would build it, with FlexRequest placeholders
// ({{ addr }}, {{ nonce }}, generators) in the slots.
std::string frontend_template(VulnProfile const& profile);

enum class Rejection
{
  None,
  Malformed,
  Signature,
  Address,
  Message,
  Body,
  Nonce,
};

std::string_view to_string(Rejection r);

struct QueryResult
{
  std::string message; // empty in nonce-only mode
  std::string nonce;   // empty when the profile has no nonce
};

struct AuthResult
{
  Rejection rejection = Rejection::None;
  std::string reason;
  std::string token;
  std::string address; // identity the token was issued to

  bool ok() const
  {
    return rejection == Rejection::None;
  }
};

struct AccessInfo
{
  std::string address;
  std::string profile;
};

// Per-profile server state and handlers, independent of HTTP. Thread-safe.
class ProfileServer
{
public:
  explicit ProfileServer(VulnProfile profile, Clock clock = {});

  VulnProfile const& profile() const
  {
    return profile_;
  }

  // Throws Error when the address is not an 0x-address.
  QueryResult handle_query(std::string const& address);
  AuthResult handle_auth(std::string const& address, std::string const& message,
                         std::string const& signature);
  std::optional<AccessInfo> handle_access(std::string const& token);

private:
  struct NonceRecord
  {
    std::string address;
    std::chrono::system_clock::time_point issued_at;
    bool used = false;
  };
  struct TokenRecord
  {
    std::string address;
    std::chrono::system_clock::time_point expires_at;
  };

  std::string fresh_nonce(std::chrono::system_clock::time_point now) const;
  Rejection check_nonce(std::string const& value, std::string const& identity,
                        std::chrono::system_clock::time_point now, std::string& reason);

  VulnProfile profile_;
  Clock clock_;
  std::mutex mutex_;
  std::map<std::string, NonceRecord> nonces_;
  std::map<std::string, TokenRecord> tokens_;
};

// Serves many profiles on one port under /p/<label>/{query,auth,access}.
class SimServer
{
public:
  explicit SimServer(std::vector<VulnProfile> profiles, Clock clock = {});
  ~SimServer();

  SimServer(SimServer const&) = delete;
  SimServer& operator=(SimServer const&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  int start(std::string const& host = "127.0.0.1", int port = 0);
  void stop();

  // Binds and serves on the calling thread until stop() is called.
  void run(std::string const& host, int port);

  int port() const
  {
    return port_;
  }
  std::string base_url() const;

  ProfileServer& profile(std::string const& label);
  std::vector<VulnProfile> profiles() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::map<std::string, std::unique_ptr<ProfileServer>> servers_;
  std::vector<std::string> order_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
  std::thread thread_;
};

// FlexRequest target describing how a client talks to the profile.
flex::TargetConfig target_for(VulnProfile const& profile, std::string const& base_url);

// One profile per row of the published per-site verdict table, in row order
// (labels "01-blur" … "29-babylons").
std::vector<VulnProfile> fixture_table2();

// The five nonce behaviours, one profile each, with a 2 s temporary ttl:
// labels "nonce-one-time", "nonce-temporary", "nonce-time-based",
// "nonce-unchecked", "nonce-none".
std::vector<VulnProfile> fixture_nonce_kinds();

// A profile with every protection on.
VulnProfile strict_profile(std::string label = "strict");
}

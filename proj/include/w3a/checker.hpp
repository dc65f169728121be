#pragma once

#include <w3a/crypto.hpp>
#include <w3a/error.hpp>
#include <w3a/flexrequest.hpp>
#include <w3a/message.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

// Message, nonce and signature checkers, nonce-type inference and the risk
// classifier.
namespace w3a::checker
{
enum class Verdict
{
  Pass,
  V2, // the field is not checked
  V3, // the field is checked with a flawed rule
  NotApplicable,
  Fail, // signature / address verification missing
};

enum class NonceKind
{
  OneTime,
  Temporary,
  TimeBased,
  InvalidNonce,
  NoNonce,
};

// Ordered: Low < Medium < High < Critical.
enum class RiskLevel
{
  Low,
  Medium,
  High,
  Critical,
};

std::string_view to_string(Verdict v);
std::string_view to_string(NonceKind k);
std::string_view to_string(RiskLevel r);

struct MessageFields
{
  bool has_domain = false;
  bool has_name = false;
  bool has_nonce = false;
};

struct ServerChecks
{
  Verdict message = Verdict::Pass;   // Pass | V2
  Verdict body = Verdict::Pass;      // Pass | V2 | V3
  Verdict nonce = Verdict::NotApplicable; // Pass | V2 | V3 | NotApplicable
  Verdict signature = Verdict::Pass; // Pass | Fail
  Verdict address = Verdict::Pass;   // Pass | Fail
};

// What one probe sent and got back. Holds no random content, so two scans of
// the same static target produce the same evidence.
struct Evidence
{
  std::string probe;   // e.g. "message.random", "nonce.step2"
  std::string outcome; // "token", "rejected", "inconclusive"
  int status = 0;
  std::string stage;   // server-reported rejection stage, when any
  std::string digest;  // keccak over method, url, status and stage (16 hex digits)
};

struct Finding
{
  MessageFields fields;
  ServerChecks checks;
  NonceKind nonce_kind = NonceKind::NoNonce;
  std::vector<Evidence> evidence;
  std::vector<std::string> notes;
};

struct ScanReport
{
  std::string label;
  Finding finding;
  RiskLevel risk = RiskLevel::Low;
  bool replay_risk = false;
  bool bmma_risk = false;
  std::map<std::string, std::chrono::milliseconds> timing; // per checker
  std::size_t requests = 0;
  std::optional<std::string> inconclusive; // why the target could not be assessed
};

class TargetBroken : public Error
{
public:
  using Error::Error;
};

class NotCombinable : public Error
{
public:
  using Error::Error;
};

class PreconditionViolation : public Error
{
public:
  using Error::Error;
};

// Deterministic test wallets: key i has seed keccak256("w3a-keypool:<seed>:<i>").
class KeyPool
{
public:
  explicit KeyPool(std::string const& seed = "0", std::size_t size = 3);

  crypto::KeyPair const& operator[](std::size_t i) const
  {
    return keys_.at(i);
  }
  std::size_t size() const
  {
    return keys_.size();
  }

private:
  std::vector<crypto::KeyPair> keys_;
};

struct ScanOptions
{
  std::uint64_t seed = 0; // drives the random strings used in probes
  std::function<std::chrono::system_clock::time_point()> clock;
};

// Shared state of the checkers while probing one target.
class Prober
{
public:
  Prober(flex::TargetConfig const& target, flex::HttpClient& client, KeyPool const& keys,
         ScanOptions options = {});

  struct Obtained
  {
    flex::SessionContext session;
    std::string message; // the message the site wants signed
    std::string address; // address the message was requested for
    bool ok = false;
  };

  // Fresh QUERY for the key's address (when the target has one); the message
  // comes from the session or, for front-end-composed messages, from the
  // AUTH item's "msg" input.
  Obtained obtain(crypto::KeyPair const& key, std::string const& probe);

  struct Attempt
  {
    bool issued = false;
    bool completed = false; // false when the request never got a response
  };

  // AUTH with the given address, message and signature hex, then ACCESS for
  // confirmation when a token was issued. Records evidence.
  Attempt authenticate(Obtained& obtained, std::string const& address, std::string const& message,
                       std::string const& signature, std::string const& probe);

  // Signs with the key and authenticates as the key's address.
  Attempt sign_and_authenticate(Obtained& obtained, crypto::KeyPair const& key,
                                std::string const& message, std::string const& probe);

  std::string random_text(std::size_t n);
  std::chrono::system_clock::time_point now() const;

  flex::TargetConfig const& target() const
  {
    return target_;
  }
  KeyPool const& keys() const
  {
    return keys_;
  }
  std::vector<Evidence>& evidence()
  {
    return evidence_;
  }
  std::vector<std::string>& notes()
  {
    return notes_;
  }

private:
  void record(std::string const& probe, flex::TraceEntry const& entry, std::string const& outcome);

  flex::TargetConfig const& target_;
  flex::HttpClient& client_;
  KeyPool const& keys_;
  ScanOptions options_;
  std::mt19937_64 rng_;
  std::vector<Evidence> evidence_;
  std::vector<std::string> notes_;
};

// Labelled variable fields of a message rebuilt as "label<sep>value" lines
// (nonce, version, timestamps, chain id, request id, address).
std::vector<std::string> labelled_field_lines(message::ParsedMessage const& parsed);

// A value of the same shape as `value`: current time for time-like values, a
// fresh uuid for uuids, random characters of the same class and length otherwise.
std::string similar_value(std::string const& value, std::chrono::system_clock::time_point now,
                          std::mt19937_64& rng);

// Fills message_fields has_domain/has_name and server_checks message/body.
void check_message(Prober& prober, Finding& finding);

// Fills has_nonce, nonce_kind and server_checks.nonce. Throws TargetBroken
// when the honest first AUTH fails.
void check_nonce(Prober& prober, Finding& finding);

// Fills server_checks signature/address.
void check_signature(Prober& prober, Finding& finding);

// The last delay at which a captured (message, signature) still
// authenticated; nullopt when none did or the schedule is empty.
std::optional<std::chrono::milliseconds>
probe_nonce_expiry(Prober& prober, NonceKind kind, std::vector<std::chrono::milliseconds> schedule);

RiskLevel classify_risk(Finding const& f);
bool flag_replay(Finding const& f);
bool flag_bmma(Finding const& f);

// message -> nonce -> signature on fresh QUERYs, then the classifiers.
ScanReport scan(flex::TargetConfig const& target, flex::HttpClient& client, KeyPool const& keys,
                ScanOptions const& options = {});

struct BmmaInput
{
  std::string label;
  Finding finding;
  std::string genuine_message;
  message::ParseHints hints;
};

std::string const& default_decoy();

// Decoy statement, then the genuine body of every containment-checked site,
// then the labelled fields of every body-unchecked site (time values renewed).
std::string craft_bmma_message(std::span<const BmmaInput> inputs,
                               std::chrono::system_clock::time_point now =
                                 std::chrono::system_clock::now(),
                               std::string const& decoy = default_decoy());

std::string report_json(std::span<const ScanReport> reports, bool include_timing = false);
std::string report_markdown(std::span<const ScanReport> reports);
}

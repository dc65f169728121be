#pragma once

#include <w3a/error.hpp>

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Decomposition of sign-in messages into statement, domain, name, nonce and
// the extension fields (address, version, chain id, timestamps, request id).
namespace w3a::message
{
enum class FieldKind
{
  Statement,
  Domain,
  Name,
  Nonce,
  Address,
  Version,
  ChainId,
  IssuedAt,
  ExpirationTime,
  NotBefore,
  RequestId,
};

std::string_view to_string(FieldKind kind);

// Nonce, address, the three timestamps and request id change between
// messages of one issuer; everything else belongs to the message body.
bool is_variable(FieldKind kind);

// Half-open byte range [begin, end).
struct Span
{
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const
  {
    return end - begin;
  }
  friend bool operator==(Span const&, Span const&) = default;
};

struct Field
{
  FieldKind kind;
  std::string value;
  Span span;
  // Text introducing the value ("Nonce:", "Wallet address:"); empty when the
  // field was recognised without a label.
  std::string label;
};

struct ParsedMessage
{
  std::string raw;
  std::vector<Field> fields; // sorted by span.begin, non-overlapping
  std::string body;          // raw with every variable field value excised

  Field const* find(FieldKind kind) const;
  bool has(FieldKind kind) const
  {
    return find(kind) != nullptr;
  }
};

struct ParseHints
{
  std::string expected_domain;
  std::string expected_name;
};

ParsedMessage parse_message(std::string_view raw, ParseHints const& hints = {});

// Reinserts the variable field values into the body. Inverse of the body
// excision performed by parse_message.
std::string reconstruct(ParsedMessage const& parsed);

enum class NonceValueKind
{
  Timestamp10,
  Timestamp13,
  DateTime,
  Random,
};

std::string_view to_string(NonceValueKind kind);

NonceValueKind classify_nonce_value(std::string_view token);

bool is_rfc3339(std::string_view token);

// Renders a point in time as a nonce value of the given kind (unix seconds,
// unix milliseconds, or RFC 3339 UTC with milliseconds). Random is rejected.
std::string format_time_value(NonceValueKind kind, std::chrono::system_clock::time_point t);

// Inverse of format_time_value for any time-like kind; nullopt otherwise.
std::optional<std::chrono::system_clock::time_point> parse_time_value(std::string_view token);
bool is_address_token(std::string_view token);
bool is_uuid_token(std::string_view token);
bool is_digits(std::string_view token);

// Splits on runs of whitespace; each run is kept as its own token so that
// concatenating the result yields the input.
std::vector<std::string> tokenize(std::string_view text);
bool is_space_token(std::string_view token);

class NeedMultipleSamples : public Error
{
public:
  NeedMultipleSamples() : Error("variable span detection needs at least two messages") {}
};

struct VariableSpan
{
  std::size_t token_index = 0; // position in the first message's token list
  NonceValueKind kind = NonceValueKind::Random;
  bool non_nonce = false;      // an 0x-address, reported but not a nonce
  std::vector<std::string> values; // the token in each message, input order

  friend bool operator==(VariableSpan const&, VariableSpan const&) = default;
};

// Token-level diff across messages from one issuer. Messages with equal token
// counts are compared position by position; otherwise each message is aligned
// to the first by longest common subsequence.
std::vector<VariableSpan> detect_variable_spans(std::span<const std::string> messages);
}

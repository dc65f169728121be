#include <w3a/checker.hpp>

#include <algorithm>
#include <functional>
#include <thread>

namespace w3a::checker
{
namespace
{
using message::FieldKind;

message::ParseHints hints_of(flex::TargetConfig const& target)
{
  return {target.host, target.expected_name};
}

bool is_time_like(std::string const& value)
{
  return message::classify_nonce_value(value) != message::NonceValueKind::Random;
}

std::string random_from(std::string_view alphabet, std::size_t n, std::mt19937_64& rng)
{
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out(n, '0');
  for (auto& c : out)
    c = alphabet[pick(rng)];
  return out;
}

// Where the nonce sits in a message of the sampled layout.
class NonceLocator
{
public:
  NonceLocator(std::string const& sample, message::ParseHints hints,
               std::vector<message::VariableSpan> const& spans)
    : hints_(std::move(hints))
  {
    sample_tokens_ = message::tokenize(sample);
    auto const parsed = message::parse_message(sample, hints_);
    std::vector<std::string> timestamps;
    for (auto kind : {FieldKind::IssuedAt, FieldKind::ExpirationTime, FieldKind::NotBefore})
      if (auto const* f = parsed.find(kind))
        timestamps.push_back(f->value);

    if (auto const* f = parsed.find(FieldKind::Nonce))
    {
      labelled_ = true;
      for (std::size_t i = 0; i < sample_tokens_.size(); ++i)
        if (sample_tokens_[i] == f->value)
        {
          index_ = i;
          break;
        }
    }
    if (!index_)
    {
      for (auto const& s : spans)
      {
        if (s.non_nonce)
          continue;
        auto const& v = sample_tokens_[s.token_index];
        if (std::find(timestamps.begin(), timestamps.end(), v) != timestamps.end())
          continue;
        index_ = s.token_index;
        break;
      }
    }
    if (!index_ && !spans.empty())
      for (auto const& s : spans)
        if (!s.non_nonce)
        {
          index_ = s.token_index;
          break;
        }
  }

  bool found() const
  {
    return index_.has_value() || labelled_;
  }

  // Byte span of the nonce value inside `msg`.
  std::optional<message::Span> locate(std::string const& msg) const
  {
    if (labelled_)
    {
      auto const parsed = message::parse_message(msg, hints_);
      if (auto const* f = parsed.find(FieldKind::Nonce))
        return f->span;
    }
    if (!index_)
      return std::nullopt;
    auto const tokens = message::tokenize(msg);
    if (tokens.size() != sample_tokens_.size())
      return std::nullopt;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < *index_; ++i)
      offset += tokens[i].size();
    return message::Span{offset, offset + tokens[*index_].size()};
  }

private:
  message::ParseHints hints_;
  std::vector<std::string> sample_tokens_;
  std::optional<std::size_t> index_;
  bool labelled_ = false;
};

std::string replaced(std::string msg, message::Span span, std::string const& value)
{
  msg.replace(span.begin, span.size(), value);
  return msg;
}

std::string join(std::vector<std::string> const& lines, std::string_view sep)
{
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i)
  {
    if (i)
      out += sep;
    out += lines[i];
  }
  return out;
}
}

std::vector<std::string> labelled_field_lines(message::ParsedMessage const& parsed)
{
  std::vector<std::string> out;
  for (auto const& f : parsed.fields)
  {
    if (f.label.empty() || f.kind == FieldKind::Statement || f.kind == FieldKind::Domain ||
        f.kind == FieldKind::Name)
      continue;
    auto const pos = parsed.raw.rfind(f.label, f.span.begin);
    auto sep = std::string(" ");
    if (pos != std::string::npos && pos + f.label.size() <= f.span.begin)
      sep = parsed.raw.substr(pos + f.label.size(), f.span.begin - pos - f.label.size());
    out.push_back(f.label + sep + f.value);
  }
  return out;
}

std::string similar_value(std::string const& value, std::chrono::system_clock::time_point now,
                          std::mt19937_64& rng)
{
  auto const kind = message::classify_nonce_value(value);
  if (kind != message::NonceValueKind::Random)
    return message::format_time_value(kind, now);

  std::string out;
  do
  {
    if (message::is_uuid_token(value))
    {
      auto hex = random_from("0123456789abcdef", 32, rng);
      hex[12] = '4';
      hex[16] = "89ab"[rng() % 4];
      out = hex.substr(0, 8) + "-" + hex.substr(8, 4) + "-" + hex.substr(12, 4) + "-" +
            hex.substr(16, 4) + "-" + hex.substr(20);
    }
    else if (message::is_digits(value))
    {
      out = random_from("0123456789", value.size(), rng);
      if (out.size() > 1 && out[0] == '0')
        out[0] = '1';
    }
    else if (std::all_of(value.begin(), value.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
             }))
    {
      out = random_from("0123456789abcdef", value.size(), rng);
    }
    else
    {
      out = random_from("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789",
                        std::max<std::size_t>(value.size(), 1), rng);
    }
  } while (out == value);
  return out;
}

void check_message(Prober& prober, Finding& finding)
{
  auto const& a = prober.keys()[0];
  auto const hints = hints_of(prober.target());

  auto baseline = prober.obtain(a, "message.baseline");
  if (!baseline.ok)
    throw TargetBroken(prober.target().label + ": no message could be queried");
  auto const parsed = message::parse_message(baseline.message, hints);
  finding.fields.has_domain = parsed.has(FieldKind::Domain);
  finding.fields.has_name = parsed.has(FieldKind::Name);
  auto const honest = prober.sign_and_authenticate(baseline, a, baseline.message, "message.baseline");
  if (!honest.completed || !honest.issued)
    throw TargetBroken(prober.target().label + ": an honest login was refused");

  auto random_probe = prober.obtain(a, "message.random");
  auto const r1 = random_probe.ok ? prober.sign_and_authenticate(random_probe, a,
                                                                 prober.random_text(32),
                                                                 "message.random")
                                  : Prober::Attempt{};

  auto empty_probe = prober.obtain(a, "message.empty_body");
  Prober::Attempt r2;
  if (empty_probe.ok)
  {
    auto const fields = labelled_field_lines(message::parse_message(empty_probe.message, hints));
    r2 = prober.sign_and_authenticate(empty_probe, a, join(fields, "\n"), "message.empty_body");
  }

  auto prefix_probe = prober.obtain(a, "message.prefix");
  auto const r3 = prefix_probe.ok
                    ? prober.sign_and_authenticate(prefix_probe, a,
                                                   prober.random_text(12) + " " +
                                                     prefix_probe.message,
                                                   "message.prefix")
                    : Prober::Attempt{};

  finding.checks.message = r1.issued ? Verdict::V2 : Verdict::Pass;
  finding.checks.body = r2.issued ? Verdict::V2 : r3.issued ? Verdict::V3 : Verdict::Pass;
}

void check_nonce(Prober& prober, Finding& finding)
{
  auto const& a = prober.keys()[0];
  auto const& b = prober.keys()[1];
  auto const hints = hints_of(prober.target());

  auto sample_a = prober.obtain(a, "nonce.sample");
  auto sample_b = prober.obtain(b, "nonce.sample");
  if (!sample_a.ok || !sample_b.ok)
    throw TargetBroken(prober.target().label + ": no message could be queried");
  std::vector<std::string> const samples{sample_a.message, sample_b.message};
  std::vector<message::VariableSpan> spans;
  for (auto& s : message::detect_variable_spans(samples))
    if (!s.non_nonce)
      spans.push_back(std::move(s));

  NonceLocator const locator(sample_a.message, hints, spans);
  if (!locator.found())
  {
    finding.fields.has_nonce = false;
    finding.nonce_kind = NonceKind::NoNonce;
    finding.checks.nonce = Verdict::NotApplicable;
    return;
  }
  finding.fields.has_nonce = true;

  auto step1 = prober.obtain(a, "nonce.step1");
  if (!step1.ok)
    throw TargetBroken(prober.target().label + ": no message could be queried");
  auto const m1 = step1.message;
  auto const span1 = locator.locate(m1);
  if (!span1)
    throw TargetBroken(prober.target().label + ": nonce not found in a fresh message");
  auto const nonce1 = m1.substr(span1->begin, span1->size());
  auto const sig1 = crypto::personal_sign(m1, a).hex();

  auto require = [&](Prober::Attempt r, int step) {
    if (!r.completed)
      throw TargetBroken(prober.target().label + ": nonce step " + std::to_string(step) +
                         " inconclusive");
    return r.issued;
  };

  if (!require(prober.authenticate(step1, a.address().hex(), m1, sig1, "nonce.step1"), 1))
    throw TargetBroken(prober.target().label + ": an honest login was refused");

  auto classify = [&]() -> NonceKind {
    if (!require(prober.authenticate(step1, a.address().hex(), m1, sig1, "nonce.step2"), 2))
      return NonceKind::OneTime;

    auto step3 = prober.obtain(b, "nonce.step3");
    if (!step3.ok)
      throw TargetBroken(prober.target().label + ": no message could be queried");
    if (!require(prober.sign_and_authenticate(step3, a, step3.message, "nonce.step3"), 3))
    {
      prober.notes().push_back("nonce: 3rd AUTH refused a message queried by another address; "
                               "reported as Temporary (nonce bound to its requester)");
      return NonceKind::Temporary;
    }

    std::mt19937_64 rng(std::hash<std::string>{}(nonce1));
    auto const similar = similar_value(nonce1, prober.now(), rng);
    if (is_time_like(nonce1))
      prober.notes().push_back("nonce: 4th AUTH used the current time as the similar value; a "
                               "time-based server may accept it as genuine");
    if (!require(prober.sign_and_authenticate(step1, a, replaced(m1, *span1, similar),
                                              "nonce.step4"),
                 4))
      return NonceKind::Temporary;

    if (!require(prober.sign_and_authenticate(step1, a, replaced(m1, *span1, ""), "nonce.step5"),
                 5))
      return NonceKind::TimeBased;
    return NonceKind::InvalidNonce;
  };

  finding.nonce_kind = classify();
  if (finding.nonce_kind != NonceKind::InvalidNonce)
  {
    finding.checks.nonce = Verdict::Pass;
    return;
  }

  // Accepted in every form. A time value far outside any sane window tells
  // an unchecked value (V2) from a check with a broken range (V3).
  finding.checks.nonce = Verdict::V2;
  auto const kind = message::classify_nonce_value(nonce1);
  if (kind == message::NonceValueKind::Random)
    return;
  auto const far = message::format_time_value(kind, prober.now() + std::chrono::hours(24 * 365));
  auto const r = prober.sign_and_authenticate(step1, a, replaced(m1, *span1, far), "nonce.range");
  if (r.completed && !r.issued)
    finding.checks.nonce = Verdict::V3;
}

void check_signature(Prober& prober, Finding& finding)
{
  auto const& a = prober.keys()[0];
  auto const& b = prober.keys()[1];

  auto null_probe = prober.obtain(a, "signature.null");
  auto const r1 = null_probe.ok ? prober.authenticate(null_probe, null_probe.address,
                                                      null_probe.message, "", "signature.null")
                                : Prober::Attempt{};

  // 65 well-formed bytes that are no signature at all (r = 0).
  auto const junk = "0x" + std::string(64, '0') + std::string(63, '0') + "1" + "1b";
  auto junk_probe = prober.obtain(a, "signature.invalid");
  auto const r2 = junk_probe.ok ? prober.authenticate(junk_probe, junk_probe.address,
                                                      junk_probe.message, junk, "signature.invalid")
                                : Prober::Attempt{};

  // A genuine signature by one wallet presented for another address.
  auto swap_probe = prober.obtain(b, "address.swap");
  auto const r3 = swap_probe.ok
                    ? prober.authenticate(swap_probe, b.address().hex(), swap_probe.message,
                                          crypto::personal_sign(swap_probe.message, a).hex(),
                                          "address.swap")
                    : Prober::Attempt{};

  finding.checks.signature = r1.issued || r2.issued ? Verdict::Fail : Verdict::Pass;
  finding.checks.address = r3.issued ? Verdict::Fail : Verdict::Pass;
}

std::optional<std::chrono::milliseconds>
probe_nonce_expiry(Prober& prober, NonceKind kind, std::vector<std::chrono::milliseconds> schedule)
{
  if (kind != NonceKind::Temporary && kind != NonceKind::TimeBased)
    throw PreconditionViolation("expiry probing needs a temporary or time-based nonce");
  if (schedule.empty())
    return std::nullopt;

  auto const& a = prober.keys()[0];
  auto captured = prober.obtain(a, "expiry.capture");
  if (!captured.ok)
    throw TargetBroken(prober.target().label + ": no message could be queried");
  auto const start = std::chrono::steady_clock::now();
  auto const sig = crypto::personal_sign(captured.message, a).hex();

  std::optional<std::chrono::milliseconds> bound;
  for (auto delay : schedule)
  {
    std::this_thread::sleep_until(start + delay);
    auto const r = prober.authenticate(captured, a.address().hex(), captured.message, sig,
                                       "expiry." + std::to_string(delay.count()) + "ms");
    if (!r.issued)
      break;
    bound = delay;
  }
  return bound;
}
}

#include <w3a/checker.hpp>

#include <json.hpp>

#include <set>

namespace w3a::checker
{
std::string_view to_string(Verdict v)
{
  switch (v)
  {
  case Verdict::Pass:
    return "pass";
  case Verdict::V2:
    return "V2";
  case Verdict::V3:
    return "V3";
  case Verdict::NotApplicable:
    return "N/A";
  case Verdict::Fail:
    return "fail";
  }
  return "pass";
}

std::string_view to_string(NonceKind k)
{
  switch (k)
  {
  case NonceKind::OneTime:
    return "one-time";
  case NonceKind::Temporary:
    return "temporary";
  case NonceKind::TimeBased:
    return "time-based";
  case NonceKind::InvalidNonce:
    return "invalid-nonce";
  case NonceKind::NoNonce:
    return "no-nonce";
  }
  return "no-nonce";
}

std::string_view to_string(RiskLevel r)
{
  switch (r)
  {
  case RiskLevel::Low:
    return "L";
  case RiskLevel::Medium:
    return "M";
  case RiskLevel::High:
    return "H";
  case RiskLevel::Critical:
    return "C";
  }
  return "L";
}

RiskLevel classify_risk(Finding const& f)
{
  auto const& c = f.checks;
  if (c.message == Verdict::V2 || c.signature == Verdict::Fail || c.address == Verdict::Fail)
    return RiskLevel::Critical;
  if ((!f.fields.has_domain && !f.fields.has_name) || c.body == Verdict::V2)
    return RiskLevel::High;
  if ((!f.fields.has_domain && f.fields.has_name) || c.body == Verdict::V3)
    return RiskLevel::Medium;
  return RiskLevel::Low;
}

bool flag_replay(Finding const& f)
{
  return f.nonce_kind == NonceKind::NoNonce || f.nonce_kind == NonceKind::InvalidNonce;
}

bool flag_bmma(Finding const& f)
{
  return f.checks.body == Verdict::V2 || f.checks.body == Verdict::V3 ||
         f.checks.message == Verdict::V2;
}

ScanReport scan(flex::TargetConfig const& target, flex::HttpClient& client, KeyPool const& keys,
                ScanOptions const& options)
{
  auto const before = client.request_count();
  Prober prober(target, client, keys, options);
  ScanReport report;
  report.label = target.label;

  auto timed = [&](char const* name, auto&& fn) {
    auto const t0 = std::chrono::steady_clock::now();
    fn(prober, report.finding);
    report.timing[name] = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  };
  timed("message", check_message);
  timed("nonce", check_nonce);
  timed("signature", check_signature);

  report.finding.evidence = std::move(prober.evidence());
  report.finding.notes = std::move(prober.notes());
  report.risk = classify_risk(report.finding);
  report.replay_risk = flag_replay(report.finding);
  report.bmma_risk = flag_bmma(report.finding);
  report.requests = client.request_count() - before;
  return report;
}

std::string const& default_decoy()
{
  static std::string const decoy = "Welcome! Sign this message to claim your free mint.";
  return decoy;
}

std::string craft_bmma_message(std::span<const BmmaInput> inputs,
                               std::chrono::system_clock::time_point now, std::string const& decoy)
{
  if (inputs.empty())
    throw NotCombinable("no targets to combine");
  for (auto const& in : inputs)
    if (!flag_bmma(in.finding))
      throw NotCombinable(in.label + " verifies the message body exactly");

  std::vector<std::string> sections{decoy};
  // Containment checks: the genuine text must appear somewhere.
  for (auto const& in : inputs)
    if (in.finding.checks.message != Verdict::V2 && in.finding.checks.body == Verdict::V3)
      sections.push_back(in.genuine_message);

  // Unchecked bodies: only their labelled fields are needed. A label already
  // provided by an earlier site is not repeated.
  std::set<std::string> labels_used;
  for (auto const& in : inputs)
  {
    if (in.finding.checks.message == Verdict::V2 || in.finding.checks.body != Verdict::V2)
      continue;
    auto const parsed = message::parse_message(in.genuine_message, in.hints);
    std::vector<std::string> lines;
    for (auto const& f : parsed.fields)
    {
      if (f.label.empty() || f.kind == message::FieldKind::Statement ||
          f.kind == message::FieldKind::Domain || f.kind == message::FieldKind::Name ||
          f.kind == message::FieldKind::Address)
        continue;
      if (!labels_used.insert(f.label).second)
        continue;
      auto value = f.value;
      auto const kind = message::classify_nonce_value(value);
      if (kind != message::NonceValueKind::Random)
      {
        auto const when = f.kind == message::FieldKind::ExpirationTime ? now + std::chrono::hours(24)
                                                                        : now;
        value = message::format_time_value(kind, when);
      }
      lines.push_back(f.label + " " + value);
    }
    if (!lines.empty())
    {
      std::string block;
      for (auto const& l : lines)
        block += (block.empty() ? "" : "\n") + l;
      sections.push_back(block);
    }
  }

  std::string out;
  for (auto const& s : sections)
    out += (out.empty() ? "" : "\n\n") + s;
  return out;
}

std::string report_json(std::span<const ScanReport> reports, bool include_timing)
{
  using ojson = nlohmann::ordered_json;
  auto list = ojson::array();
  for (auto const& r : reports)
  {
    auto const& f = r.finding;
    ojson o;
    o["label"] = r.label;
    o["risk"] = std::string(to_string(r.risk));
    o["replay_risk"] = r.replay_risk;
    o["bmma_risk"] = r.bmma_risk;
    o["message_fields"] = {{"has_domain", f.fields.has_domain},
                           {"has_name", f.fields.has_name},
                           {"has_nonce", f.fields.has_nonce}};
    o["server_checks"] = {{"message", to_string(f.checks.message)},
                          {"body", to_string(f.checks.body)},
                          {"nonce", to_string(f.checks.nonce)},
                          {"signature", to_string(f.checks.signature)},
                          {"address", to_string(f.checks.address)}};
    o["nonce_kind"] = std::string(to_string(f.nonce_kind));
    o["requests"] = r.requests;
    if (r.inconclusive)
      o["inconclusive"] = *r.inconclusive;
    auto evidence = ojson::array();
    for (auto const& e : f.evidence)
      evidence.push_back({{"probe", e.probe},
                          {"outcome", e.outcome},
                          {"status", e.status},
                          {"stage", e.stage},
                          {"digest", e.digest}});
    o["evidence"] = std::move(evidence);
    o["notes"] = f.notes;
    if (include_timing)
    {
      ojson t = ojson::object();
      for (auto const& [k, v] : r.timing)
        t[k] = v.count();
      o["timing_ms"] = std::move(t);
    }
    list.push_back(std::move(o));
  }
  return list.dump(2) + "\n";
}

std::string report_markdown(std::span<const ScanReport> reports)
{
  auto mark = [](bool ok) { return std::string(ok ? "✓" : "✗"); };
  auto verdict = [](Verdict v) -> std::string {
    switch (v)
    {
    case Verdict::Pass:
      return "✓";
    case Verdict::V2:
      return "✗(V2)";
    case Verdict::V3:
      return "✗(V3)";
    case Verdict::NotApplicable:
      return "N/A";
    case Verdict::Fail:
      return "✗";
    }
    return "?";
  };
  auto risk = [](bool r) { return std::string(r ? "●" : "○"); };

  std::string out =
    "| # | Target | Domain | Name | Nonce | Message | Body | Nonce | Signature | Address | BMA "
    "| RA | BMMA |\n"
    "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  std::size_t i = 0;
  for (auto const& r : reports)
  {
    auto const& f = r.finding;
    if (r.inconclusive)
    {
      out += "| " + std::to_string(++i) + " | " + r.label + " |";
      for (int c = 0; c < 11; ++c)
        out += " Inconclusive |";
      out += "\n";
      continue;
    }
    out += "| " + std::to_string(++i) + " | " + r.label + " | " + mark(f.fields.has_domain) +
           " | " + mark(f.fields.has_name) + " | " + mark(f.fields.has_nonce) + " | " +
           verdict(f.checks.message) + " | " + verdict(f.checks.body) + " | " +
           verdict(f.checks.nonce) + " | " + verdict(f.checks.signature) + " | " +
           verdict(f.checks.address) + " | " + std::string(to_string(r.risk)) + " | " +
           risk(r.replay_risk) + " | " + risk(r.bmma_risk) + " |\n";
  }
  return out;
}
}

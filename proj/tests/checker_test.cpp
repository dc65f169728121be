#include "fixtures.hpp"
#include "published_verdicts.hpp"

#include <w3a/checker.hpp>
#include <w3a/vulnsim.hpp>

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <random>

using namespace w3a;
using namespace w3a::checker;
using namespace std::chrono_literals;

namespace
{
flex::Policy loopback_policy()
{
  flex::Policy p;
  p.timeout = 5000ms;
  p.min_interval = 0ms;
  return p;
}

struct Fleet
{
  explicit Fleet(std::vector<sim::VulnProfile> profiles) : server(std::move(profiles))
  {
    server.start();
  }
  flex::TargetConfig target(std::string const& label)
  {
    return sim::target_for(server.profile(label).profile(), server.base_url());
  }
  sim::SimServer server;
};

Finding finding_with(bool domain, bool name, Verdict message, Verdict body, Verdict sig,
                     Verdict addr)
{
  Finding f;
  f.fields = {domain, name, true};
  f.checks.message = message;
  f.checks.body = body;
  f.checks.signature = sig;
  f.checks.address = addr;
  return f;
}

std::string verdict_name(Verdict v)
{
  return std::string(to_string(v));
}

bool has_evidence(Finding const& f, std::string const& probe, std::string const& outcome)
{
  return std::any_of(f.evidence.begin(), f.evidence.end(), [&](Evidence const& e) {
    return e.probe == probe && e.outcome == outcome;
  });
}

// Finding-level invariants: the three nonce views agree, and every non-Pass
// verdict is backed by the probe that produced it.
void expect_consistent(Finding const& f)
{
  auto const no_nonce = f.nonce_kind == NonceKind::NoNonce;
  EXPECT_EQ(no_nonce, !f.fields.has_nonce);
  EXPECT_EQ(no_nonce, f.checks.nonce == Verdict::NotApplicable);
  if (f.checks.message == Verdict::V2)
  {
    EXPECT_TRUE(has_evidence(f, "message.random", "token"));
  }
  if (f.checks.body == Verdict::V2)
  {
    EXPECT_TRUE(has_evidence(f, "message.empty_body", "token"));
  }
  if (f.checks.body == Verdict::V3)
  {
    EXPECT_TRUE(has_evidence(f, "message.prefix", "token"));
  }
  if (f.checks.nonce == Verdict::V2 || f.checks.nonce == Verdict::V3)
  {
    EXPECT_TRUE(has_evidence(f, "nonce.step5", "token"));
  }
  if (f.checks.nonce == Verdict::V3)
  {
    EXPECT_TRUE(has_evidence(f, "nonce.range", "rejected"));
  }
  if (f.checks.signature == Verdict::Fail)
  {
    EXPECT_TRUE(has_evidence(f, "signature.null", "token") ||
                has_evidence(f, "signature.invalid", "token"));
  }
  if (f.checks.address == Verdict::Fail)
  {
    EXPECT_TRUE(has_evidence(f, "address.swap", "token"));
  }
}
}

TEST(classify, examples)
{
  auto const P = Verdict::Pass;
  EXPECT_EQ(classify_risk(finding_with(true, true, P, P, P, P)), RiskLevel::Low);
  EXPECT_EQ(classify_risk(finding_with(false, true, P, P, P, P)), RiskLevel::Medium);
  EXPECT_EQ(classify_risk(finding_with(false, false, P, P, P, P)), RiskLevel::High);
  EXPECT_EQ(classify_risk(finding_with(true, true, P, Verdict::V3, P, P)), RiskLevel::Medium);
  EXPECT_EQ(classify_risk(finding_with(true, true, P, Verdict::V2, P, P)), RiskLevel::High);
  EXPECT_EQ(classify_risk(finding_with(true, true, Verdict::V2, Verdict::V2, P, P)),
            RiskLevel::Critical);
  EXPECT_EQ(classify_risk(finding_with(true, true, P, P, Verdict::Fail, P)), RiskLevel::Critical);
  EXPECT_EQ(classify_risk(finding_with(true, true, P, P, P, Verdict::Fail)), RiskLevel::Critical);
  // Domain present without name is not one of the Medium/High design rules.
  EXPECT_EQ(classify_risk(finding_with(true, false, P, P, P, P)), RiskLevel::Low);
}

TEST(classify, monotone_in_every_weakness)
{
  std::mt19937_64 rng(7);
  auto pick = [&](std::vector<Verdict> const& vs) { return vs[rng() % vs.size()]; };
  std::vector<Verdict> const messages{Verdict::Pass, Verdict::V2};
  std::vector<Verdict> const bodies{Verdict::Pass, Verdict::V3, Verdict::V2};
  std::vector<Verdict> const sigs{Verdict::Pass, Verdict::Fail};
  for (int i = 0; i < 500; ++i)
  {
    auto f = finding_with(rng() & 1, rng() & 1, pick(messages), pick(bodies), pick(sigs),
                          pick(sigs));
    auto const base = classify_risk(f);
    auto worse = f;
    switch (rng() % 5)
    {
    case 0:
      worse.fields.has_domain = false;
      break;
    case 1:
      worse.fields.has_name = false;
      break;
    case 2:
      worse.checks.message = Verdict::V2;
      break;
    case 3:
      worse.checks.body = f.checks.body == Verdict::Pass ? Verdict::V3 : Verdict::V2;
      break;
    default:
      worse.checks.signature = Verdict::Fail;
    }
    // Dropping the domain while the name is present must not lower the level.
    EXPECT_GE(classify_risk(worse), base) << i;
  }
}

TEST(flags, replay_and_bmma)
{
  Finding f;
  for (auto k : {NonceKind::OneTime, NonceKind::Temporary, NonceKind::TimeBased})
  {
    f.nonce_kind = k;
    EXPECT_FALSE(flag_replay(f));
  }
  for (auto k : {NonceKind::InvalidNonce, NonceKind::NoNonce})
  {
    f.nonce_kind = k;
    EXPECT_TRUE(flag_replay(f));
  }
  EXPECT_FALSE(flag_bmma(f));
  f.checks.body = Verdict::V3;
  EXPECT_TRUE(flag_bmma(f));
  f.checks.body = Verdict::V2;
  EXPECT_TRUE(flag_bmma(f));
  f.checks.body = Verdict::Pass;
  f.checks.message = Verdict::V2;
  EXPECT_TRUE(flag_bmma(f));
}

TEST(keypool, deterministic_and_distinct)
{
  KeyPool a("s"), b("s"), c("t");
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].address().hex(), b[0].address().hex());
  EXPECT_NE(a[0].address().hex(), a[1].address().hex());
  EXPECT_NE(a[0].address().hex(), c[0].address().hex());
  auto const expected = crypto::KeyPair::from_seed(crypto::keccak256("w3a-keypool:s:1"));
  EXPECT_EQ(a[1].address().hex(), expected.address().hex());
}

TEST(similar_value, keeps_shape)
{
  std::mt19937_64 rng(1);
  auto const now = std::chrono::system_clock::now();
  for (std::string v : {"12345678", "a1b2c3d4", "1700000000", "1700000000123",
                        "2023-11-01T10:00:00.000Z", "3f2c8a9e-1b2d-4c5e-8f70-123456789abc"})
  {
    auto const s = similar_value(v, now, rng);
    EXPECT_NE(s, v);
    EXPECT_EQ(message::classify_nonce_value(s), message::classify_nonce_value(v)) << v;
    if (message::classify_nonce_value(v) == message::NonceValueKind::Random)
    {
      EXPECT_EQ(s.size(), v.size());
    }
  }
}

TEST(check_nonce, five_request_inference_on_each_behaviour)
{
  Fleet fleet(sim::fixture_nonce_kinds());
  flex::HttpClient client(loopback_policy());
  KeyPool keys;
  std::map<std::string, NonceKind> const expected{
    {"nonce-one-time", NonceKind::OneTime},       {"nonce-temporary", NonceKind::Temporary},
    {"nonce-time-based", NonceKind::TimeBased},   {"nonce-unchecked", NonceKind::InvalidNonce},
    {"nonce-none", NonceKind::NoNonce},
  };
  for (auto const& [label, kind] : expected)
  {
    auto const target = fleet.target(label);
    Prober prober(target, client, keys);
    Finding f;
    check_nonce(prober, f);
    EXPECT_EQ(f.nonce_kind, kind) << label;
    EXPECT_EQ(f.fields.has_nonce, kind != NonceKind::NoNonce) << label;
    auto const want = kind == NonceKind::NoNonce        ? Verdict::NotApplicable
                      : kind == NonceKind::InvalidNonce ? Verdict::V2
                                                        : Verdict::Pass;
    EXPECT_EQ(f.checks.nonce, want) << label;
  }
}

TEST(check_nonce, broken_target_throws)
{
  auto p = sim::strict_profile();
  Fleet fleet({p});
  auto target = fleet.target("strict");
  // AUTH pointed at a path that does not exist: the honest baseline fails.
  for (auto& r : target.requests)
    if (r.role == flex::Role::Auth)
      r.url += "-missing";
  flex::HttpClient client(loopback_policy());
  KeyPool keys;
  Prober prober(target, client, keys);
  Finding f;
  EXPECT_THROW(check_nonce(prober, f), TargetBroken);
}

TEST(probe_nonce_expiry, finds_last_valid_delay)
{
  Fleet fleet(sim::fixture_nonce_kinds());
  flex::HttpClient client(loopback_policy());
  KeyPool keys;
  auto const target = fleet.target("nonce-temporary");
  Prober prober(target, client, keys);
  auto const last = probe_nonce_expiry(prober, NonceKind::Temporary, {1000ms, 3000ms});
  ASSERT_TRUE(last.has_value());
  EXPECT_EQ(*last, 1000ms);
  EXPECT_FALSE(probe_nonce_expiry(prober, NonceKind::Temporary, {}).has_value());
  EXPECT_THROW(probe_nonce_expiry(prober, NonceKind::OneTime, {1000ms}), PreconditionViolation);
  EXPECT_THROW(probe_nonce_expiry(prober, NonceKind::NoNonce, {1000ms}), PreconditionViolation);
}

TEST(check_signature, detects_missing_verification)
{
  auto strict = sim::strict_profile();
  auto no_sig = sim::strict_profile("no-sig");
  no_sig.sig_check = false;
  auto no_addr = sim::strict_profile("no-addr");
  no_addr.addr_check = false;
  Fleet fleet({strict, no_sig, no_addr});
  flex::HttpClient client(loopback_policy());
  KeyPool keys;

  auto verdicts = [&](std::string const& label) {
    auto const target = fleet.target(label);
    Prober prober(target, client, keys);
    Finding f;
    check_signature(prober, f);
    f.evidence = prober.evidence();
    expect_consistent(f);
    return std::pair{f.checks.signature, f.checks.address};
  };
  EXPECT_EQ(verdicts("strict"), std::pair(Verdict::Pass, Verdict::Pass));
  EXPECT_EQ(verdicts("no-sig").first, Verdict::Fail);
  EXPECT_EQ(verdicts("no-addr"), std::pair(Verdict::Pass, Verdict::Fail));
}

TEST(scan, strict_profile_is_low_without_flags)
{
  Fleet fleet({sim::strict_profile()});
  flex::HttpClient client(loopback_policy());
  auto const report = scan(fleet.target("strict"), client, KeyPool{});
  EXPECT_EQ(report.risk, RiskLevel::Low);
  EXPECT_FALSE(report.replay_risk);
  EXPECT_FALSE(report.bmma_risk);
  EXPECT_EQ(report.finding.nonce_kind, NonceKind::OneTime);
  EXPECT_TRUE(report.finding.fields.has_domain);
  EXPECT_TRUE(report.finding.fields.has_name);
  EXPECT_LE(report.requests, 60u);
  EXPECT_EQ(report.timing.size(), 3u);
}

TEST(scan, tightening_a_profile_never_raises_risk)
{
  auto weak = sim::strict_profile("weak");
  weak.body_check = sim::BodyCheck::RegexContains;
  weak.nonce_kind = sim::NonceKind::None;
  auto tighter = weak;
  tighter.label = "tighter";
  tighter.body_check = sim::BodyCheck::Exact;
  Fleet fleet({weak, tighter});
  flex::HttpClient client(loopback_policy());
  auto const a = scan(fleet.target("weak"), client, KeyPool{});
  auto const b = scan(fleet.target("tighter"), client, KeyPool{});
  EXPECT_EQ(a.risk, RiskLevel::Medium);
  EXPECT_TRUE(a.bmma_risk);
  EXPECT_LE(b.risk, a.risk);
  EXPECT_FALSE(b.bmma_risk);
}

TEST(scan, fleet_matches_published_verdicts)
{
  Fleet fleet(sim::fixture_table2());
  auto limiter = std::make_shared<flex::RateLimiter>();
  std::vector<ScanReport> reports;
  for (auto const& p : sim::fixture_table2())
  {
    flex::HttpClient client(loopback_policy(), limiter);
    reports.push_back(scan(fleet.target(p.label), client, KeyPool{}));
  }
  ASSERT_EQ(reports.size(), w3a::testing::published_verdicts.size());
  for (std::size_t i = 0; i < reports.size(); ++i)
  {
    auto const& r = reports[i];
    auto const& e = w3a::testing::published_verdicts[i];
    auto const& f = r.finding;
    SCOPED_TRACE(r.label);
    EXPECT_EQ(f.fields.has_domain, e.domain);
    EXPECT_EQ(f.fields.has_name, e.name);
    EXPECT_EQ(f.fields.has_nonce, e.nonce);
    EXPECT_EQ(verdict_name(f.checks.message), e.message);
    EXPECT_EQ(verdict_name(f.checks.body), e.body);
    EXPECT_EQ(verdict_name(f.checks.nonce), e.nonce_check);
    EXPECT_EQ(verdict_name(f.checks.signature), e.signature);
    EXPECT_EQ(verdict_name(f.checks.address), e.address);
    EXPECT_EQ(to_string(r.risk), std::string(1, e.risk));
    EXPECT_EQ(r.replay_risk, e.ra);
    EXPECT_EQ(r.bmma_risk, e.bmma);
    EXPECT_LE(r.requests, 60u);
    expect_consistent(f);
  }
}

TEST(scan, deterministic_evidence)
{
  Fleet fleet({sim::strict_profile(), sim::fixture_table2()[3]});
  std::vector<ScanReport> a, b;
  for (auto* out : {&a, &b})
    for (auto const& label : {std::string("strict"), std::string("04-foundation")})
    {
      flex::HttpClient client(loopback_policy());
      out->push_back(scan(fleet.target(label), client, KeyPool{}, {.seed = 42, .clock = {}}));
    }
  EXPECT_EQ(report_json(a), report_json(b));
  EXPECT_EQ(report_markdown(a), report_markdown(b));
}

TEST(report, json_shape_and_markdown_symbols)
{
  ScanReport r;
  r.label = "x";
  r.finding.fields = {false, true, false};
  r.finding.checks.body = Verdict::V3;
  r.finding.checks.nonce = Verdict::NotApplicable;
  r.risk = classify_risk(r.finding);
  r.replay_risk = true;
  r.bmma_risk = true;
  r.timing["message"] = 12ms;
  std::vector<ScanReport> rs{r};

  auto const j = nlohmann::json::parse(report_json(rs));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["risk"], "M");
  EXPECT_EQ(j[0]["server_checks"]["body"], "V3");
  EXPECT_EQ(j[0]["server_checks"]["nonce"], "N/A");
  EXPECT_TRUE(j[0]["replay_risk"].get<bool>());
  EXPECT_FALSE(j[0].contains("timing_ms"));
  EXPECT_EQ(nlohmann::json::parse(report_json(rs, true))[0]["timing_ms"]["message"], 12);

  auto const md = report_markdown(rs);
  EXPECT_NE(md.find("| 1 | x | ✗ | ✓ | ✗ | ✓ | ✗(V3) | N/A | ✓ | ✓ | M | ● | ● |"),
            std::string::npos)
    << md;
}

TEST(bmma, crafted_message_passes_every_vulnerable_server)
{
  // A containment-checked site, a site checking four labelled fields, and a
  // site checking only a timestamp.
  auto contains = sim::strict_profile("contains");
  contains.nonce_kind = sim::NonceKind::None;
  contains.body_check = sim::BodyCheck::RegexContains;
  auto fields = sim::fixture_table2()[20]; // version, issued at, expiration, nonce
  auto stamp = sim::fixture_table2()[18];  // timestamp only
  Fleet fleet({contains, fields, stamp});
  flex::HttpClient client(loopback_policy());

  std::vector<BmmaInput> inputs;
  for (auto const* label : {"contains", "21-planetix", "19-questn"})
  {
    auto const target = fleet.target(label);
    auto const report = scan(target, client, KeyPool{});
    ASSERT_TRUE(report.bmma_risk) << label;
    KeyPool keys("genuine");
    Prober prober(target, client, keys);
    auto const obtained = prober.obtain(keys[0], "genuine");
    ASSERT_TRUE(obtained.ok);
    inputs.push_back({label, report.finding, obtained.message, {target.host, target.expected_name}});
  }

  auto const crafted = craft_bmma_message(inputs);
  EXPECT_EQ(crafted.rfind(default_decoy(), 0), 0u);

  KeyPool victim("victim");
  auto const sig = crypto::personal_sign(crafted, victim[0]).hex();
  for (auto const* label : {"contains", "21-planetix", "19-questn"})
  {
    auto& server = fleet.server.profile(label);
    if (server.profile().nonce_kind == sim::NonceKind::OneTime)
      server.handle_query(victim[0].address().hex());
    auto const res = server.handle_auth(victim[0].address().hex(), crafted, sig);
    EXPECT_TRUE(res.ok()) << label << ": " << res.reason << "\n" << crafted;
  }
}

TEST(bmma, refuses_exactly_checked_targets)
{
  BmmaInput in;
  in.label = "exact";
  EXPECT_THROW(craft_bmma_message(std::span<const BmmaInput>{&in, 1}), NotCombinable);
  EXPECT_THROW(craft_bmma_message(std::span<const BmmaInput>{}), NotCombinable);
}

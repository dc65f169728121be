#include "fixtures.hpp"
#include "guard_corpus.hpp"

#include <w3a/crypto.hpp>
#include <w3a/guard.hpp>
#include <w3a/message.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include <random>
#include <set>

using namespace w3a;
using namespace w3a::guard;

namespace
{
std::string const addr_a = "0x36e7c6feb20a90b07f63863d09cc12c4c9f39064";
std::string const addr_b = "0x9a1bfbb3bd5c1a6e1b4e3f7a29a1c0b8e0a7d6c5";
std::string const nonce_a = "66ffb8f1-5eb1-4477-9558-36a60eb1b51f";
std::string const nonce_b = "0b7e3c55-2f1a-4c8e-9d33-7c1f0e5a9b42";

std::vector<TemplateToken> literal_tokens(std::string_view m)
{
  return template_of("x", m).tokens;
}

TemplateStore store_with(std::string const& domain, std::vector<std::string> const& msgs)
{
  TemplateStore s;
  for (auto const& m : msgs)
    s.record_login(domain, m);
  return s;
}

std::filesystem::path temp_path(std::string const& name)
{
  auto dir = std::filesystem::temp_directory_path() / "w3a_guard_test";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}
}

TEST(wildcard, class_patterns)
{
  EXPECT_EQ(class_of(addr_a), WildcardClass::Address);
  EXPECT_EQ(class_of(nonce_a), WildcardClass::Uuid);
  EXPECT_EQ(class_of("2024-01-13T03:59:00.000Z"), WildcardClass::DateTime);
  EXPECT_EQ(class_of("1706389762"), WildcardClass::Number);
  EXPECT_EQ(class_of("a1b2c3d4"), WildcardClass::Generic);
  EXPECT_FALSE(accepts(WildcardClass::Uuid, "abc"));
  EXPECT_FALSE(accepts(WildcardClass::Generic, "a b"));
  EXPECT_TRUE(accepts(WildcardClass::Span, "a b\nc"));
}

TEST(extract, identical_messages_stay_literal)
{
  auto const t = extract_template(template_of("opensea.io", w3a::testing::opensea_message),
                                  w3a::testing::opensea_message);
  EXPECT_EQ(t.tokens, literal_tokens(w3a::testing::opensea_message));
  EXPECT_EQ(t.sample_count, 2u);
}

TEST(extract, opensea_pair_wildcards_address_and_nonce)
{
  auto const a = w3a::testing::opensea_like(addr_a, nonce_a);
  auto const b = w3a::testing::opensea_like(addr_b, nonce_b);
  auto const t = extract_template(template_of("opensea.io", a), b);

  // Hand-run diff: only the address and nonce tokens differ.
  auto expected = literal_tokens(a);
  for (auto& tok : expected)
  {
    if (tok.text == addr_a)
      tok = TemplateToken::wild(WildcardClass::Address);
    else if (tok.text == nonce_a)
      tok = TemplateToken::wild(WildcardClass::Uuid);
  }
  EXPECT_EQ(t.tokens, expected);
}

TEST(extract, unequal_lengths_align_on_common_tokens)
{
  auto const t = extract_template(template_of("x", "Nonce: 1 2"), "Nonce: 9");
  std::vector<TemplateToken> const expected{TemplateToken::lit("Nonce:"), TemplateToken::lit(" "),
                                            TemplateToken::wild(WildcardClass::Span)};
  EXPECT_EQ(t.tokens, expected);
  Matcher m(t);
  EXPECT_TRUE(m.matches("Nonce: 1 2"));
  EXPECT_TRUE(m.matches("Nonce: 9"));
}

TEST(extract, differing_word_classes_widen_to_generic)
{
  auto const t = extract_template(template_of("x", "Code: 1234 end"), "Code: ab12 end");
  EXPECT_EQ(t.tokens[2], TemplateToken::wild(WildcardClass::Generic));
}

TEST(matcher, containment_and_class_constraints)
{
  auto const foundation = template_of("foundation.app", w3a::testing::foundation_message);
  EXPECT_TRUE(Matcher(foundation).matches(w3a::testing::bmma_message));
  EXPECT_TRUE(Matcher(foundation).matches(w3a::testing::foundation_message));

  auto t = template_of("x", "Nonce: " + nonce_a);
  t.tokens.back() = TemplateToken::wild(WildcardClass::Uuid);
  EXPECT_TRUE(Matcher(t).matches("Nonce: " + nonce_b));
  EXPECT_FALSE(Matcher(t).matches("Nonce: abc"));
}

TEST(matcher, escapes_regex_metacharacters)
{
  auto const t = template_of("x", "Sign (a+b)* [x] {y} ^$ | ? \\ .");
  EXPECT_TRUE(Matcher(t).matches("pre Sign (a+b)* [x] {y} ^$ | ? \\ . post"));
  EXPECT_FALSE(Matcher(t).matches("Sign aab [x] {y} ^$ | ? \\ ."));
}

TEST(alerts, foreign_origin_replay_is_red_and_yellow)
{
  auto const store = store_with("opensea.io", {w3a::testing::opensea_like(addr_a, nonce_a),
                                               w3a::testing::opensea_like(addr_b, nonce_b)});
  auto const d = check_signature_request(w3a::testing::opensea_message, "evil.example", store);
  ASSERT_TRUE(d.red.has_value());
  EXPECT_EQ(d.red->victim_domain, "opensea.io");
  EXPECT_TRUE(d.yellow);
}

TEST(alerts, own_origin_is_quiet)
{
  auto const store = store_with("opensea.io", {w3a::testing::opensea_like(addr_a, nonce_a)});
  auto const d = check_signature_request(w3a::testing::opensea_message, "https://opensea.io", store);
  EXPECT_FALSE(d.red.has_value());
  EXPECT_FALSE(d.yellow);
}

TEST(alerts, red_and_yellow_together_for_domainless_message)
{
  auto const store = store_with("foundation.app", {w3a::testing::foundation_message});
  auto const d = check_signature_request(w3a::testing::foundation_message, "other.site", store);
  ASSERT_TRUE(d.red.has_value());
  EXPECT_EQ(d.red->victim_domain, "foundation.app");
  EXPECT_TRUE(d.yellow);
}

TEST(alerts, yellow_ignores_scheme_www_port_and_case)
{
  TemplateStore empty;
  std::string const m = "Log in to https://www.Galler.io/en";
  EXPECT_FALSE(check_signature_request(m, "galler.io", empty).yellow);
  EXPECT_FALSE(check_signature_request(m, "https://www.galler.io:443/login", empty).yellow);
  EXPECT_TRUE(check_signature_request(m, "evil.io", empty).yellow);
  EXPECT_EQ(normalize_origin("HTTPS://user@WWW.Example.com:8080/path?q"), "example.com");
}

TEST(store, record_login_generalises_rotating_nonces)
{
  TemplateStore s;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i)
    s.record_login("opensea.io", w3a::testing::opensea_like(addr_a, *flex::builtin_value("uuid4")));
  ASSERT_EQ(s.size(), 1u);
  auto const& t = s.templates().at("opensea.io");
  EXPECT_EQ(t.sample_count, 5u);
  EXPECT_EQ(t.tokens.back(), TemplateToken::wild(WildcardClass::Uuid));
  auto const wildcards = std::count_if(t.tokens.begin(), t.tokens.end(),
                                       [](auto const& tok) { return !tok.literal; });
  EXPECT_EQ(wildcards, 1);
}

TEST(store, first_login_is_raw_message)
{
  TemplateStore s;
  s.record_login("Foundation.app", w3a::testing::foundation_message);
  auto const& t = s.templates().at("foundation.app");
  EXPECT_EQ(t.sample_count, 1u);
  EXPECT_EQ(t.tokens, literal_tokens(w3a::testing::foundation_message));
}

TEST(store, json_round_trip_and_atomic_save)
{
  auto const s = store_with("opensea.io", {w3a::testing::opensea_like(addr_a, nonce_a),
                                           w3a::testing::opensea_like(addr_b, nonce_b)});
  auto const path = temp_path("store.json");
  s.save(path);
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  auto const loaded = TemplateStore::load(path);
  EXPECT_EQ(loaded.to_json(), s.to_json());
  EXPECT_EQ(loaded.templates().at("opensea.io").tokens, s.templates().at("opensea.io").tokens);

  auto const doc = nlohmann::json::parse(s.to_json());
  auto const& tokens = doc["opensea.io"]["tokens"];
  // Literal runs are merged: lit, addr, lit, uuid.
  ASSERT_EQ(tokens.size(), 4u);
  EXPECT_EQ(tokens[1]["wc"], "addr");
  EXPECT_EQ(tokens[3]["wc"], "uuid");
}

TEST(store, missing_file_is_empty_and_garbage_throws)
{
  EXPECT_EQ(TemplateStore::load(temp_path("absent.json")).size(), 0u);
  auto const bad = temp_path("bad.json");
  std::ofstream(bad) << "{\"a\": {\"tokens\": [{\"wc\": \"bogus\"}]}}";
  EXPECT_THROW(TemplateStore::load(bad), StoreError);
  std::ofstream(bad, std::ios::trunc) << "[1,";
  EXPECT_THROW(TemplateStore::load(bad), StoreError);
}

// Random messages over a fixed skeleton with variable fields and occasional
// inserted or dropped words.
class random_messages : public ::testing::Test
{
protected:
  std::string make()
  {
    static std::vector<std::string> const skeleton{"Welcome", "to", "Site!", "\n\n", "Sign",
                                                   "in",      "now", ".",    "\n",   "Nonce:"};
    std::string out;
    for (auto const& w : skeleton)
    {
      if (rng() % 10 == 0)
        continue;
      out += w;
      if (w != "\n" && w != "\n\n")
        out += " ";
      if (rng() % 12 == 0)
        out += "extra" + std::to_string(rng() % 100) + " ";
    }
    switch (rng() % 4)
    {
    case 0:
      out += std::to_string(rng() % 100000000);
      break;
    case 1:
      out += *flex::builtin_value("uuid4");
      break;
    case 2:
      out += *flex::builtin_value("now_iso");
      break;
    default:
      out += "0x" + *flex::builtin_value("rand_hex(40)");
    }
    return out;
  }
  std::mt19937_64 rng{11};
};

TEST_F(random_messages, every_sample_matches_final_template)
{
  for (int round = 0; round < 40; ++round)
  {
    std::vector<std::string> msgs;
    TemplateStore s;
    for (int i = 0; i < 6; ++i)
    {
      msgs.push_back(make());
      s.record_login("site.example", msgs.back());
    }
    auto const& m = s.matchers().at("site.example");
    for (auto const& msg : msgs)
      EXPECT_TRUE(m.matches(msg)) << s.to_json() << "\n---\n" << msg;
  }
}

TEST_F(random_messages, extraction_is_idempotent_on_matching_messages)
{
  for (int round = 0; round < 40; ++round)
  {
    auto const a = make();
    auto const b = make();
    auto const t = extract_template(template_of("s", a), b);
    // A message rebuilt from a's tokens already matches with the same alignment.
    auto const again = extract_template(t, a);
    auto const twice = extract_template(again, a);
    EXPECT_EQ(twice.tokens, again.tokens);
    EXPECT_EQ(twice.sample_count, again.sample_count + 1);
  }
}

TEST_F(random_messages, self_origin_never_red_and_cardinality)
{
  std::vector<std::string> const domains{"a.io", "b.io", "c.io", "d.io"};
  TemplateStore s;
  std::set<std::string> seen;
  for (int i = 0; i < 60; ++i)
  {
    auto const& d = domains[rng() % domains.size()];
    seen.insert(d);
    s.record_login(d, make());
    EXPECT_EQ(s.size(), seen.size());

    TemplateStore only;
    only.record_login(d, make());
    EXPECT_FALSE(check_signature_request(make(), d, only).red.has_value());
  }
}

TEST(corpus, attack_messages_are_accepted_by_their_servers)
{
  for (auto const& site : w3a::testing::guard_corpus())
  {
    sim::ProfileServer server(site.profile);
    std::array<std::uint8_t, 32> seed{};
    seed[31] = 9;
    auto const key = crypto::KeyPair::from_seed(seed);
    auto const q = server.handle_query(key.address().hex());
    auto values = site.tests.front();
    values.address = key.address().hex();
    if (!q.nonce.empty())
      values.nonce = q.nonce;
    auto const msg = site.profile.query_mode == sim::QueryMode::Message && !q.message.empty() &&
                         !w3a::testing::body_unchecked(site.profile)
                       ? q.message
                       : w3a::testing::attack_message(site.profile, values);
    auto const res =
      server.handle_auth(key.address().hex(), msg, crypto::personal_sign(msg, key).hex());
    EXPECT_TRUE(res.ok()) << site.profile.label << ": " << res.reason << "\n" << msg;
  }
}

TEST(corpus, templates_stay_small)
{
  TemplateStore s;
  for (auto const& site : w3a::testing::guard_corpus())
    for (auto const& m : site.extraction)
    {
      EXPECT_LE(m.size(), 1024u);
      s.record_login(site.profile.site_domain, m);
    }
  EXPECT_EQ(s.size(), 25u);
  for (auto const& [d, t] : s.templates())
    EXPECT_LE(template_json(t).size(), 2048u) << d;
  EXPECT_LT(s.to_json().size(), 10240u);
}

TEST(corpus, red_on_foreign_reuse_and_quiet_on_own_logins)
{
  auto const r = w3a::testing::run_guard_rounds(w3a::testing::guard_corpus());
  EXPECT_EQ(r.expected.size(), 20u);
  EXPECT_EQ(r.round1, r.expected);
  EXPECT_EQ(r.round2, r.expected);
  EXPECT_EQ(r.round3_checks, 125u);
  EXPECT_EQ(r.round3_red, 0u);
}

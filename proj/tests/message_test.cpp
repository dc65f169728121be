#include <w3a/message.hpp>

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace w3a::message;
using w3a::testing::opensea_like;

namespace
{
std::string value_of(ParsedMessage const& m, FieldKind k)
{
  auto const f = m.find(k);
  return f ? f->value : std::string("<none>");
}

void expect_well_formed(ParsedMessage const& m)
{
  std::size_t prev_end = 0;
  std::map<FieldKind, int> counts;
  for (auto const& f : m.fields)
  {
    ASSERT_LE(prev_end, f.span.begin);
    ASSERT_LE(f.span.begin, f.span.end);
    ASSERT_LE(f.span.end, m.raw.size());
    prev_end = f.span.end;
    ++counts[f.kind];
  }
  for (auto const& [kind, n] : counts)
  {
    if (kind != FieldKind::Statement && kind != FieldKind::Domain)
    {
      EXPECT_EQ(n, 1) << to_string(kind);
    }
  }
  EXPECT_EQ(reconstruct(m), m.raw);
}
}

TEST(ParseMessage, OpenSeaLogin)
{
  auto const m = parse_message(w3a::testing::opensea_message);
  expect_well_formed(m);
  EXPECT_EQ(value_of(m, FieldKind::Domain), "opensea.io");
  EXPECT_EQ(value_of(m, FieldKind::Name), "OpenSea");
  EXPECT_EQ(value_of(m, FieldKind::Nonce), "66ffb8f1-5eb1-4477-9558-36a60eb1b51f");
  EXPECT_EQ(classify_nonce_value(value_of(m, FieldKind::Nonce)), NonceValueKind::Random);
  EXPECT_EQ(value_of(m, FieldKind::Address), "0x36e7c6feb20a90b07f63863d09cc12c4c9f39064");
  EXPECT_EQ(m.find(FieldKind::Nonce)->label, "Nonce:");
  EXPECT_EQ(m.find(FieldKind::Address)->label, "Wallet address:");
  EXPECT_EQ(m.body.find("66ffb8f1"), std::string::npos);
  EXPECT_NE(m.body.find("Welcome to OpenSea!"), std::string::npos);
}

TEST(ParseMessage, FoundationMessageHasOnlyName)
{
  auto const m = parse_message(w3a::testing::foundation_message);
  expect_well_formed(m);
  EXPECT_EQ(value_of(m, FieldKind::Name), "Foundation");
  EXPECT_FALSE(m.has(FieldKind::Domain));
  EXPECT_FALSE(m.has(FieldKind::Nonce));
  EXPECT_EQ(m.body, m.raw);
}

TEST(ParseMessage, EmptyInput)
{
  auto const m = parse_message("");
  EXPECT_TRUE(m.fields.empty());
  EXPECT_EQ(m.body, "");
}

TEST(ParseMessage, UnparseableIsOneStatement)
{
  auto const m = parse_message("just some words here");
  ASSERT_EQ(m.fields.size(), 1u);
  EXPECT_EQ(m.fields[0].kind, FieldKind::Statement);
  EXPECT_EQ(m.fields[0].value, "just some words here");
}

TEST(ParseMessage, BlindMultiMessageFields)
{
  auto const m = parse_message(w3a::testing::bmma_message);
  expect_well_formed(m);
  EXPECT_EQ(value_of(m, FieldKind::Domain), "Foundation.com");
  EXPECT_EQ(value_of(m, FieldKind::Version), "2");
  EXPECT_EQ(m.find(FieldKind::Version)->label, "Web3 Token Version:");
  EXPECT_EQ(value_of(m, FieldKind::Nonce), "84800972");
  EXPECT_EQ(value_of(m, FieldKind::IssuedAt), "2024-01-13T03:59:00.000Z");
  EXPECT_EQ(value_of(m, FieldKind::ExpirationTime), "2024-01-14T03:59:00.000Z");
}

TEST(ParseMessage, ValueOnFollowingLine)
{
  auto const m = parse_message("This is Galler, welcome!\n\nWallet address:\n"
                               "0x36E7C6FeB20A90b07F63863D09cC12C4c9f39064\n\n"
                               "timestamp:\n1225468800000");
  expect_well_formed(m);
  EXPECT_EQ(value_of(m, FieldKind::Nonce), "1225468800000");
  EXPECT_EQ(classify_nonce_value(value_of(m, FieldKind::Nonce)), NonceValueKind::Timestamp13);
  EXPECT_EQ(value_of(m, FieldKind::Name), "Galler");
}

TEST(ParseMessage, NameHintIsCaseInsensitive)
{
  auto const m = parse_message("learnblockchain", {"", "LearnBlockchain"});
  EXPECT_EQ(value_of(m, FieldKind::Name), "learnblockchain");
  auto const none = parse_message("sign here", {"", "LearnBlockchain"});
  EXPECT_FALSE(none.has(FieldKind::Name));
}

TEST(ParseMessage, BareWordsAreNeverDomains)
{
  for (auto const* text : {"e.g. sign", "version 1.21 ready", "Foundation.", "24 Hours."})
    EXPECT_FALSE(parse_message(text).has(FieldKind::Domain)) << text;
}

TEST(ParseMessage, DomainWithPort)
{
  auto const m = parse_message("Sign in at http://127.0.0.1.nip.io:8080/login");
  auto const d = m.find(FieldKind::Domain);
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->value, "127.0.0.1.nip.io");
  EXPECT_EQ(m.raw.substr(d->span.begin, d->span.size()), "127.0.0.1.nip.io:8080");
}

TEST(ClassifyNonce, Examples)
{
  EXPECT_EQ(classify_nonce_value("1625468800000"), NonceValueKind::Timestamp13);
  EXPECT_EQ(classify_nonce_value("1706389762"), NonceValueKind::Timestamp10);
  EXPECT_EQ(classify_nonce_value("2024-01-13T03:59:00.000Z"), NonceValueKind::DateTime);
  EXPECT_EQ(classify_nonce_value("2024-01-13T03:59:00+08:00"), NonceValueKind::DateTime);
  EXPECT_EQ(classify_nonce_value("84800972"), NonceValueKind::Random);
  EXPECT_EQ(classify_nonce_value("2024-13-13T03:59:00Z"), NonceValueKind::Random);
  EXPECT_EQ(classify_nonce_value("3deca92b"), NonceValueKind::Random);
}

TEST(Tokenize, PreservesSeparators)
{
  auto const t = tokenize("a  b\n\nc ");
  ASSERT_EQ(t.size(), 6u);
  EXPECT_EQ(t[1], "  ");
  EXPECT_EQ(t[3], "\n\n");
  EXPECT_TRUE(is_space_token(t[5]));
}

// Token indices frozen from Python's re.split(r'(\s+)') over the same text.
TEST(VariableSpans, NonceOnly)
{
  std::vector<std::string> msgs{
      opensea_like("0x36e7c6feb20a90b07f63863d09cc12c4c9f39064",
                   "66ffb8f1-5eb1-4477-9558-36a60eb1b51f"),
      opensea_like("0x36e7c6feb20a90b07f63863d09cc12c4c9f39064",
                   "0b8a4c52-7d3e-4f0a-9e55-1f2c3d4e5f60")};
  auto const spans = detect_variable_spans(msgs);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].token_index, 80u);
  EXPECT_EQ(spans[0].kind, NonceValueKind::Random);
  EXPECT_FALSE(spans[0].non_nonce);
}

TEST(VariableSpans, AddressFlaggedNonNonce)
{
  std::vector<std::string> msgs{
      opensea_like("0x36e7c6feb20a90b07f63863d09cc12c4c9f39064",
                   "66ffb8f1-5eb1-4477-9558-36a60eb1b51f"),
      opensea_like("0x2c7536e3605d9c16a7a3d7b1898e529396a65c23",
                   "0b8a4c52-7d3e-4f0a-9e55-1f2c3d4e5f60")};
  auto const spans = detect_variable_spans(msgs);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].token_index, 76u);
  EXPECT_TRUE(spans[0].non_nonce);
  EXPECT_EQ(spans[1].token_index, 80u);
  EXPECT_FALSE(spans[1].non_nonce);
}

TEST(VariableSpans, IdenticalMessagesHaveNoSpans)
{
  std::vector<std::string> msgs{"same text", "same text"};
  EXPECT_TRUE(detect_variable_spans(msgs).empty());
}

TEST(VariableSpans, NeedsTwoMessages)
{
  std::vector<std::string> one{"x"};
  EXPECT_THROW(detect_variable_spans(one), NeedMultipleSamples);
}

TEST(VariableSpans, TimestampClassified)
{
  std::vector<std::string> msgs{"Sign in\ntimestamp: 1625468800000",
                                "Sign in\ntimestamp: 1625468801234"};
  auto const spans = detect_variable_spans(msgs);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].kind, NonceValueKind::Timestamp13);
}

TEST(VariableSpans, UnequalLengthsAlignByLcs)
{
  std::vector<std::string> msgs{"Nonce: 1 2 end", "Nonce: 9 end"};
  auto const spans = detect_variable_spans(msgs);
  ASSERT_FALSE(spans.empty());
  EXPECT_EQ(spans.front().token_index, 2u);
}

namespace
{
std::string random_word(std::mt19937& rng)
{
  static std::vector<std::string> const words{
      "Sign", "this", "message", "to", "log", "in", "Welcome", "please", "your",
      "wallet", "status", "reset", "after", "24", "hours.", "Terms", "(beta)", "!",
      "ok,", "v2", "e.g.", "1.21", "Node"};
  return words[rng() % words.size()];
}

std::string random_hex(std::mt19937& rng, std::size_t n)
{
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(hex[rng() % 16]);
  return out;
}

std::string random_host(std::mt19937& rng)
{
  static std::vector<std::string> const tlds{"io", "app", "market", "com", "xyz"};
  std::string h = random_hex(rng, 3 + rng() % 5);
  h[0] = static_cast<char>('a' + rng() % 26);
  if (rng() % 2)
    h = "www." + h;
  return h + "." + tlds[rng() % tlds.size()];
}

std::string random_message(std::mt19937& rng, std::string* authority = nullptr)
{
  std::string m;
  auto const lines = 1 + rng() % 5;
  for (std::size_t l = 0; l < lines; ++l)
  {
    auto const words = 1 + rng() % 6;
    for (std::size_t w = 0; w < words; ++w)
      m += random_word(rng) + (w + 1 < words ? " " : "");
    m += rng() % 3 ? "\n" : "\n\n";
  }
  if (authority)
  {
    *authority = random_host(rng);
    if (rng() % 2)
      *authority += ":" + std::to_string(1000 + rng() % 9000);
    m += rng() % 2 ? "https://" + *authority + "/tos\n" : "Domain " + *authority + "\n";
  }
  switch (rng() % 4)
  {
  case 0:
    m += "Nonce: " + random_hex(rng, 8) + "-" + random_hex(rng, 4) + "\n";
    break;
  case 1:
    m += "timestamp: 1625468" + std::to_string(100000 + rng() % 800000) + "\n";
    break;
  case 2:
    m += "Issued At: 2024-01-13T03:59:00.000Z\n";
    break;
  default:
    break;
  }
  if (rng() % 2)
    m += "Wallet address: 0x" + random_hex(rng, 40);
  return m;
}
}

TEST(ParseMessageProperty, RoundTripAndSpanInvariants)
{
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i)
  {
    auto const m = random_message(rng);
    auto const parsed = parse_message(m);
    expect_well_formed(parsed);
    EXPECT_EQ(parse_message(m).fields.size(), parsed.fields.size());
  }
}

TEST(ParseMessageProperty, EveryAuthorityIsReported)
{
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i)
  {
    std::string authority;
    auto const m = random_message(rng, &authority);
    auto const parsed = parse_message(m);
    auto const at = m.find(authority);
    ASSERT_NE(at, std::string::npos);
    bool covered = false;
    for (auto const& f : parsed.fields)
      covered = covered || (f.kind == FieldKind::Domain && f.span.begin <= at &&
                            at + authority.size() <= f.span.end);
    EXPECT_TRUE(covered) << m;
  }
}

TEST(VariableSpansProperty, SymmetricInMessageOrder)
{
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i)
  {
    auto const base = random_message(rng);
    auto const a = opensea_like("0x" + random_hex(rng, 40), random_hex(rng, 8)) + base;
    auto const b = opensea_like("0x" + random_hex(rng, 40), random_hex(rng, 8)) + base;
    std::vector<std::string> ab{a, b}, ba{b, a};
    auto const x = detect_variable_spans(ab);
    auto const y = detect_variable_spans(ba);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t k = 0; k < x.size(); ++k)
    {
      EXPECT_EQ(x[k].token_index, y[k].token_index);
      EXPECT_EQ(x[k].kind, y[k].kind);
      EXPECT_EQ(x[k].non_nonce, y[k].non_nonce);
    }
  }
}

TEST(ClassifyNonceProperty, TotalAndPure)
{
  std::mt19937 rng(5);
  for (int i = 0; i < 1000; ++i)
  {
    std::string token(1 + rng() % 30, ' ');
    for (auto& c : token)
      c = static_cast<char>(33 + rng() % 94);
    EXPECT_EQ(classify_nonce_value(token), classify_nonce_value(token));
  }
}

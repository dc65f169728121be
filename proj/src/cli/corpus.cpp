#include <w3a/cli.hpp>
#include <w3a/crypto.hpp>
#include <w3a/message.hpp>

#include <json.hpp>

#include <random>

namespace w3a::cli
{
namespace
{
std::string random_chars(std::mt19937_64& rng, std::size_t n, std::string_view alphabet)
{
  std::string out;
  for (std::size_t i = 0; i < n; ++i)
    out += alphabet[rng() % alphabet.size()];
  return out;
}

std::string nonce_value(sim::NonceFormat f, std::mt19937_64& rng,
                        std::chrono::system_clock::time_point now)
{
  using message::NonceValueKind;
  switch (f)
  {
  case sim::NonceFormat::Uuid: {
    auto h = random_chars(rng, 32, "0123456789abcdef");
    h[12] = '4';
    return h.substr(0, 8) + "-" + h.substr(8, 4) + "-" + h.substr(12, 4) + "-" + h.substr(16, 4) +
           "-" + h.substr(20);
  }
  case sim::NonceFormat::Digits8:
    return random_chars(rng, 1, "123456789") + random_chars(rng, 7, "0123456789");
  case sim::NonceFormat::Hex8:
    return random_chars(rng, 8, "0123456789abcdef");
  case sim::NonceFormat::Timestamp10:
    return message::format_time_value(NonceValueKind::Timestamp10, now);
  case sim::NonceFormat::Timestamp13:
    return message::format_time_value(NonceValueKind::Timestamp13, now);
  case sim::NonceFormat::DateTime:
    return message::format_time_value(NonceValueKind::DateTime, now);
  }
  return {};
}

sim::SlotValues values_for(sim::VulnProfile const& p, std::mt19937_64& rng)
{
  auto const now = std::chrono::system_clock::now() + std::chrono::milliseconds(rng() % 60000);
  std::array<std::uint8_t, 32> seed{};
  for (auto& b : seed)
    b = static_cast<std::uint8_t>(rng());
  seed[0] |= 1;
  sim::SlotValues v;
  v.address = crypto::KeyPair::from_seed(seed).address().hex();
  v.nonce = nonce_value(p.nonce_format, rng, now);
  v.issued_at = message::format_time_value(message::NonceValueKind::DateTime, now);
  v.expiration = message::format_time_value(message::NonceValueKind::DateTime,
                                            now + std::chrono::hours(24));
  return v;
}
}

std::vector<CorpusSite> guard_corpus(std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  auto fleet = sim::fixture_table2();
  fleet.resize(25); // the profile-update rows are not logins
  std::vector<CorpusSite> out;
  for (auto const& p : fleet)
  {
    CorpusSite site{p, {}, {}};
    for (int i = 0; i < 5; ++i)
      site.extraction.push_back(sim::compose_message(p, values_for(p, rng)));
    for (int i = 0; i < 5; ++i)
      site.tests.push_back(values_for(p, rng));
    out.push_back(std::move(site));
  }
  return out;
}

std::string corpus_json(std::vector<CorpusSite> const& corpus)
{
  auto list = nlohmann::ordered_json::array();
  for (auto const& site : corpus)
  {
    std::vector<std::string> tests;
    for (auto const& v : site.tests)
      tests.push_back(sim::compose_message(site.profile, v));
    list.push_back({{"site", site.profile.label},
                    {"domain", site.profile.site_domain},
                    {"extraction", site.extraction},
                    {"test", tests}});
  }
  return list.dump(2) + "\n";
}
}

#include <w3a/vulnsim.hpp>

namespace w3a::sim
{
namespace
{
using namespace std::chrono_literals;

struct Row
{
  char const* label;
  char const* domain;
  char const* name;
  char const* statement;
  bool domain_in_message;
  bool name_in_message;
  NonceKind nonce;
  NonceFormat format;
};

VulnProfile from_row(Row const& r)
{
  VulnProfile p;
  p.label = r.label;
  p.site_domain = r.domain;
  p.site_name = r.name;
  p.statement = r.statement;
  p.include_domain = r.domain_in_message;
  p.include_name = r.name_in_message;
  p.nonce_kind = r.nonce;
  p.nonce_format = r.format;
  if (r.format == NonceFormat::Timestamp10 || r.format == NonceFormat::Timestamp13 ||
      r.format == NonceFormat::DateTime)
    p.nonce_label = "Timestamp";
  return p;
}
}

std::vector<VulnProfile> fixture_table2()
{
  using K = NonceKind;
  using F = NonceFormat;
  // Statements are distinct per site; sites without a name or domain in their
  // message mention neither.
  static Row const rows[] = {
    {"01-blur", "blur.io", "Blur", "Sign in to {name}", false, true, K::Temporary, F::Uuid},
    {"02-opensea", "opensea.io", "OpenSea",
     "Welcome to {name}!\n\nClick to sign in and accept the {name} Terms of Service: "
     "https://{domain}/tos\n\nThis request will not trigger a blockchain transaction or cost "
     "any gas fees.\n\nYour authentication status will reset after 24 hours.",
     true, true, K::OneTime, F::Uuid},
    {"03-looksrare", "looksrare.org", "LooksRare",
     "Welcome to {name}!\n\nSign this message to prove you own this wallet on https://{domain}",
     true, true, K::OneTime, F::Digits8},
    {"04-foundation", "foundation.app", "Foundation",
     "Please sign this message to connect to {name}.", false, true, K::None, F::Uuid},
    {"05-element", "element.market", "Element",
     "Welcome to {name}!\n\nClick \"Sign\" to sign in. No password needed!\n\nI accept the {name} "
     "Terms of Service:\nhttps://{domain}/tos",
     true, true, K::OneTime, F::Hex8},
    {"06-rarible", "rarible.com", "Rarible",
     "Welcome to {name}! Sign in on https://{domain} to trade digital collectibles", true, true,
     K::TimeBased, F::DateTime},
    {"07-joepegs", "joepegs.com", "Joepegs",
     "Welcome to {name}! Sign this message to log in to the marketplace", false, true,
     K::Temporary, F::Uuid},
    {"08-quix", "quix.market", "Quix", "Sign this message to verify ownership of your account",
     false, false, K::TimeBased, F::Timestamp10},
    {"09-minted", "minted.network", "Minted Network",
     "Welcome to {name}! Please sign in at https://{domain} to mint and collect", true, true,
     K::TimeBased, F::Timestamp13},
    {"10-campfire", "campfire.exchange", "Campfire",
     "Sign in to {name} with your wallet at https://{domain}", true, true, K::Temporary,
     F::Uuid},
    {"11-moonflow", "moonflow.nft", "Moonflow NFT",
     "Welcome to {name}. Approve this request to continue", false, true, K::Temporary,
     F::Digits8},
    {"12-galler", "galler.io", "Galler",
     "This is {name}, welcome!\n\nClick \"Sign\" to sign in. No password needed!\nThis request "
     "will not trigger a blockchain transaction or\ncost any gas fees.\n\nYour authentication "
     "status will be reset after 24 hours.\n\nI accept the {name} User Terms of Use:\n"
     "https://www.{domain}/en/terms-of-use",
     true, true, K::Unchecked, F::Timestamp13},
    {"13-playdapp", "playdapp.io", "PlayDapp", "Please sign to authenticate your wallet", false,
     false, K::None, F::Uuid},
    {"14-refinable", "refinable.com", "Refinable",
     "I am signing my one-time nonce to log in", false, false, K::OneTime, F::Digits8},
    {"15-apeiron", "apeironnft.com", "Apeiron",
     "Sign this request to enter the game world", false, false, K::TimeBased,
     F::Timestamp13},
    {"16-lifty", "lifty.io", "Lifty", "Log in to {name} on https://{domain} using this signature",
     true, true, K::OneTime, F::Uuid},
    {"17-learnblockchain", "learnblockchain.cn", "LearnBlockchain",
     "Welcome to {name}! Sign this message to log in", false, true, K::None, F::Uuid},
    {"18-dappradar", "dappradar.com", "DappRadar",
     "Authenticate your wallet to follow projects and rankings", false, false, K::Temporary,
     F::Uuid},
    {"19-questn", "questn.com", "QuestN", "Welcome to {name}! Sign in to complete quests", false,
     true, K::TimeBased, F::Timestamp10},
    {"20-galxe", "galxe.com", "Galxe",
     "{domain} wants you to sign in with your Ethereum account to {name}", true, true,
     K::Unchecked, F::Hex8},
    {"21-planetix", "planetix.com", "Planetix",
     "Welcome to {name}! Sign in at https://{domain} to explore the planet", true, true,
     K::Unchecked, F::Digits8},
    {"22-mobox", "mobox.io", "MOBOX", "Confirm the signature to enter your account", false, false,
     K::TimeBased, F::Timestamp10},
    {"23-bombcrypto", "bombcrypto.io", "Bomb Crypto 2",
     "Sign the message below to start playing", false, false, K::TimeBased, F::DateTime},
    {"24-decert", "decert.me", "Decert", "Welcome to {name}! Sign to earn your credentials", false,
     true, K::OneTime, F::Uuid},
    {"25-paragraph", "paragraph.xyz", "Paragraph",
     "Welcome to {name}. Sign to publish and subscribe", false, true, K::Temporary, F::Uuid},
    {"26-campfire-profile", "campfire.exchange", "Campfire", "update_profile", false, false,
     K::None, F::Uuid},
    {"27-lifty-profile", "lifty.io", "Lifty", "update profile settings", false, false, K::None,
     F::Uuid},
    {"28-nftmall-profile", "nftmall.io", "NFTmall", "I want to update my profile", false, false,
     K::None, F::Uuid},
    {"29-babylons-profile", "babylons.io", "Babylons", "Edit account details", false, false,
     K::None, F::Uuid},
  };

  std::vector<VulnProfile> out;
  for (auto const& r : rows)
    out.push_back(from_row(r));

  auto& opensea = out[1];
  opensea.include_address = true;

  auto& looksrare = out[2];
  looksrare.include_address = true;

  // Containment check on the body, no nonce.
  auto& foundation = out[3];
  foundation.body_check = BodyCheck::RegexContains;

  // The front-end composes the message around a queried nonce and sends the
  // address in a header.
  auto& element = out[4];
  element.include_address = true;
  element.field_separator = "\n";
  element.query_mode = QueryMode::Nonce;
  element.address_in_header = true;
  element.body_check = BodyCheck::RegexContains;

  // Front-end timestamp without an expiry; the body is never compared.
  auto& quix = out[7];
  quix.no_expiry = true;
  quix.body_check = BodyCheck::None;
  quix.query_mode = QueryMode::None;

  // Signature verified, message content ignored.
  auto& galler = out[11];
  galler.include_address = true;
  galler.field_separator = "\n";
  galler.nonce_label = "timestamp";
  galler.message_check = false;

  auto& learn = out[16];
  learn.message_check = false;

  auto& questn = out[18];
  questn.body_check = BodyCheck::None;
  questn.query_mode = QueryMode::None;

  auto& galxe = out[19];
  galxe.include_address = true;
  galxe.include_issued_at = true;

  auto& planetix = out[20];
  planetix.version_line = "Web3 Token Version: 2";
  planetix.include_issued_at = true;
  planetix.include_expiration = true;
  planetix.body_check = BodyCheck::None;
  planetix.query_mode = QueryMode::None;

  for (auto& p : out)
    if (p.nonce_kind == NonceKind::Temporary)
      p.nonce_ttl = 15min;
  return out;
}

std::vector<VulnProfile> fixture_nonce_kinds()
{
  auto base = [](std::string label, NonceKind kind, NonceFormat format) {
    auto p = strict_profile(std::move(label));
    p.nonce_kind = kind;
    p.nonce_format = format;
    p.nonce_ttl = std::chrono::seconds(2);
    if (format == NonceFormat::Timestamp10 || format == NonceFormat::Timestamp13 ||
        format == NonceFormat::DateTime)
      p.nonce_label = "Timestamp";
    return p;
  };
  return {
    base("nonce-one-time", NonceKind::OneTime, NonceFormat::Uuid),
    base("nonce-temporary", NonceKind::Temporary, NonceFormat::Uuid),
    base("nonce-time-based", NonceKind::TimeBased, NonceFormat::Timestamp10),
    base("nonce-unchecked", NonceKind::Unchecked, NonceFormat::Digits8),
    base("nonce-none", NonceKind::None, NonceFormat::Uuid),
  };
}
}

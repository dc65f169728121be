#include <w3a/checker.hpp>

#include <json.hpp>

namespace w3a::checker
{
namespace
{
std::string stage_of(std::string const& body)
{
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    return {};
  auto it = doc.find("error");
  if (it == doc.end() || !it->is_object())
    return {};
  auto stage = it->find("stage");
  return stage != it->end() && stage->is_string() ? stage->get<std::string>() : std::string{};
}

std::string path_of(std::string const& url)
{
  try
  {
    return flex::split_url(url).path;
  }
  catch (Error const&)
  {
    return url;
  }
}
}

KeyPool::KeyPool(std::string const& seed, std::size_t size)
{
  for (std::size_t i = 0; i < size; ++i)
    keys_.push_back(crypto::KeyPair::from_seed(
      crypto::keccak256("w3a-keypool:" + seed + ":" + std::to_string(i))));
}

Prober::Prober(flex::TargetConfig const& target, flex::HttpClient& client, KeyPool const& keys,
               ScanOptions options)
  : target_(target), client_(client), keys_(keys), options_(std::move(options)),
    rng_(options_.seed)
{
  if (keys_.size() < 2)
    throw Error("the checkers need at least two wallets");
  if (!target_.find(flex::Role::Auth))
    throw Error(target_.label + ": no AUTH request");
}

std::chrono::system_clock::time_point Prober::now() const
{
  return options_.clock ? options_.clock() : std::chrono::system_clock::now();
}

std::string Prober::random_text(std::size_t n)
{
  static constexpr std::string_view alphabet =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out(n, 'a');
  for (auto& c : out)
    c = alphabet[pick(rng_)];
  return out;
}

void Prober::record(std::string const& probe, flex::TraceEntry const& entry,
                    std::string const& outcome)
{
  Evidence e;
  e.probe = probe;
  e.outcome = outcome;
  e.status = entry.status;
  e.stage = stage_of(entry.response_body);
  auto const digest_input = std::string(flex::to_string(entry.role)) + " " + entry.request.method +
                            " " + path_of(entry.request.url) + " " + std::to_string(e.status) +
                            " " + e.stage;
  e.digest = crypto::to_hex(crypto::keccak256(digest_input)).substr(2, 16);
  evidence_.push_back(std::move(e));
}

Prober::Obtained Prober::obtain(crypto::KeyPair const& key, std::string const& probe)
{
  Obtained o;
  o.address = key.address().hex();
  flex::Bindings const local{{"addr", o.address}};
  if (target_.find(flex::Role::Query))
  {
    auto const& entry = flex::step(target_, flex::Role::Query, client_, o.session, local);
    if (!entry.error.empty() || entry.status < 200 || entry.status >= 300)
    {
      record(probe + ".query", entry, "inconclusive");
      return o;
    }
  }
  if (auto msg = o.session.get("msg"))
  {
    o.message = *msg;
  }
  else
  {
    try
    {
      o.message = flex::render_text("{{ msg }}", *target_.find(flex::Role::Auth), o.session, local);
    }
    catch (flex::MissingKey const&)
    {
      notes_.push_back(probe + ": no message obtainable");
      return o;
    }
  }
  o.ok = true;
  return o;
}

Prober::Attempt Prober::authenticate(Obtained& obtained, std::string const& address,
                                     std::string const& message, std::string const& signature,
                                     std::string const& probe)
{
  flex::Bindings const local{{"addr", address}, {"msg", message}, {"sig", signature}};
  auto const& entry = flex::step(target_, flex::Role::Auth, client_, obtained.session, local);
  Attempt out;
  if (!entry.error.empty())
  {
    record(probe, entry, "inconclusive");
    return out;
  }
  out.completed = true;
  auto const token = entry.extracted.find(target_.token_key);
  out.issued = token != entry.extracted.end() && !token->second.empty();
  record(probe, entry, out.issued ? "token" : "rejected");

  if (out.issued && target_.find(flex::Role::Access))
  {
    auto const& access = flex::step(target_, flex::Role::Access, client_, obtained.session, local);
    auto const confirmed = access.error.empty() && access.status >= 200 && access.status < 300;
    record(probe + ".access", access, confirmed ? "confirmed" : "unconfirmed");
  }
  return out;
}

Prober::Attempt Prober::sign_and_authenticate(Obtained& obtained, crypto::KeyPair const& key,
                                              std::string const& message, std::string const& probe)
{
  return authenticate(obtained, key.address().hex(), message,
                      crypto::personal_sign(message, key).hex(), probe);
}
}

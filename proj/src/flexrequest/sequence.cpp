#include <w3a/flexrequest.hpp>

namespace w3a::flex
{
TraceEntry const& step(TargetConfig const& target, Role role, HttpClient& client,
                       SessionContext& session, Bindings const& local)
{
  auto const* item = target.find(role);
  if (!item)
    throw InvalidTarget(target.label + ": no " + std::string(to_string(role)) + " request");

  TraceEntry entry;
  entry.role = role;
  try
  {
    entry.request = render(*item, session, local);
  }
  catch (MissingKey const& e)
  {
    entry.error = std::string("render: ") + e.what();
    session.trace.push_back(std::move(entry));
    return session.trace.back();
  }

  auto const started = std::chrono::steady_clock::now();
  Response response;
  try
  {
    response = client.execute(entry.request);
  }
  catch (TransportError const& e)
  {
    entry.error = std::string(e.kind() == TransportError::Kind::Timeout ? "timeout: " : "network: ") +
                  e.what();
  }
  catch (Error const& e)
  {
    entry.error = std::string("request: ") + e.what();
  }
  entry.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
    std::chrono::steady_clock::now() - started);

  auto const failed = !entry.error.empty();
  entry.status = response.status;
  entry.response_body = response.body;
  session.trace.push_back(std::move(entry));
  if (!failed)
    session = extract_outputs(response, item->outputs, std::move(session));
  return session.trace.back();
}

SessionContext run_sequence(TargetConfig const& target, HttpClient& client,
                            SequenceOptions const& options)
{
  SessionContext session;
  for (auto role : {Role::Query, Role::Auth, Role::Access})
  {
    if (!target.find(role))
      continue;
    Bindings local;
    if (auto it = options.overrides.find(role); it != options.overrides.end())
      local = it->second;
    if (options.before)
      options.before(role, session, local);
    auto const& entry = step(target, role, client, session, local);
    auto const ok = entry.error.empty() && entry.status >= 200 && entry.status < 300;
    if (options.after)
      options.after(role, session);
    if (!ok && options.required.contains(role))
      break;
  }
  return session;
}
}

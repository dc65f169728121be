#include <w3a/vulnsim.hpp>

#include <httplib.h>
#include <json.hpp>

namespace w3a::sim
{
namespace
{
using json = nlohmann::json;

void send_json(httplib::Response& res, int status, json const& body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view stage, std::string_view reason)
{
  send_json(res, status, {{"error", {{"stage", stage}, {"reason", reason}}}});
}

json body_of(httplib::Request const& req)
{
  auto doc = json::parse(req.body, nullptr, false);
  return doc.is_object() ? doc : json::object();
}

std::string text_of(json const& doc, char const* key)
{
  auto it = doc.find(key);
  return it != doc.end() && it->is_string() ? it->get<std::string>() : std::string{};
}
}

struct SimServer::Impl
{
  httplib::Server http;
};

SimServer::SimServer(std::vector<VulnProfile> profiles, Clock clock)
  : impl_(std::make_unique<Impl>())
{
  for (auto& p : profiles)
  {
    auto label = p.label;
    if (servers_.contains(label))
      throw Error("duplicate profile label '" + label + "'");
    servers_.emplace(label, std::make_unique<ProfileServer>(std::move(p), clock));
    order_.push_back(std::move(label));
  }

  auto& http = impl_->http;
  // httplib's default also sets SO_REUSEPORT, which lets a second server bind
  // a port that is already in use.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  auto lookup = [this](httplib::Request const& req, httplib::Response& res) -> ProfileServer* {
    auto it = servers_.find(req.matches[1].str());
    if (it == servers_.end())
    {
      send_error(res, 404, "route", "unknown profile");
      return nullptr;
    }
    return it->second.get();
  };

  http.Post(R"(/p/([^/]+)/query)", [lookup](httplib::Request const& req, httplib::Response& res) {
    auto* server = lookup(req, res);
    if (!server)
      return;
    auto const doc = body_of(req);
    auto address = text_of(doc, "address");
    if (address.empty())
      address = req.get_header_value("x-viewer-addr");
    QueryResult q;
    try
    {
      q = server->handle_query(address);
    }
    catch (Error const& e)
    {
      send_error(res, 400, "malformed", e.what());
      return;
    }
    json auth = json::object();
    if (server->profile().query_mode == QueryMode::Nonce)
      auth["nonce"] = q.nonce;
    else
      auth["message"] = q.message;
    send_json(res, 200, {{"data", {{"auth", auth}}}});
  });

  http.Post(R"(/p/([^/]+)/auth)", [lookup](httplib::Request const& req, httplib::Response& res) {
    auto* server = lookup(req, res);
    if (!server)
      return;
    auto const doc = body_of(req);
    auto address = text_of(doc, "address");
    if (server->profile().address_in_header || address.empty())
    {
      auto header = req.get_header_value("x-viewer-addr");
      if (!header.empty())
        address = header;
    }
    auto const result =
      server->handle_auth(address, text_of(doc, "message"), text_of(doc, "signature"));
    if (!result.ok())
    {
      send_error(res, result.rejection == Rejection::Malformed ? 400 : 401,
                 to_string(result.rejection), result.reason);
      return;
    }
    send_json(res, 200, {{"data", {{"auth", {{"token", result.token}}}}}});
  });

  http.Get(R"(/p/([^/]+)/access)", [lookup](httplib::Request const& req, httplib::Response& res) {
    auto* server = lookup(req, res);
    if (!server)
      return;
    auto header = req.get_header_value("Authorization");
    constexpr std::string_view bearer = "Bearer ";
    auto const token = header.starts_with(bearer) ? header.substr(bearer.size()) : std::string{};
    auto const info = server->handle_access(token);
    if (!info)
    {
      send_error(res, 401, "access", "invalid or expired token");
      return;
    }
    send_json(res, 200, {{"data", {{"address", info->address}, {"profile", info->profile}}}});
  });

  http.Get("/profiles", [this](httplib::Request const&, httplib::Response& res) {
    json labels = json::array();
    for (auto const& l : order_)
      labels.push_back(l);
    send_json(res, 200, {{"profiles", labels}});
  });
}

SimServer::~SimServer()
{
  stop();
}

int SimServer::start(std::string const& host, int port)
{
  auto& http = impl_->http;
  host_ = host;
  if (port == 0)
    port_ = http.bind_to_any_port(host);
  else
    port_ = http.bind_to_port(host, port) ? port : -1;
  if (port_ <= 0)
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
  http.wait_until_ready();
  return port_;
}

void SimServer::run(std::string const& host, int port)
{
  auto& http = impl_->http;
  host_ = host;
  port_ = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (port_ <= 0)
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  http.listen_after_bind();
}

void SimServer::stop()
{
  impl_->http.stop();
  if (thread_.joinable())
    thread_.join();
}

std::string SimServer::base_url() const
{
  return "http://" + host_ + ":" + std::to_string(port_);
}

ProfileServer& SimServer::profile(std::string const& label)
{
  auto it = servers_.find(label);
  if (it == servers_.end())
    throw Error("unknown profile '" + label + "'");
  return *it->second;
}

std::vector<VulnProfile> SimServer::profiles() const
{
  std::vector<VulnProfile> out;
  for (auto const& l : order_)
    out.push_back(servers_.at(l)->profile());
  return out;
}

flex::TargetConfig target_for(VulnProfile const& profile, std::string const& base_url)
{
  auto const prefix = base_url + "/p/" + profile.label;
  flex::TargetConfig t;
  t.label = profile.label;
  t.host = profile.site_domain;
  t.expected_name = profile.site_name;
  t.token_key = "token";

  if (profile.query_mode != QueryMode::None)
  {
    flex::RequestItem q;
    q.role = flex::Role::Query;
    q.method = "POST";
    q.url = prefix + "/query";
    q.body = R"({"address":"{{ addr }}"})";
    if (profile.query_mode == QueryMode::Nonce)
      q.outputs["nonce"] = "data.auth.nonce";
    else
      q.outputs["msg"] = "data.auth.message";
    t.requests.push_back(std::move(q));
  }

  flex::RequestItem a;
  a.role = flex::Role::Auth;
  a.method = "POST";
  a.url = prefix + "/auth";
  if (profile.address_in_header)
  {
    a.headers.emplace_back("x-viewer-addr", "{{ addr }}");
    a.body = profile.query_mode == QueryMode::Nonce
               ? R"({"message":"{{ msg }}","nonce":"{{ nonce }}","signature":"{{ sig }}"})"
               : R"({"message":"{{ msg }}","signature":"{{ sig }}"})";
  }
  else
  {
    a.body = R"({"address":"{{ addr }}","message":"{{ msg }}","signature":"{{ sig }}"})";
  }
  if (profile.query_mode != QueryMode::Message)
    a.inputs["msg"] = frontend_template(profile);
  a.outputs["token"] = "data.auth.token";
  t.requests.push_back(std::move(a));

  flex::RequestItem x;
  x.role = flex::Role::Access;
  x.method = "GET";
  x.url = prefix + "/access";
  x.headers.emplace_back("Authorization", "Bearer {{ token }}");
  x.outputs["access_address"] = "data.address";
  t.requests.push_back(std::move(x));
  return t;
}
}

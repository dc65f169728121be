#include <w3a/flexrequest.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace w3a::flex
{
namespace
{
using ojson = nlohmann::ordered_json;

std::string upper(std::string_view s)
{
  std::string out(s);
  for (auto& c : out)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::pair<std::size_t, std::size_t> location(std::string_view doc, std::size_t byte)
{
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, doc.size()); ++i)
  {
    if (doc[i] == '\n')
    {
      ++line;
      column = 1;
    }
    else
    {
      ++column;
    }
  }
  return {line, column};
}

std::string text_field(ojson const& obj, char const* key, std::string const& fallback = {})
{
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    return fallback;
  if (!it->is_string())
    throw InvalidTarget(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::map<std::string, std::string> string_map(ojson const& obj, char const* key)
{
  std::map<std::string, std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    return out;
  if (!it->is_object())
    throw InvalidTarget(std::string("field '") + key + "' must be an object");
  for (auto const& [k, v] : it->items())
    out[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return out;
}

RequestItem parse_item(ojson const& obj)
{
  if (!obj.is_object())
    throw InvalidTarget("request entries must be objects");
  RequestItem item;
  auto const role = role_from_string(text_field(obj, "role"));
  if (!role)
    throw InvalidTarget("unknown request role '" + text_field(obj, "role") + "'");
  item.role = *role;
  item.method = upper(text_field(obj, "method", "POST"));
  item.url = text_field(obj, "url");
  if (item.url.empty())
    throw InvalidTarget("request without url");

  if (auto it = obj.find("headers"); it != obj.end() && !it->is_null())
  {
    if (!it->is_object())
      throw InvalidTarget("field 'headers' must be an object");
    for (auto const& [k, v] : it->items())
      item.headers.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
  }

  if (auto it = obj.find("body"); it != obj.end() && !it->is_null())
    item.body = it->is_string() ? it->get<std::string>() : it->dump();
  item.inputs = string_map(obj, "inputs");
  item.outputs = string_map(obj, "outputs");
  return item;
}

TargetConfig parse_target(ojson const& obj)
{
  if (!obj.is_object())
    throw InvalidTarget("target entries must be objects");
  TargetConfig target;
  target.label = text_field(obj, "label");
  if (target.label.empty())
    throw InvalidTarget("target without label");
  target.host = text_field(obj, "host");
  target.expected_name = text_field(obj, "expected_name");
  target.token_key = text_field(obj, "token_key", "token");

  auto it = obj.find("requests");
  if (it == obj.end() || !it->is_array())
    throw InvalidTarget(target.label + ": 'requests' must be an array");

  std::map<Role, int> seen;
  for (auto const& entry : *it)
  {
    auto item = parse_item(entry);
    if (++seen[item.role] > 1)
      throw InvalidTarget(target.label + ": duplicate " + std::string(to_string(item.role)) +
                          " request");
    target.requests.push_back(std::move(item));
  }
  if (!seen.contains(Role::Auth))
    throw InvalidTarget(target.label + ": missing AUTH request");

  std::stable_sort(target.requests.begin(), target.requests.end(),
                   [](auto const& a, auto const& b) { return a.role < b.role; });
  return target;
}
}

ParseError::ParseError(std::string const& what, std::size_t line, std::size_t column)
  : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
    line_(line), column_(column)
{
}

MissingKey::MissingKey(std::string key) : Error("unresolved placeholder '" + key + "'"),
                                          key_(std::move(key))
{
}

std::string_view to_string(Role role)
{
  switch (role)
  {
  case Role::Query:
    return "QUERY";
  case Role::Auth:
    return "AUTH";
  case Role::Access:
    return "ACCESS";
  }
  return "AUTH";
}

std::optional<Role> role_from_string(std::string_view text)
{
  auto const u = upper(text);
  if (u == "QUERY")
    return Role::Query;
  if (u == "AUTH")
    return Role::Auth;
  if (u == "ACCESS")
    return Role::Access;
  return std::nullopt;
}

RequestItem const* TargetConfig::find(Role role) const
{
  auto it = std::find_if(requests.begin(), requests.end(),
                         [&](auto const& r) { return r.role == role; });
  return it == requests.end() ? nullptr : &*it;
}

std::vector<TargetConfig> load_targets(std::string_view document)
{
  ojson doc;
  try
  {
    doc = ojson::parse(document.begin(), document.end());
  }
  catch (nlohmann::json::parse_error const& e)
  {
    auto const [line, column] = location(document, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed target collection", line, column);
  }

  if (!doc.is_object())
    throw ParseError("target collection must be a JSON object", 1, 1);
  auto it = doc.find("targets");
  if (it == doc.end() || it->is_null())
    return {};
  if (!it->is_array())
    throw InvalidTarget("'targets' must be an array");

  std::vector<TargetConfig> out;
  for (auto const& entry : *it)
    out.push_back(parse_target(entry));
  return out;
}

std::string dump_targets(std::span<const TargetConfig> targets)
{
  auto list = ojson::array();
  for (auto const& t : targets)
  {
    ojson obj;
    obj["label"] = t.label;
    obj["host"] = t.host;
    obj["expected_name"] = t.expected_name;
    obj["token_key"] = t.token_key;
    auto requests = ojson::array();
    for (auto const& r : t.requests)
    {
      ojson item;
      item["role"] = std::string(to_string(r.role));
      item["method"] = r.method;
      item["url"] = r.url;
      item["headers"] = ojson::object();
      for (auto const& [k, v] : r.headers)
        item["headers"][k] = v;
      item["body"] = r.body;
      item["inputs"] = ojson::object();
      for (auto const& [k, v] : r.inputs)
        item["inputs"][k] = v;
      item["outputs"] = ojson::object();
      for (auto const& [k, v] : r.outputs)
        item["outputs"][k] = v;
      requests.push_back(std::move(item));
    }
    obj["requests"] = std::move(requests);
    list.push_back(std::move(obj));
  }
  ojson doc;
  doc["targets"] = std::move(list);
  return doc.dump(2) + "\n";
}
}

#include <w3a/message.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

namespace w3a::message
{
namespace
{
struct LabelKeyword
{
  std::string_view suffix; // lowercase, compared against the end of the label
  FieldKind kind;
};

constexpr std::array<LabelKeyword, 11> label_keywords{{
    {"nonce", FieldKind::Nonce},
    {"timestamp", FieldKind::Nonce},
    {"address", FieldKind::Address},
    {"version", FieldKind::Version},
    {"chain id", FieldKind::ChainId},
    {"chain-id", FieldKind::ChainId},
    {"issued at", FieldKind::IssuedAt},
    {"expiration time", FieldKind::ExpirationTime},
    {"not before", FieldKind::NotBefore},
    {"request id", FieldKind::RequestId},
    {"request-id", FieldKind::RequestId},
}};

constexpr std::array<std::string_view, 8> name_lead_ins{
    "welcome to ", "connect to ", "sign in to ", "log in to ",
    "login to ",   "sign into ",  "this is ",    "signing in to "};

bool is_space(char c)
{
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_alnum(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Occupied byte ranges; a new field may only claim free bytes.
class Occupancy
{
public:
  bool is_free(Span s) const
  {
    return std::none_of(taken_.begin(), taken_.end(), [&](Span const& t) {
      return s.begin < t.end && t.begin < s.end;
    });
  }
  void take(Span s)
  {
    taken_.push_back(s);
  }
  std::vector<Span> const& spans() const
  {
    return taken_;
  }

private:
  std::vector<Span> taken_;
};

struct Line
{
  std::size_t begin;
  std::size_t end; // excludes the newline
};

std::vector<Line> split_lines(std::string_view raw)
{
  std::vector<Line> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= raw.size(); ++i)
  {
    if (i == raw.size() || raw[i] == '\n')
    {
      lines.push_back({start, i});
      start = i + 1;
    }
  }
  return lines;
}

bool label_text_ok(std::string_view text)
{
  if (text.empty())
    return false;
  int words = 1;
  for (auto c : text)
  {
    if (c == ' ')
      ++words;
    else if (!is_alnum(c) && c != '-')
      return false;
  }
  return words <= 4;
}

std::size_t skip_blank(std::string_view raw, std::size_t pos, bool allow_newline)
{
  while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t' ||
                              (allow_newline && (raw[pos] == '\n' || raw[pos] == '\r'))))
    ++pos;
  return pos;
}

void find_labelled(std::string_view raw, std::vector<Line> const& lines,
                   std::vector<Field>& fields, Occupancy& occ, std::vector<Span>& labels)
{
  for (auto const& line : lines)
  {
    auto const text = raw.substr(line.begin, line.end - line.begin);
    auto const colon = text.find(':');
    if (colon == std::string_view::npos)
      continue;
    auto lead = text.find_first_not_of(" \t");
    auto const label_text = text.substr(lead, colon - lead);
    if (!label_text_ok(label_text))
      continue;
    auto const lowered = lower(label_text);

    auto const kw = std::find_if(label_keywords.begin(), label_keywords.end(),
                                 [&](LabelKeyword const& k) {
                                   return lowered.size() >= k.suffix.size() &&
                                          lowered.ends_with(k.suffix);
                                 });
    if (kw == label_keywords.end())
      continue;
    if (std::any_of(fields.begin(), fields.end(),
                    [&](Field const& f) { return f.kind == kw->kind; }))
      continue;

    // Value on the same line, or on the next line when the label ends it.
    auto pos = skip_blank(raw, line.begin + colon + 1, false);
    if (pos < raw.size() && (raw[pos] == '\n' || raw[pos] == '\r'))
      pos = skip_blank(raw, pos, true);
    auto end = pos;
    while (end < raw.size() && !is_space(raw[end]))
      ++end;
    if (end == pos)
      continue;

    auto const value = raw.substr(pos, end - pos);
    if (kw->kind == FieldKind::Address && !is_address_token(value))
      continue;

    Span const value_span{pos, end};
    Span const label_span{line.begin + lead, line.begin + colon + 1};
    if (!occ.is_free(value_span))
      continue;
    occ.take(label_span);
    occ.take(value_span);
    labels.push_back(label_span);
    fields.push_back({kw->kind, std::string(value), value_span,
                      std::string(raw.substr(label_span.begin, label_span.size()))});
  }
}

void find_bare_address(std::string_view raw, std::vector<Field>& fields, Occupancy& occ)
{
  if (std::any_of(fields.begin(), fields.end(),
                  [](Field const& f) { return f.kind == FieldKind::Address; }))
    return;
  for (std::size_t pos = raw.find("0x"); pos != std::string_view::npos;
       pos = raw.find("0x", pos + 1))
  {
    if (pos > 0 && is_alnum(raw[pos - 1]))
      continue;
    Span const s{pos, pos + 42};
    if (s.end > raw.size() || !is_address_token(raw.substr(pos, 42)))
      continue;
    if (s.end < raw.size() && is_alnum(raw[s.end]))
      continue;
    if (!occ.is_free(s))
      continue;
    occ.take(s);
    fields.push_back({FieldKind::Address, std::string(raw.substr(pos, 42)), s, {}});
    return;
  }
}

bool host_char(char c)
{
  return is_alnum(c) || c == '.' || c == '-';
}

// A dot-separated hostname whose last label is alphabetic and at least two
// characters long. Returns the length of the accepted prefix, or 0.
std::size_t hostname_length(std::string_view run)
{
  while (!run.empty() && (run.back() == '.' || run.back() == '-'))
    run.remove_suffix(1);
  if (run.find('.') == std::string_view::npos)
    return 0;

  std::size_t start = 0;
  std::string_view last;
  while (start <= run.size())
  {
    auto const dot = run.find('.', start);
    auto const label = run.substr(start, dot == std::string_view::npos ? run.npos : dot - start);
    if (label.empty() || label.front() == '-' || label.back() == '-' || label.size() > 63)
      return 0;
    last = label;
    if (dot == std::string_view::npos)
      break;
    start = dot + 1;
  }
  if (last.size() < 2 ||
      !std::all_of(last.begin(), last.end(),
                   [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
    return 0;
  return run.size();
}

void find_domains(std::string_view raw, std::vector<Field>& fields, Occupancy& occ)
{
  std::size_t i = 0;
  while (i < raw.size())
  {
    if (!host_char(raw[i]) || (i > 0 && host_char(raw[i - 1])))
    {
      ++i;
      continue;
    }
    auto j = i;
    while (j < raw.size() && host_char(raw[j]))
      ++j;
    auto const len = hostname_length(raw.substr(i, j - i));
    if (len > 0)
    {
      Span s{i, i + len};
      auto const host = raw.substr(i, len);
      // Optional port, part of the authority.
      if (s.end + 1 < raw.size() && raw[s.end] == ':' && std::isdigit(static_cast<unsigned char>(raw[s.end + 1])))
      {
        auto p = s.end + 1;
        while (p < raw.size() && std::isdigit(static_cast<unsigned char>(raw[p])) && p - s.end <= 5)
          ++p;
        s.end = p;
      }
      if (occ.is_free(s))
      {
        occ.take(s);
        fields.push_back({FieldKind::Domain, std::string(host), s, {}});
      }
    }
    i = j;
  }
}

void find_name(std::string_view raw, std::vector<Line> const& lines, ParseHints const& hints,
               std::vector<Field>& fields, Occupancy& occ)
{
  auto const lowered = lower(raw);
  if (!hints.expected_name.empty())
  {
    auto const needle = lower(hints.expected_name);
    for (auto pos = lowered.find(needle); pos != std::string::npos;
         pos = lowered.find(needle, pos + 1))
    {
      Span const s{pos, pos + needle.size()};
      if (!occ.is_free(s))
        continue;
      occ.take(s);
      fields.push_back({FieldKind::Name, std::string(raw.substr(pos, needle.size())), s, {}});
      return;
    }
    return;
  }

  // Without a hint: a capitalised token after a greeting phrase in the first
  // two lines.
  auto const limit = lines.size() > 1 ? lines[1].end : lines.front().end;
  for (auto lead : name_lead_ins)
  {
    for (auto pos = lowered.find(lead); pos != std::string::npos && pos < limit;
         pos = lowered.find(lead, pos + 1))
    {
      auto start = pos + lead.size();
      auto end = start;
      while (end < raw.size() && is_alnum(raw[end]))
        ++end;
      if (end == start || !std::isupper(static_cast<unsigned char>(raw[start])))
        continue;
      // "Foundation.com" is a domain, not a name.
      if (end + 1 < raw.size() && raw[end] == '.' && is_alnum(raw[end + 1]))
        continue;
      Span const s{start, end};
      if (!occ.is_free(s))
        continue;
      occ.take(s);
      fields.push_back({FieldKind::Name, std::string(raw.substr(start, end - start)), s, {}});
      return;
    }
  }
}

void find_statements(std::string_view raw, std::vector<Line> const& lines,
                     std::vector<Field>& fields, Occupancy const& occ)
{
  auto taken = occ.spans();
  std::sort(taken.begin(), taken.end(),
            [](Span const& a, Span const& b) { return a.begin < b.begin; });

  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e && is_space(raw[b]))
      ++b;
    while (e > b && is_space(raw[e - 1]))
      --e;
    auto const text = raw.substr(b, e - b);
    if (std::any_of(text.begin(), text.end(),
                    [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
      fields.push_back({FieldKind::Statement, std::string(text), {b, e}, {}});
  };

  for (auto const& line : lines)
  {
    auto cursor = line.begin;
    for (auto const& t : taken)
    {
      if (t.end <= cursor || t.begin >= line.end)
        continue;
      if (t.begin > cursor)
        emit(cursor, t.begin);
      cursor = std::max(cursor, t.end);
    }
    if (cursor < line.end)
      emit(cursor, line.end);
  }
}
}

std::string_view to_string(FieldKind kind)
{
  switch (kind)
  {
  case FieldKind::Statement:
    return "statement";
  case FieldKind::Domain:
    return "domain";
  case FieldKind::Name:
    return "name";
  case FieldKind::Nonce:
    return "nonce";
  case FieldKind::Address:
    return "address";
  case FieldKind::Version:
    return "version";
  case FieldKind::ChainId:
    return "chain-id";
  case FieldKind::IssuedAt:
    return "issued-at";
  case FieldKind::ExpirationTime:
    return "expiration-time";
  case FieldKind::NotBefore:
    return "not-before";
  case FieldKind::RequestId:
    return "request-id";
  }
  return "statement";
}

bool is_variable(FieldKind kind)
{
  switch (kind)
  {
  case FieldKind::Nonce:
  case FieldKind::Address:
  case FieldKind::IssuedAt:
  case FieldKind::ExpirationTime:
  case FieldKind::NotBefore:
  case FieldKind::RequestId:
    return true;
  default:
    return false;
  }
}

Field const* ParsedMessage::find(FieldKind kind) const
{
  auto const it = std::find_if(fields.begin(), fields.end(),
                               [&](Field const& f) { return f.kind == kind; });
  return it == fields.end() ? nullptr : &*it;
}

ParsedMessage parse_message(std::string_view raw, ParseHints const& hints)
{
  ParsedMessage out;
  out.raw = std::string(raw);
  if (raw.empty())
    return out;

  auto const lines = split_lines(raw);
  Occupancy occ;
  std::vector<Span> labels;

  find_labelled(raw, lines, out.fields, occ, labels);
  find_bare_address(raw, out.fields, occ);
  find_domains(raw, out.fields, occ);
  find_name(raw, lines, hints, out.fields, occ);
  find_statements(raw, lines, out.fields, occ);

  std::sort(out.fields.begin(), out.fields.end(),
            [](Field const& a, Field const& b) { return a.span.begin < b.span.begin; });

  std::size_t cursor = 0;
  for (auto const& f : out.fields)
  {
    if (!is_variable(f.kind))
      continue;
    out.body.append(raw.substr(cursor, f.span.begin - cursor));
    cursor = f.span.end;
  }
  out.body.append(raw.substr(cursor));
  return out;
}

std::string reconstruct(ParsedMessage const& parsed)
{
  std::string out;
  std::size_t body_cursor = 0;
  std::size_t raw_cursor = 0;
  for (auto const& f : parsed.fields)
  {
    if (!is_variable(f.kind))
      continue;
    auto const gap = f.span.begin - raw_cursor;
    out.append(parsed.body, body_cursor, gap);
    body_cursor += gap;
    out.append(f.value);
    raw_cursor = f.span.end;
  }
  out.append(parsed.body, body_cursor);
  return out;
}
}

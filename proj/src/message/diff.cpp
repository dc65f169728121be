#include <w3a/message.hpp>

#include <algorithm>

namespace w3a::message
{
namespace
{
// For each token of `a`, the index of the token of `b` it is paired with in a
// longest common subsequence, or npos.
std::vector<std::size_t> lcs_pairing(std::vector<std::string> const& a,
                                     std::vector<std::string> const& b)
{
  auto const n = a.size();
  auto const m = b.size();
  std::vector<std::vector<std::uint32_t>> len(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      len[i][j] = a[i] == b[j] ? len[i + 1][j + 1] + 1 : std::max(len[i + 1][j], len[i][j + 1]);

  std::vector<std::size_t> pair(n, std::string::npos);
  std::size_t i = 0, j = 0;
  while (i < n && j < m)
  {
    if (a[i] == b[j])
      pair[i++] = j++;
    else if (len[i + 1][j] >= len[i][j + 1])
      ++i;
    else
      ++j;
  }
  return pair;
}

NonceValueKind common_kind(std::vector<std::string> const& values)
{
  auto const first = classify_nonce_value(values.front());
  for (auto const& v : values)
    if (v.empty() || classify_nonce_value(v) != first)
      return NonceValueKind::Random;
  return first;
}
}

std::vector<VariableSpan> detect_variable_spans(std::span<const std::string> messages)
{
  if (messages.size() < 2)
    throw NeedMultipleSamples();

  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(messages.size());
  for (auto const& m : messages)
    tokens.push_back(tokenize(m));

  auto const& base = tokens.front();
  auto const same_shape = std::all_of(tokens.begin(), tokens.end(), [&](auto const& t) {
    return t.size() == base.size();
  });

  // aligned[k][i]: token of message k paired with base token i ("" if none).
  std::vector<std::vector<std::string>> aligned(tokens.size());
  for (std::size_t k = 0; k < tokens.size(); ++k)
  {
    if (same_shape)
    {
      aligned[k] = tokens[k];
      continue;
    }
    auto const pair = lcs_pairing(base, tokens[k]);
    aligned[k].resize(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
      if (pair[i] != std::string::npos)
        aligned[k][i] = tokens[k][pair[i]];
  }

  std::vector<VariableSpan> out;
  for (std::size_t i = 0; i < base.size(); ++i)
  {
    VariableSpan span;
    span.token_index = i;
    bool differs = false;
    for (std::size_t k = 0; k < tokens.size(); ++k)
    {
      span.values.push_back(aligned[k][i]);
      differs = differs || aligned[k][i] != base[i];
    }
    if (!differs)
      continue;
    span.kind = common_kind(span.values);
    span.non_nonce = std::all_of(span.values.begin(), span.values.end(),
                                 [](std::string const& v) { return is_address_token(v); });
    out.push_back(std::move(span));
  }
  return out;
}
}

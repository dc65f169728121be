#pragma once

#include <w3a/error.hpp>
#include <w3a/vulnsim.hpp>

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Subcommands of the web3auth tool, callable without a process boundary.
namespace w3a::cli
{
struct CliConfig
{
  std::string targets_path;
  std::string profiles_path;
  std::string out_path;       // empty: standard output
  std::string format = "markdown"; // json | markdown
  std::optional<std::chrono::milliseconds> interval; // unset: 60 s remote, 0 loopback
  std::chrono::milliseconds timeout{10000};
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool timing = false; // include per-checker timings in JSON reports

  // Throws Error when a field is out of range.
  void validate() const;
};

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_vulnerable = 2;
inline constexpr int exit_red = 3;
inline constexpr int exit_yellow = 4;

int cmd_scan(CliConfig const& config, std::ostream& out, std::ostream& err);

// Serves until request_stop() (or SIGINT/SIGTERM in the tool).
int cmd_sim(CliConfig const& config, std::string const& host, int port, std::ostream& out,
            std::ostream& err);
void request_stop();

int cmd_guard(std::string const& store_path, std::string const& action, std::string const& origin,
              std::string const& message, std::ostream& out, std::ostream& err);

// kind: table2 (profiles.json + targets.json) | guard-corpus (guard-corpus.json).
int cmd_fixtures(std::string const& kind, std::string const& out_dir, std::string const& base_url,
                 std::uint64_t seed, std::ostream& out, std::ostream& err);

struct CorpusSite
{
  sim::VulnProfile profile;
  std::vector<std::string> extraction; // the user's own logins, fed to the guard
  std::vector<sim::SlotValues> tests;  // values for five further messages
};

// The 25 user-login sites of the fleet with fresh variable values per message.
std::vector<CorpusSite> guard_corpus(std::uint64_t seed = 1);
std::string corpus_json(std::vector<CorpusSite> const& corpus);

// Parses argv and dispatches.
int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err);
}

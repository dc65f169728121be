#include <w3a/cli.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace w3a::cli
{
int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Web3 authentication scanner, simulator and wallet guard", "web3auth"};
  app.require_subcommand(1);

  CliConfig config;
  std::optional<std::int64_t> interval_ms;
  std::int64_t timeout_ms = 10000;

  auto* scan = app.add_subcommand("scan", "Probe every target and report its verdicts");
  scan->add_option("--targets", config.targets_path, "FlexRequest target collection")->required();
  scan->add_option("--out", config.out_path, "Report file (default: stdout)");
  scan->add_option("--format", config.format, "json | markdown")
    ->check(CLI::IsMember({"json", "markdown"}));
  scan->add_option("--interval", interval_ms,
                   "Minimum ms between requests to one host (default 60000, 0 on loopback)");
  scan->add_option("--timeout", timeout_ms, "Request timeout in ms");
  scan->add_option("--seed", config.seed, "Seed of the test wallets and probe strings");
  scan->add_option("--jobs", config.jobs, "Targets scanned in parallel");
  scan->add_flag("--timing", config.timing, "Include per-checker timings (JSON)");

  std::string host = "127.0.0.1";
  int port = 8545;
  auto* sim_cmd = app.add_subcommand("sim", "Serve the simulated sites");
  sim_cmd->add_option("--profiles", config.profiles_path, "Profile list (default: the 29-site fleet)");
  sim_cmd->add_option("--host", host, "Bind address");
  sim_cmd->add_option("--port", port, "Port (0 picks a free one)");

  std::string action, store_path, origin, message_text, message_file;
  auto* guard_cmd = app.add_subcommand("guard", "Record logins or check a signature request");
  guard_cmd->add_option("action", action, "record | check")
    ->required()
    ->check(CLI::IsMember({"record", "check"}));
  guard_cmd->add_option("--store", store_path, "Template store file")->required();
  guard_cmd->add_option("--origin", origin, "Requesting site")->required();
  auto* msg_opt = guard_cmd->add_option("--message", message_text, "Message text");
  auto* file_opt = guard_cmd->add_option("--message-file", message_file, "File holding the message");
  msg_opt->excludes(file_opt);

  std::string kind, out_dir = ".", base_url = "http://127.0.0.1:8545";
  std::uint64_t fixture_seed = 1;
  auto* fixtures = app.add_subcommand("fixtures", "Write fixture files");
  fixtures->add_option("kind", kind, "table2 | guard-corpus")->required();
  fixtures->add_option("--out", out_dir, "Output directory");
  fixtures->add_option("--base-url", base_url, "Simulator URL used in table2 targets");
  fixtures->add_option("--seed", fixture_seed, "Seed of the corpus values");

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const& e)
  {
    std::ostringstream o, r;
    auto const code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? exit_ok : exit_error;
  }

  if (interval_ms)
    config.interval = std::chrono::milliseconds(*interval_ms);
  config.timeout = std::chrono::milliseconds(timeout_ms);

  if (*scan)
    return cmd_scan(config, out, err);
  if (*sim_cmd)
  {
    try
    {
      config.validate();
    }
    catch (std::exception const& e)
    {
      err << "error: " << e.what() << "\n";
      return exit_error;
    }
    return cmd_sim(config, host, port, out, err);
  }
  if (*guard_cmd)
  {
    if (!message_file.empty())
    {
      std::ifstream in(message_file, std::ios::binary);
      if (!in)
      {
        err << "error: cannot read " << message_file << "\n";
        return exit_error;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      message_text = buf.str();
    }
    return cmd_guard(store_path, action, origin, message_text, out, err);
  }
  return cmd_fixtures(kind, out_dir, base_url, fixture_seed, out, err);
}
}

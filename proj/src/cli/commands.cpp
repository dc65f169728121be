#include <w3a/checker.hpp>
#include <w3a/cli.hpp>
#include <w3a/flexrequest.hpp>
#include <w3a/guard.hpp>

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace w3a::cli
{
namespace
{
std::atomic<bool> stop_requested{false};

std::string read_file(std::string const& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(std::filesystem::path const& path, std::string const& content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content))
    throw Error("cannot write " + path.string());
}
}

void CliConfig::validate() const
{
  if (interval && interval->count() < 0)
    throw Error("--interval must be >= 0");
  if (timeout.count() <= 0)
    throw Error("--timeout must be > 0");
  if (format != "json" && format != "markdown")
    throw Error("--format must be json or markdown");
  if (jobs == 0)
    throw Error("--jobs must be >= 1");
}

int cmd_scan(CliConfig const& config, std::ostream& out, std::ostream& err)
{
  std::vector<flex::TargetConfig> targets;
  try
  {
    config.validate();
    targets = flex::load_targets(read_file(config.targets_path));
  }
  catch (std::exception const& e)
  {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
  if (targets.empty())
  {
    err << "error: no targets\n";
    return exit_error;
  }

  flex::Policy policy;
  policy.timeout = config.timeout;
  policy.min_interval = config.interval;
  auto limiter = std::make_shared<flex::RateLimiter>();
  checker::KeyPool const keys(std::to_string(config.seed));
  checker::ScanOptions options;
  options.seed = config.seed;

  std::vector<checker::ScanReport> reports(targets.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < targets.size(); i = next++)
    {
      flex::HttpClient client(policy, limiter);
      try
      {
        reports[i] = checker::scan(targets[i], client, keys, options);
      }
      catch (std::exception const& e)
      {
        reports[i] = {};
        reports[i].label = targets[i].label;
        reports[i].inconclusive = e.what();
        reports[i].requests = client.request_count();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < std::min<std::size_t>(config.jobs, targets.size()); ++j)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();

  auto const text = config.format == "json" ? checker::report_json(reports, config.timing)
                                            : checker::report_markdown(reports);
  try
  {
    if (config.out_path.empty())
      out << text;
    else
      write_file(config.out_path, text);
  }
  catch (std::exception const& e)
  {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }

  bool vulnerable = false;
  bool broken = false;
  for (auto const& r : reports)
  {
    if (r.inconclusive)
    {
      broken = true;
      err << r.label << ": inconclusive: " << *r.inconclusive << "\n";
    }
    else if (r.risk != checker::RiskLevel::Low)
      vulnerable = true;
  }
  return broken ? exit_error : vulnerable ? exit_vulnerable : exit_ok;
}

void request_stop()
{
  stop_requested = true;
}

int cmd_sim(CliConfig const& config, std::string const& host, int port, std::ostream& out,
            std::ostream& err)
{
  try
  {
    auto profiles = config.profiles_path.empty() ? sim::fixture_table2()
                                                 : sim::load_profiles(read_file(config.profiles_path));
    if (profiles.empty())
      throw Error("no profiles");
    stop_requested = false;
    sim::SimServer server(std::move(profiles));
    server.start(host, port);
    for (auto const& p : server.profiles())
      out << p.label << " " << server.base_url() << "/p/" << p.label << "\n";
    out.flush();
    while (!stop_requested)
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    return exit_ok;
  }
  catch (std::exception const& e)
  {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
}

int cmd_guard(std::string const& store_path, std::string const& action, std::string const& origin,
              std::string const& message, std::ostream& out, std::ostream& err)
{
  try
  {
    if (origin.empty())
      throw Error("--origin is required");
    if (action == "record")
    {
      auto store = guard::TemplateStore::load(store_path);
      store.record_login(origin, message);
      store.save(store_path);
      out << "recorded " << guard::normalize_origin(origin) << " (" << store.size()
          << " domains)\n";
      return exit_ok;
    }
    if (action != "check")
      throw Error("unknown guard action: " + action);
    if (!std::filesystem::exists(store_path))
      throw Error("no template store at " + store_path);
    auto const store = guard::TemplateStore::load(store_path);
    auto const d = guard::check_signature_request(message, origin, store);
    nlohmann::ordered_json j;
    j["red"] = d.red ? nlohmann::ordered_json{{"victim_domain", d.red->victim_domain}}
                     : nlohmann::ordered_json(nullptr);
    j["yellow"] = d.yellow;
    out << j.dump() << "\n";
    return d.red ? exit_red : d.yellow ? exit_yellow : exit_ok;
  }
  catch (std::exception const& e)
  {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
}

int cmd_fixtures(std::string const& kind, std::string const& out_dir, std::string const& base_url,
                 std::uint64_t seed, std::ostream& out, std::ostream& err)
{
  try
  {
    std::filesystem::create_directories(out_dir);
    auto const dir = std::filesystem::path(out_dir);
    if (kind == "table2")
    {
      auto const profiles = sim::fixture_table2();
      std::vector<flex::TargetConfig> targets;
      for (auto const& p : profiles)
        targets.push_back(sim::target_for(p, base_url));
      write_file(dir / "profiles.json", sim::dump_profiles(profiles));
      write_file(dir / "targets.json", flex::dump_targets(targets));
      out << profiles.size() << " profiles and targets written to " << out_dir << "\n";
      return exit_ok;
    }
    if (kind == "guard-corpus")
    {
      auto const corpus = guard_corpus(seed);
      write_file(dir / "guard-corpus.json", corpus_json(corpus));
      out << corpus.size() << " sites written to " << out_dir << "\n";
      return exit_ok;
    }
    throw Error("unknown fixture kind: " + kind);
  }
  catch (std::exception const& e)
  {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
}
}

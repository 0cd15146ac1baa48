#include "sausagelab/app.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "sausage/error.hpp"
#include "sausage/report.hpp"

#ifndef SAUSAGELAB_VERSION
#define SAUSAGELAB_VERSION "0.0.0"
#endif

namespace sausagelab {
namespace fs = std::filesystem;

namespace {

using Command = void (*)(RunContext&, const sausage::MetricMeasureGraph&);

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"space-audit", space_audit}, {"spectral-audit", spectral_audit},
      {"sausage", sausage_scaling}, {"survival", survival},
      {"certify", certify},
  };
  return table;
}

constexpr const char* kSeedRule =
    "Philox4x32-10 keyed by the master seed; task k of family L draws from stream "
    "(L, k) with labels path=1 field=2 field_path=3 obstacle_tail=4 graph=5 subset=6 "
    "test_function=7; results are merged in task order";

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected a nonnegative integer, got '" + text + "'");
  }
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream file(path, std::ios::binary);
  file << doc.dump(2) << '\n';
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Random-walk sausage and obstacle experiments on metric measure graphs",
               "sausagelab"};
  app.set_version_flag("--version", SAUSAGELAB_VERSION);
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed_flag;
  std::optional<unsigned> workers_flag;
  for (const auto& [name, fn] : commands()) {
    (void)fn;
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--workers", workers_flag, "worker threads");
    sub->add_option("--seed", seed_flag, "master seed");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunContext ctx;
  ctx.command = command;
  std::string config_text;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError(config_path + ": cannot open");
    std::stringstream buffer;
    buffer << in.rdbuf();
    config_text = buffer.str();
    ctx.config = parse_config(config_text, config_path);

    if (seed_flag) {
      ctx.seed = *seed_flag;
    } else if (auto v = env("SAUSAGE_SEED")) {
      ctx.seed = parse_unsigned(*v, "SAUSAGE_SEED");
    } else {
      ctx.seed = static_cast<std::uint64_t>(get_int(ctx.config, "seed", "", 1));
    }
    long long workers = 1;
    if (workers_flag) {
      workers = *workers_flag;
    } else if (auto v = env("SAUSAGE_WORKERS")) {
      workers = static_cast<long long>(parse_unsigned(*v, "SAUSAGE_WORKERS"));
    } else {
      workers = get_int(ctx.config, "workers", "", 1);
    }
    if (workers < 1) throw ConfigError("workers must be at least 1");
    ctx.workers = static_cast<unsigned>(workers);
  } catch (const ConfigError& e) {
    std::cerr << "sausagelab: config error: " << e.what() << '\n';
    return kConfigError;
  }

  ctx.out = out_dir;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) {
    std::cerr << "sausagelab: cannot create " << out_dir << ": " << ec.message() << '\n';
    return kConfigError;
  }

  const std::string config_hash = sausage::hex64(sausage::fnv1a(ctx.config.dump()));
  json manifest = {
      {"subcommand", command},
      {"config_path", config_path},
      {"config_hash", config_hash},
      {"seed", ctx.seed},
      {"workers", ctx.workers},
      {"version", SAUSAGELAB_VERSION},
      {"started", utc_now()},
      {"finished", nullptr},
      {"output_dir", fs::absolute(ctx.out).string()},
      {"seed_rule", kSeedRule},
  };
  write_json(ctx.out / "manifest.json", manifest);

  int code = kOk;
  try {
    const sausage::SpaceDescriptor descriptor = parse_space(require(ctx.config, "space", ""), "space");
    const sausage::MetricMeasureGraph space = sausage::build_space(descriptor);
    commands().at(command)(ctx, space);
    if (!ctx.failures.empty()) {
      for (const std::string& f : ctx.failures) std::cerr << "sausagelab: assertion failed: " << f << '\n';
      code = kAssertionFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "sausagelab: config error: " << e.what() << '\n';
    code = kConfigError;
  } catch (const sausage::ResourceLimitError& e) {
    std::cerr << "sausagelab: resource limit: " << e.what() << '\n';
    code = kResourceLimit;
  } catch (const sausage::InvalidArgument& e) {
    std::cerr << "sausagelab: config error: " << e.what() << '\n';
    code = kConfigError;
  } catch (const sausage::Error& e) {
    std::cerr << "sausagelab: assertion failed: " << e.what() << '\n';
    ctx.failures.push_back(e.what());
    code = kAssertionFailed;
  } catch (const std::bad_alloc&) {
    std::cerr << "sausagelab: resource limit: out of memory\n";
    code = kResourceLimit;
  }

  if (code == kOk || code == kAssertionFailed) {
    json summary = ctx.summary;
    summary["subcommand"] = command;
    summary["config_hash"] = config_hash;
    summary["seed"] = ctx.seed;
    summary["failures"] = ctx.failures;
    summary["pass"] = ctx.failures.empty();
    write_json(ctx.out / ("summary_" + command + ".json"), summary);
  }
  manifest["finished"] = utc_now();
  manifest["exit_code"] = code;
  write_json(ctx.out / "manifest.json", manifest);
  return code;
}

}  // namespace sausagelab

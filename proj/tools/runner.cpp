#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "rpl/errors.hpp"

namespace rpt {

Command::Command(CLI::App& root, const std::string& name, const std::string& description)
    : name_(name), app_(root.add_subcommand(name, description)) {
  app_->add_option("--config", config_path, "JSON config file; flags override its values");
  app_->add_option("--out", out_dir, "output directory (files are never overwritten)")->capture_default_str();
  app_->add_option("--threads", threads, "worker threads (0: RP_TOOLKIT_THREADS or all cores)")
      ->capture_default_str();
  param("seed", seed, "random seed");
}

void Command::merge(const json& config) {
  for (const auto& [key, value] : config.items()) {
    if (key == "subcommand") {
      rpl::require(value.is_string() && value.get<std::string>() == name_,
                   "config file is for subcommand " + value.dump() + ", not " + name_);
      continue;
    }
    auto it = std::find_if(bindings_.begin(), bindings_.end(), [&](const Binding& b) { return b.name == key; });
    rpl::require(it != bindings_.end(), "unknown config key '" + key + "' for " + name_);
    if (it->option->count() == 0) {
      try {
        it->load(value);
      } catch (const json::exception& e) {
        throw rpl::ValidationError("config key '" + key + "': " + e.what());
      }
    }
  }
}

json Command::echo() const {
  json j = json::object();
  for (const auto& b : bindings_) b.dump(j, b.name);
  return j;
}

std::string tool_version() { return RPL_VERSION; }

Outputs::Outputs(const Command& cmd, std::vector<std::string> files) : dir_(cmd.out_dir), files_(std::move(files)) {
  header_["tool"] = "rp_toolkit";
  header_["version"] = tool_version();
  header_["subcommand"] = cmd.name();
  header_["seed"] = cmd.seed;
  header_["config"] = cmd.echo();
  header_["files"] = files_;
  std::filesystem::create_directories(dir_);
  for (const auto& f : files_)
    rpl::require(!std::filesystem::exists(path(f)), "refusing to overwrite existing output " + path(f));
}

std::string Outputs::path(const std::string& file) const { return (std::filesystem::path(dir_) / file).string(); }

void Outputs::write_json(const std::string& file, json result) const {
  json doc = header_;
  doc["result"] = std::move(result);
  rpl::write_text_file(path(file), doc.dump(2) + "\n");
}

void Outputs::write_csv(const std::string& file, const std::vector<std::string>& schema,
                        const std::vector<std::vector<rpl::CsvValue>>& rows,
                        const std::vector<std::string>& extra) const {
  std::vector<std::string> meta{"tool=rp_toolkit", "version=" + tool_version(),
                                "subcommand=" + header_["subcommand"].get<std::string>(),
                                "seed=" + std::to_string(header_["seed"].get<std::uint64_t>()),
                                "config=" + header_["config"].dump()};
  meta.insert(meta.end(), extra.begin(), extra.end());
  rpl::emit_csv(path(file), schema, rows, meta);
}

json num(double v) {
  if (std::isfinite(v)) return v;
  return rpl::format_double(v);
}

json certificate_json(const rpl::Certificate& cert) {
  json j;
  j["name"] = cert.name;
  j["verdict"] = cert.pass ? "PASS" : "FAIL";
  json p = json::object(), q = json::object();
  for (const auto& [k, v] : cert.parameters) p[k] = num(v);
  for (const auto& [k, v] : cert.quantities) q[k] = num(v);
  j["parameters"] = p;
  j["quantities"] = q;
  json checks = json::array();
  for (const auto& c : cert.checks)
    checks.push_back({{"what", c.what}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}, {"pass", c.pass}});
  j["checks"] = checks;
  if (!cert.note.empty()) j["note"] = cert.note;
  return j;
}

}  // namespace rpt

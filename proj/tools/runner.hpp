#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <type_traits>
#include <vector>

#include "rpl/certificate.hpp"
#include "rpl/csv.hpp"

namespace rpt {

using json = nlohmann::ordered_json;

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitFailed = 2;

// A subcommand's parameters: each one is a CLI flag and a config-file key of
// the same name. Flags win over the config file; the merged values are echoed
// into every output.
class Command {
 public:
  Command(CLI::App& root, const std::string& name, const std::string& description);

  template <class T>
  void param(const std::string& name, T& var, const std::string& description) {
    CLI::Option* opt = app_->add_option("--" + name, var, description)->capture_default_str();
    if constexpr (is_vector<T>::value) opt->delimiter(',');
    bindings_.push_back({name, opt, [&var](const json& j) { var = j.get<T>(); },
                         [&var](json& j, const std::string& n) { j[n] = var; }});
  }

  CLI::App* app() const { return app_; }
  const std::string& name() const { return name_; }
  bool selected() const { return app_->parsed(); }

  // Fills parameters absent from the command line from the config object.
  void merge(const json& config);
  json echo() const;

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  std::uint64_t seed = 1;
  std::function<int(Command&)> body;

 private:
  struct Binding {
    std::string name;
    CLI::Option* option;
    std::function<void(const json&)> load;
    std::function<void(json&, const std::string&)> dump;
  };
  std::string name_;
  CLI::App* app_;
  std::vector<Binding> bindings_;
};

// Write-once artifact writer for one run.
class Outputs {
 public:
  Outputs(const Command& cmd, std::vector<std::string> files);
  void write_json(const std::string& file, json result) const;
  void write_csv(const std::string& file, const std::vector<std::string>& schema,
                 const std::vector<std::vector<rpl::CsvValue>>& rows, const std::vector<std::string>& extra = {}) const;

 private:
  std::string path(const std::string& file) const;
  std::string dir_;
  json header_;
  std::vector<std::string> files_;
};

// JSON number, or a string for inf/nan.
json num(double v);
json certificate_json(const rpl::Certificate& cert);

std::string tool_version();

}  // namespace rpt

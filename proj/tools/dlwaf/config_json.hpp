// Copyright 2026 The dlwaf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace dlwaf::cli {

// JSON config files for CLI11: one object per subcommand, keys are long option names.
class ConfigJson : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return collect(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, "", {}, items);
    return items;
  }

 private:
  // Numbers are written as JSON numbers, everything else as strings.
  static nlohmann::json typed(const std::string& value) {
    nlohmann::json v = nlohmann::json::parse(value, nullptr, false);
    if (!v.is_discarded() && v.is_number()) return v;
    return value;
  }

  static nlohmann::json collect(const CLI::App* app, bool default_also) {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames()[0];
      if (name == "help" || name == "help-all") continue;
      if (opt->get_type_size() != 0) {
        if (opt->count() == 1) {
          j[name] = typed(opt->results().at(0));
        } else if (opt->count() > 1) {
          nlohmann::json list = nlohmann::json::array();
          for (const auto& r : opt->results()) list.push_back(typed(r));
          j[name] = list;
        } else if (default_also && !opt->get_default_str().empty()) {
          j[name] = typed(opt->get_default_str());
        }
      } else if (opt->count() > 0) {
        j[name] = true;
      } else if (default_also) {
        j[name] = false;
      }
    }
    for (const CLI::App* sub : app->get_subcommands()) j[sub->get_name()] = collect(sub, default_also);
    return j;
  }

  static void flatten(const nlohmann::json& j, const std::string& name, std::vector<std::string> prefix,
                      std::vector<CLI::ConfigItem>& out) {
    if (j.is_object()) {
      if (!name.empty()) prefix.push_back(name);
      for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, it.key(), prefix, out);
      return;
    }
    CLI::ConfigItem item;
    item.name = name;
    item.parents = std::move(prefix);
    if (j.is_boolean()) {
      item.inputs = {j.get<bool>() ? "true" : "false"};
    } else if (j.is_string()) {
      item.inputs = {j.get<std::string>()};
    } else if (j.is_number()) {
      item.inputs = {j.dump()};
    } else if (j.is_array()) {
      for (const auto& v : j) item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    } else {
      throw CLI::ConversionError("unsupported config value for " + name);
    }
    out.push_back(std::move(item));
  }
};

}  // namespace dlwaf::cli

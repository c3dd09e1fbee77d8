// Copyright 2026 The lataddr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: lataddr [config.json] [--set key=value ...]
//                                 [--output PATH] [--format csv|json] [--seed N]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lataddr/cli_reporting.hpp"
#include "lataddr/errors.hpp"

namespace {

nlohmann::json load_document(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lataddr::IoError("cannot read config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return nlohmann::json::parse(text.str());
    } catch (const nlohmann::json::parse_error &e) {
        throw lataddr::ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Site-selective addressing simulator for optical-lattice registers"};
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
    std::string format;
    std::uint64_t seed = 0;

    app.add_option("config", config_path, "Scenario config (JSON); defaults apply when omitted");
    app.add_option("--set", overrides, "Override a config key, e.g. --set lattice.L=3")
        ->allow_extra_args(false);
    auto *output_opt = app.add_option("--output", output, "Output file (default: stdout)");
    auto *format_opt = app.add_option("--format", format, "Output format")
                           ->check(CLI::IsMember({"csv", "json"}));
    auto *seed_opt = app.add_option("--seed", seed, "Master random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        const nlohmann::json error = {{"error", "usage"},
                                      {"message", e.what()},
                                      {"exit_code", lataddr::kExitConfig}};
        std::cerr << error.dump() << "\n";
        return lataddr::kExitConfig;
    }

    try {
        nlohmann::json document =
            config_path.empty() ? nlohmann::json::object() : load_document(config_path);
        for (const auto &assignment : overrides) lataddr::apply_override(document, assignment);
        if (!document.is_object()) throw lataddr::ConfigError("<root>", "must be an object");
        if (*output_opt) document["output_path"] = output;
        if (*format_opt) document["output_format"] = format;
        if (*seed_opt) document["seed"] = seed;
        lataddr::run_scenario(lataddr::parse_config_document(document));
    } catch (...) {
        std::string error;
        const int code = lataddr::describe_current_exception(error);
        std::cerr << error << "\n";
        return code;
    }
    return lataddr::kExitOk;
}

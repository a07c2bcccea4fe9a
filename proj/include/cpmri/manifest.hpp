#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cpmri/errors.hpp"
#include "cpmri/io.hpp"
#include "cpmri/version.hpp"

namespace cpmri {

/// Provenance sidecar written next to every command output. Everything but
/// the `timing` object is a pure function of the invocation, so re-running
/// with the same flags reproduces it byte for byte.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json seeds = nlohmann::json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;

    nlohmann::json to_json() const {
        return {{"command", command}, {"config", config},   {"seeds", seeds},
                {"inputs", inputs},   {"outputs", outputs}, {"version", version},
                {"timing", {{"wall_seconds", wall_seconds}}}};
    }

    void write(const std::filesystem::path& primary_output) const {
        std::filesystem::path path = primary_output;
        path += ".manifest.json";
        detail::atomic_write(path, [this](std::ostream& os) { os << to_json().dump(2) << '\n'; });
    }
};

} // namespace cpmri

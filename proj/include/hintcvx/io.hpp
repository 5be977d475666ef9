#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hintcvx/principle.hpp"

namespace hintcvx {

inline constexpr const char* kConfigSchema = "hintcvx/1";

struct OutputOptions {
    std::filesystem::path dir = ".";
    bool certificate = true;
    bool trace = true;
    bool profile = true;
};

struct RunConfig {
    ProblemSpec problem;
    RunOptions options;
    OutputOptions output;
};

/// Parses and validates a configuration document. Unknown keys are
/// rejected; errors name the offending field path ("problem.q").
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Grid function from a config entry {kind: sine | normalized-sine |
/// constant | affine | values, ...}.
GridFunction parse_grid_function(const nlohmann::json& entry, const GridPtr& grid, const std::string& path);

nlohmann::json grid_to_json(const Grid& grid);
nlohmann::json certificate_to_json(const Certificate& cert);

void write_certificate(const std::filesystem::path& file, const Certificate& cert);
void write_trace_csv(const std::filesystem::path& file, const IterTrace& trace);
/// "coord,u0,v0" for radial grids, "x,y,u0,v0" on the square.
void write_profile_csv(const std::filesystem::path& file, const Certificate& cert);
void write_grid_function_csv(const std::filesystem::path& file, const GridFunction& u);

}  // namespace hintcvx

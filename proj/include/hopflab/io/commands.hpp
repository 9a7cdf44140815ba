#pragma once

#include <string>
#include <vector>

#include "hopflab/io/config.hpp"

namespace hopflab::io {

struct OutputFile {
    std::string name;  // relative to output_dir
    std::string content;
};

struct RunOutputs {
    std::vector<OutputFile> files;
    std::vector<std::string> warnings;
};

RunOutputs cmd_gapmap(const RunConfig& cfg);
RunOutputs cmd_nodal(const RunConfig& cfg);
RunOutputs cmd_topology(const RunConfig& cfg);
RunOutputs cmd_adiabatic(const RunConfig& cfg);

RunOutputs run_command(const std::string& verb, const RunConfig& cfg);

/// %.9g, with -0 folded to 0.
std::string fmt(double v);

/// Writes the files plus manifest.json into cfg.output_dir. Throws IoError.
void write_outputs(const std::string& verb, const std::string& preset, const RunConfig& cfg, const RunOutputs& out,
                   const std::string& started);

/// Creates output_dir if needed and checks it is writable. Throws IoError.
void prepare_output_dir(const std::string& dir);

std::string sha256_hex(const std::string& data);
std::string utc_timestamp();

}  // namespace hopflab::io

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "plcsynth/capacity.hpp"
#include "plcsynth/grid.hpp"
#include "plcsynth/parameters.hpp"

namespace plcsynth {

// Contents of a flat `key = value` parameter file. The 15 core coefficients
// are required; the exponential refinement, grid, noise and mask are optional.
struct ParameterFile {
  ModelParameters params = ModelParameters::published();
  bool has_refinement = false;
  std::optional<MimoGrid> grid;
  std::optional<NoiseModel> noise;
  std::optional<PsdMask> mask;
};

// Shortest decimal text that parses back to exactly `v`.
std::string format_exact(double v);

std::string format_parameter_file(const ParameterFile& file);
// Unknown keys, duplicates, missing required keys and malformed numbers raise
// ParseError (with the line number where one applies).
ParameterFile parse_parameter_file(std::string_view text);

// Stand-alone noise and mask files use the `noise.*` and `mask` keys only.
std::string format_noise_model(const NoiseModel& noise);
NoiseModel parse_noise_model(std::string_view text);
std::string format_psd_mask(const PsdMask& mask);
PsdMask parse_psd_mask(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
ParameterFile read_parameter_file(const std::filesystem::path& path);
void write_parameter_file(const std::filesystem::path& path, const ParameterFile& file);

}  // namespace plcsynth

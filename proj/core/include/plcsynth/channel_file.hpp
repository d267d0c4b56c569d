#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string_view>

#include "plcsynth/channel.hpp"

namespace plcsynth {

inline constexpr std::string_view kChannelHeader = "realization_id,tx_mode,rx_mode,freq_hz,re,im";

// One row per (realization, tx, rx, frequency), values with 17 significant digits.
void write_channel_csv(std::ostream& out, const ChannelSet& set);
void write_channel_file(const std::filesystem::path& path, const ChannelSet& set);

// Parses the text table and infers the grid from it. Port order follows first
// appearance; realizations are ordered by id. Row-level problems raise
// ParseError with the line number; an incomplete grid raises ParseError too.
ChannelSet parse_channel_csv(std::string_view text);
ChannelSet read_channel_file(const std::filesystem::path& path);

}  // namespace plcsynth

#pragma once

#include <filesystem>
#include <functional>
#include <ostream>

namespace plcsynth {

// Writes through a sibling temporary file and renames it over `path`, so
// readers never observe a partially written file.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer, bool binary = false);

}  // namespace plcsynth

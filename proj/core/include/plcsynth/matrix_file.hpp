#pragma once

#include <filesystem>

#include "plcsynth/generator.hpp"

namespace plcsynth {

// Binary container for the full empirical matrices of the copula path:
// magic, version, grid layout, M, then mu_A, Q_A and R_phi as native doubles.
void write_matrix_file(const std::filesystem::path& path, const EmpiricalMatrices& matrices);
EmpiricalMatrices read_matrix_file(const std::filesystem::path& path);

}  // namespace plcsynth

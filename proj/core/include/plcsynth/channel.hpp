#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "plcsynth/error.hpp"
#include "plcsynth/grid.hpp"

namespace plcsynth {

using Complex = std::complex<double>;

// Dense n_rx x n_tx x n_freq array stored in (rx, tx, freq) row-major order.
template <class T>
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t n_rx, std::size_t n_tx, std::size_t n_freq, T fill = T{})
      : n_rx_(n_rx), n_tx_(n_tx), n_freq_(n_freq), data_(n_rx * n_tx * n_freq, fill) {}
  explicit Array3(const MimoGrid& grid, T fill = T{})
      : Array3(grid.n_rx(), grid.n_tx(), grid.n_freq(), fill) {}

  std::size_t n_rx() const { return n_rx_; }
  std::size_t n_tx() const { return n_tx_; }
  std::size_t n_freq() const { return n_freq_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t rx, std::size_t tx, std::size_t n) {
    return data_[(rx * n_tx_ + tx) * n_freq_ + n];
  }
  const T& operator()(std::size_t rx, std::size_t tx, std::size_t n) const {
    return data_[(rx * n_tx_ + tx) * n_freq_ + n];
  }

  // Frequency response of one (rx, tx) port pair.
  std::span<T> cfr(std::size_t rx, std::size_t tx) {
    return {data_.data() + (rx * n_tx_ + tx) * n_freq_, n_freq_};
  }
  std::span<const T> cfr(std::size_t rx, std::size_t tx) const {
    return {data_.data() + (rx * n_tx_ + tx) * n_freq_, n_freq_};
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool conforms_to(const MimoGrid& grid) const {
    return n_rx_ == grid.n_rx() && n_tx_ == grid.n_tx() && n_freq_ == grid.n_freq();
  }

  bool operator==(const Array3&) const = default;

 private:
  std::size_t n_rx_ = 0;
  std::size_t n_tx_ = 0;
  std::size_t n_freq_ = 0;
  std::vector<T> data_;
};

using CfrArray = Array3<Complex>;
using RealArray = Array3<double>;

// Length-M vector in reshape order; see MimoGrid::index.
template <class T>
struct ReshapedVector {
  MimoGrid grid;
  std::vector<T> values;
};

template <class T>
ReshapedVector<T> reshape(const Array3<T>& array, const MimoGrid& grid) {
  if (!array.conforms_to(grid)) {
    throw InvalidInput("reshape: array dimensions do not match the grid");
  }
  ReshapedVector<T> out{grid, std::vector<T>(grid.size())};
  for (std::size_t i = 0; i < grid.n_tx(); ++i) {
    for (std::size_t j = 0; j < grid.n_rx(); ++j) {
      for (std::size_t n = 0; n < grid.n_freq(); ++n) {
        out.values[grid.index(n, i, j)] = array(j, i, n);
      }
    }
  }
  return out;
}

template <class T>
Array3<T> unreshape(const ReshapedVector<T>& vec) {
  const MimoGrid& grid = vec.grid;
  if (vec.values.size() != grid.size()) {
    throw InvalidInput("unreshape: vector length " + std::to_string(vec.values.size()) +
                       " differs from M = " + std::to_string(grid.size()));
  }
  Array3<T> out(grid);
  for (std::size_t i = 0; i < grid.n_tx(); ++i) {
    for (std::size_t j = 0; j < grid.n_rx(); ++j) {
      for (std::size_t n = 0; n < grid.n_freq(); ++n) {
        out(j, i, n) = vec.values[grid.index(n, i, j)];
      }
    }
  }
  return out;
}

// Realizations of the complex CFR on a common grid. Unit: linear voltage ratio.
struct ChannelSet {
  MimoGrid grid;
  std::vector<CfrArray> realizations;

  explicit ChannelSet(MimoGrid g) : grid(std::move(g)) {}
  ChannelSet(MimoGrid g, std::vector<CfrArray> r)
      : grid(std::move(g)), realizations(std::move(r)) {}

  std::size_t size() const { return realizations.size(); }
  bool empty() const { return realizations.empty(); }

  // Throws InvalidInput on shape mismatch or non-finite entries and
  // DegenerateChannel on exact zeros.
  void validate() const;

  // Keeps only the listed ports, in grid order.
  ChannelSet subset(const MimoGrid& target) const;
};

// Amplitude in dB and phase in [-pi, pi) of every realization.
struct PolarSet {
  MimoGrid grid;
  std::vector<RealArray> amplitude_db;
  std::vector<RealArray> phase;
};

// Principal value in [-pi, pi); +pi maps to -pi.
double wrap_phase(double phi);

// A_dB = 20 log10|H|, phi = arg H in [-pi, pi). Throws DegenerateChannel on zeros.
PolarSet split_cfr_db(const ChannelSet& set);
// H = 10^(A_dB / 20) e^{i phi}.
ChannelSet recombine(const PolarSet& polar);

}  // namespace plcsynth

#include "plcsynth/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "plcsynth/error.hpp"

namespace plcsynth {

namespace {

void check_labels(const std::vector<std::string>& labels, const char* what) {
  if (labels.empty()) throw InvalidInput(std::string("grid: no ") + what + " modes");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw InvalidInput(std::string("grid: empty ") + what + " label");
    if (!seen.insert(l).second) {
      throw InvalidInput(std::string("grid: duplicate ") + what + " label '" + l + "'");
    }
  }
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::siso:
      return "siso";
    case Scheme::mimo2x2:
      return "2x2";
    case Scheme::mimo2x3:
      return "2x3";
  }
  return "?";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "siso") return Scheme::siso;
  if (text == "2x2") return Scheme::mimo2x2;
  if (text == "2x3") return Scheme::mimo2x3;
  throw InvalidInput("unknown scheme '" + text + "' (expected siso, 2x2 or 2x3)");
}

MimoGrid::MimoGrid(std::vector<std::string> tx_modes, std::vector<std::string> rx_modes,
                   std::size_t n_freq, double f_start_hz, double f_step_hz)
    : tx_modes_(std::move(tx_modes)),
      rx_modes_(std::move(rx_modes)),
      n_freq_(n_freq),
      f_start_(f_start_hz),
      f_step_(f_step_hz) {
  check_labels(tx_modes_, "tx");
  check_labels(rx_modes_, "rx");
  if (n_freq_ < 2) throw InvalidInput("grid: n_freq must be at least 2");
  if (!(std::isfinite(f_start_) && f_start_ > 0.0)) {
    throw InvalidInput("grid: f_start must be positive");
  }
  if (!(std::isfinite(f_step_) && f_step_ > 0.0)) {
    throw InvalidInput("grid: f_step must be positive");
  }
}

MimoGrid MimoGrid::default_2x3() {
  return MimoGrid({"PN", "PE"}, {"P", "N", "CM"}, 1588, 1.8e6, 62.5e3);
}

MimoGrid MimoGrid::for_scheme(Scheme scheme, std::size_t decimation) {
  MimoGrid base = default_2x3().decimated(decimation);
  switch (scheme) {
    case Scheme::siso:
      return base.subset({"PN"}, {"P"});
    case Scheme::mimo2x2:
      return base.subset({"PN", "PE"}, {"P", "N"});
    case Scheme::mimo2x3:
      return base;
  }
  return base;
}

std::vector<double> MimoGrid::frequencies() const {
  std::vector<double> f(n_freq_);
  for (std::size_t n = 0; n < n_freq_; ++n) f[n] = frequency(n);
  return f;
}

ModeCombination MimoGrid::combination(std::size_t k) const {
  if (k >= n_combinations()) throw InvalidInput("grid: combination index out of range");
  return {tx_modes_[k / n_rx()], rx_modes_[k % n_rx()], k};
}

std::vector<ModeCombination> MimoGrid::combinations() const {
  std::vector<ModeCombination> out;
  out.reserve(n_combinations());
  for (std::size_t k = 0; k < n_combinations(); ++k) out.push_back(combination(k));
  return out;
}

std::size_t MimoGrid::combination_index(const std::string& tx, const std::string& rx) const {
  auto ti = std::find(tx_modes_.begin(), tx_modes_.end(), tx);
  auto ri = std::find(rx_modes_.begin(), rx_modes_.end(), rx);
  if (ti == tx_modes_.end() || ri == rx_modes_.end()) {
    throw InvalidInput("grid: unknown mode combination " + tx + "->" + rx);
  }
  return static_cast<std::size_t>(ti - tx_modes_.begin()) * n_rx() +
         static_cast<std::size_t>(ri - rx_modes_.begin());
}

MimoGrid MimoGrid::decimated(std::size_t k) const {
  if (k == 0) throw InvalidInput("grid: decimation must be at least 1");
  const std::size_t n = (n_freq_ + k - 1) / k;
  if (n < 2) throw InvalidInput("grid: decimation leaves fewer than 2 bins");
  return MimoGrid(tx_modes_, rx_modes_, n, f_start_, f_step_ * static_cast<double>(k));
}

MimoGrid MimoGrid::subset(const std::vector<std::string>& tx,
                          const std::vector<std::string>& rx) const {
  auto keep = [](const std::vector<std::string>& all, const std::vector<std::string>& want) {
    std::vector<std::string> out;
    for (const auto& l : all) {
      if (std::find(want.begin(), want.end(), l) != want.end()) out.push_back(l);
    }
    for (const auto& w : want) {
      if (std::find(all.begin(), all.end(), w) == all.end()) {
        throw InvalidInput("grid: port '" + w + "' not present");
      }
    }
    return out;
  };
  return MimoGrid(keep(tx_modes_, tx), keep(rx_modes_, rx), n_freq_, f_start_, f_step_);
}

std::uint64_t MimoGrid::hash() const {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(tx_modes_.size()));
  for (const auto& l : tx_modes_) h.add(l);
  h.add(static_cast<std::uint64_t>(rx_modes_.size()));
  for (const auto& l : rx_modes_) h.add(l);
  h.add(static_cast<std::uint64_t>(n_freq_));
  h.add(f_start_);
  h.add(f_step_);
  return h.value();
}

void Fnv1a::add_bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001b3ULL;
  }
}

}  // namespace plcsynth

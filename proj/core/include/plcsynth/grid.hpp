#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace plcsynth {

// One (transmit port, receive port) pair of the MIMO channel.
struct ModeCombination {
  std::string tx;
  std::string rx;
  // 0-based position under the tx-major, rx-minor ordering.
  std::size_t index = 0;

  bool is_cm() const { return rx == "CM"; }
  std::string label() const { return tx + "->" + rx; }
};

enum class Scheme { siso, mimo2x2, mimo2x3 };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

// Frequency grid and port layout shared by every channel realization.
//
// The reshaped vector of a 3D (rx, tx, freq) array is ordered tx-major, then
// rx, then frequency: element p (0-based) holds (tx i, rx j, bin n) with
//   p = i * n_rx * n_freq + j * n_freq + n.
class MimoGrid {
 public:
  MimoGrid(std::vector<std::string> tx_modes, std::vector<std::string> rx_modes,
           std::size_t n_freq, double f_start_hz, double f_step_hz);

  // PN/PE x P/N/CM, 1588 bins from 1.8 MHz in 62.5 kHz steps.
  static MimoGrid default_2x3();
  // Port subset of the default layout used by a transmission scheme.
  static MimoGrid for_scheme(Scheme scheme, std::size_t decimation = 1);

  std::size_t n_tx() const { return tx_modes_.size(); }
  std::size_t n_rx() const { return rx_modes_.size(); }
  std::size_t n_freq() const { return n_freq_; }
  std::size_t n_combinations() const { return n_tx() * n_rx(); }
  // M = n_tx * n_rx * n_freq.
  std::size_t size() const { return n_combinations() * n_freq_; }

  double f_start() const { return f_start_; }
  double f_step() const { return f_step_; }
  double frequency(std::size_t n) const {
    return f_start_ + static_cast<double>(n) * f_step_;
  }
  std::vector<double> frequencies() const;

  const std::vector<std::string>& tx_modes() const { return tx_modes_; }
  const std::vector<std::string>& rx_modes() const { return rx_modes_; }

  ModeCombination combination(std::size_t k) const;
  std::vector<ModeCombination> combinations() const;
  // Position of (tx, rx) in the combination order, or throws InvalidInput.
  std::size_t combination_index(const std::string& tx, const std::string& rx) const;

  std::size_t index(std::size_t n, std::size_t tx, std::size_t rx) const {
    return (tx * n_rx() + rx) * n_freq_ + n;
  }

  // Keeps every k-th bin starting from the first one.
  MimoGrid decimated(std::size_t k) const;
  // Restricts the port layout; labels must exist in this grid.
  MimoGrid subset(const std::vector<std::string>& tx,
                  const std::vector<std::string>& rx) const;

  std::uint64_t hash() const;

  bool operator==(const MimoGrid& other) const = default;

 private:
  std::vector<std::string> tx_modes_;
  std::vector<std::string> rx_modes_;
  std::size_t n_freq_;
  double f_start_;
  double f_step_;
};

// 64-bit FNV-1a, used for cache keys.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n);
  void add(double v) { add_bytes(&v, sizeof v); }
  void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
  void add(const std::string& s) {
    add(static_cast<std::uint64_t>(s.size()));
    add_bytes(s.data(), s.size());
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace plcsynth

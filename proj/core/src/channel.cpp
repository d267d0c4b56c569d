#include "plcsynth/channel.hpp"

#include <string>

namespace plcsynth {

void ChannelSet::validate() const {
  for (std::size_t r = 0; r < realizations.size(); ++r) {
    const CfrArray& h = realizations[r];
    if (!h.conforms_to(grid)) {
      throw InvalidInput("realization " + std::to_string(r) + " does not match the grid");
    }
    for (const Complex& v : h.data()) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw InvalidInput("realization " + std::to_string(r) + " has a non-finite entry");
      }
      if (v == Complex{}) {
        throw DegenerateChannel("realization " + std::to_string(r) + " has a zero entry");
      }
    }
  }
}

ChannelSet ChannelSet::subset(const MimoGrid& target) const {
  if (target.n_freq() != grid.n_freq() || target.f_start() != grid.f_start() ||
      target.f_step() != grid.f_step()) {
    throw InvalidInput("subset: frequency axes differ");
  }
  std::vector<std::size_t> tx_map, rx_map;
  for (const auto& t : target.tx_modes()) {
    tx_map.push_back(grid.combination_index(t, grid.rx_modes().front()) / grid.n_rx());
  }
  for (const auto& r : target.rx_modes()) {
    rx_map.push_back(grid.combination_index(grid.tx_modes().front(), r) % grid.n_rx());
  }
  ChannelSet out(target);
  out.realizations.reserve(realizations.size());
  for (const CfrArray& h : realizations) {
    CfrArray s(target);
    for (std::size_t j = 0; j < rx_map.size(); ++j) {
      for (std::size_t i = 0; i < tx_map.size(); ++i) {
        auto src = h.cfr(rx_map[j], tx_map[i]);
        auto dst = s.cfr(j, i);
        std::copy(src.begin(), src.end(), dst.begin());
      }
    }
    out.realizations.push_back(std::move(s));
  }
  return out;
}

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  // fmod rounding can land exactly on +pi.
  if (w >= std::numbers::pi) w -= two_pi;
  return w;
}

PolarSet split_cfr_db(const ChannelSet& set) {
  PolarSet out{set.grid, {}, {}};
  out.amplitude_db.reserve(set.size());
  out.phase.reserve(set.size());
  for (std::size_t r = 0; r < set.size(); ++r) {
    const CfrArray& h = set.realizations[r];
    if (!h.conforms_to(set.grid)) {
      throw InvalidInput("realization " + std::to_string(r) + " does not match the grid");
    }
    RealArray amp(set.grid), phase(set.grid);
    for (std::size_t k = 0; k < h.size(); ++k) {
      const Complex v = h.data()[k];
      const double mag = std::abs(v);
      if (mag == 0.0) {
        throw DegenerateChannel("realization " + std::to_string(r) + " has a zero entry");
      }
      amp.data()[k] = 20.0 * std::log10(mag);
      double phi = std::arg(v);
      if (phi >= std::numbers::pi) phi = -std::numbers::pi;
      phase.data()[k] = phi;
    }
    out.amplitude_db.push_back(std::move(amp));
    out.phase.push_back(std::move(phase));
  }
  return out;
}

ChannelSet recombine(const PolarSet& polar) {
  if (polar.amplitude_db.size() != polar.phase.size()) {
    throw InvalidInput("recombine: amplitude and phase counts differ");
  }
  ChannelSet out(polar.grid);
  out.realizations.reserve(polar.amplitude_db.size());
  for (std::size_t r = 0; r < polar.amplitude_db.size(); ++r) {
    const RealArray& a = polar.amplitude_db[r];
    const RealArray& p = polar.phase[r];
    if (!a.conforms_to(polar.grid) || !p.conforms_to(polar.grid)) {
      throw InvalidInput("recombine: realization " + std::to_string(r) + " does not match the grid");
    }
    CfrArray h(polar.grid);
    for (std::size_t k = 0; k < h.size(); ++k) {
      h.data()[k] = std::polar(std::pow(10.0, a.data()[k] / 20.0), p.data()[k]);
    }
    out.realizations.push_back(std::move(h));
  }
  return out;
}

}  // namespace plcsynth

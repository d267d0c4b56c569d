#include "plcsynth/parameter_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "plcsynth/atomic_file.hpp"
#include "plcsynth/error.hpp"
#include "key_value.hpp"

namespace plcsynth {

namespace {

using detail::Entries;
using detail::Entry;
using detail::trim;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k) {
    if (k == s.size() || s[k] == sep) {
      out.push_back(trim(s.substr(start, k - start)));
      start = k + 1;
    }
  }
  return out;
}

std::vector<std::string> labels(const Entry& e) {
  std::vector<std::string> out;
  for (auto t : split(e.value, ',')) {
    if (t.empty()) throw ParseError("empty label in list", e.line);
    out.emplace_back(t);
  }
  return out;
}

std::vector<double> numbers(const Entry& e) {
  std::vector<double> out;
  for (auto t : split(e.value, ',')) out.push_back(Entries::to_number(t, e.line));
  return out;
}

// "f:level, f:level, ..."
std::vector<std::pair<double, double>> pairs(const Entry& e) {
  std::vector<std::pair<double, double>> out;
  for (auto t : split(e.value, ',')) {
    auto colon = t.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected f:value pairs", e.line);
    out.emplace_back(Entries::to_number(trim(t.substr(0, colon)), e.line),
                     Entries::to_number(trim(t.substr(colon + 1)), e.line));
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k];
  return s;
}

std::string join_pairs(const std::vector<std::pair<double, double>>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    s += (k ? ", " : "") + format_exact(v[k].first) + ":" + format_exact(v[k].second);
  }
  return s;
}

void put(std::ostringstream& out, const std::string& key, double v) {
  out << key << " = " << format_exact(v) << '\n';
}

void put_line(std::ostringstream& out, const std::string& key, const LinearProfile& p) {
  put(out, key + ".slope_db_per_ghz", p.slope_db_per_ghz);
  put(out, key + ".intercept_db", p.intercept_db);
}

void put_curve(std::ostringstream& out, const std::string& key, const CurveCoefficients& c) {
  put(out, key + ".a", c.a);
  put(out, key + ".b", c.b);
  put(out, key + ".c", c.c);
}

LinearProfile take_line(Entries& e, const std::string& key) {
  return {e.number(key + ".slope_db_per_ghz"), e.number(key + ".intercept_db")};
}

CurveCoefficients take_curve(Entries& e, const std::string& key) {
  return {e.number(key + ".a"), e.number(key + ".b"), e.number(key + ".c")};
}

void put_psd(std::ostringstream& out, const std::string& key, const NoisePsd& p) {
  if (p.kind == NoisePsd::Kind::table) {
    out << key << ".table = " << join_pairs(p.table) << '\n';
  } else {
    put(out, key + ".a", p.a);
    put(out, key + ".b", p.b);
    put(out, key + ".c", p.c);
  }
}

NoisePsd take_psd(Entries& e, const std::string& key) {
  NoisePsd p;
  if (auto t = e.take(key + ".table")) {
    if (e.has(key + ".a") || e.has(key + ".b") || e.has(key + ".c")) {
      throw ParseError("'" + key + "' mixes a table with exponential coefficients", t->line);
    }
    p.kind = NoisePsd::Kind::table;
    p.table = pairs(*t);
  } else {
    e.number_if(key + ".a", p.a);
    e.number_if(key + ".b", p.b);
    e.number_if(key + ".c", p.c);
  }
  return p;
}

void put_noise(std::ostringstream& out, const NoiseModel& noise) {
  if (!noise.port_labels.empty()) out << "noise.ports = " << join(noise.port_labels) << '\n';
  if (noise.port_psd.size() == 1) {
    put_psd(out, "noise.psd", noise.port_psd.front());
  } else {
    for (std::size_t k = 0; k < noise.port_psd.size(); ++k) {
      put_psd(out, "noise.psd." + noise.port_labels[k], noise.port_psd[k]);
    }
  }
  if (noise.rx_correlation.size() != 0) {
    out << "noise.correlation = ";
    for (Eigen::Index r = 0; r < noise.rx_correlation.rows(); ++r) {
      for (Eigen::Index c = 0; c < noise.rx_correlation.cols(); ++c) {
        out << ((r || c) ? "," : "") << format_exact(noise.rx_correlation(r, c));
      }
    }
    out << '\n';
  }
}

NoiseModel take_noise(Entries& e) {
  NoiseModel noise;
  if (auto p = e.take("noise.ports")) noise.port_labels = labels(*p);
  const bool per_port = !noise.port_labels.empty() &&
                        (e.has_prefix("noise.psd." + noise.port_labels.front() + "."));
  if (per_port) {
    noise.port_psd.clear();
    for (const auto& l : noise.port_labels) noise.port_psd.push_back(take_psd(e, "noise.psd." + l));
  } else {
    noise.port_psd = {take_psd(e, "noise.psd")};
  }
  if (auto c = e.take("noise.correlation")) {
    const auto v = numbers(*c);
    const auto n = static_cast<Eigen::Index>(noise.port_labels.size());
    if (static_cast<Eigen::Index>(v.size()) != n * n) {
      throw ParseError("noise.correlation needs " + std::to_string(n * n) + " entries", c->line);
    }
    noise.rx_correlation.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index k = 0; k < n; ++k) noise.rx_correlation(r, k) = v[static_cast<std::size_t>(r * n + k)];
    }
  }
  try {
    noise.validate();
  } catch (const ParameterError& ex) {
    throw ParseError(ex.what());
  }
  return noise;
}

PsdMask take_mask(Entries& e) {
  PsdMask m;
  m.breakpoints = pairs(e.require("mask"));
  try {
    m.validate();
  } catch (const ParameterError& ex) {
    throw ParseError(ex.what());
  }
  return m;
}

}  // namespace

std::string format_exact(double v) {
  char tmp[32];
  auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
  return std::string(tmp, res.ptr);
}

std::string format_parameter_file(const ParameterFile& file) {
  std::ostringstream out;
  const ModelParameters& p = file.params;
  out << "# plcsynth model parameters\n";
  put_line(out, "mu", p.mu);
  put_line(out, "sigma_nocm", p.sigma_nocm);
  put_line(out, "sigma_cm", p.sigma_cm);
  put_curve(out, "antidiag_nocm", p.antidiag_nocm);
  put_curve(out, "antidiag_cm_power", p.antidiag_cm_power);
  put(out, "gev.shape", p.gev.shape);
  put(out, "gev.location", p.gev.location);
  put(out, "gev.scale", p.gev.scale);
  if (file.has_refinement) {
    put_curve(out, "antidiag_cm_exp", p.antidiag_cm_exp);
    put(out, "antidiag_cm_exp.threshold_hz", p.cm_exp_threshold_hz);
  }
  if (file.grid) {
    const MimoGrid& g = *file.grid;
    out << "grid.tx = " << join(g.tx_modes()) << '\n';
    out << "grid.rx = " << join(g.rx_modes()) << '\n';
    out << "grid.n_freq = " << g.n_freq() << '\n';
    put(out, "grid.f_start_hz", g.f_start());
    put(out, "grid.f_step_hz", g.f_step());
  }
  if (file.noise) put_noise(out, *file.noise);
  if (file.mask) out << "mask = " << join_pairs(file.mask->breakpoints) << '\n';
  return out.str();
}

ParameterFile parse_parameter_file(std::string_view text) {
  Entries e(text);
  ParameterFile file;
  ModelParameters& p = file.params;
  p.mu = take_line(e, "mu");
  p.sigma_nocm = take_line(e, "sigma_nocm");
  p.sigma_cm = take_line(e, "sigma_cm");
  p.antidiag_nocm = take_curve(e, "antidiag_nocm");
  p.antidiag_cm_power = take_curve(e, "antidiag_cm_power");
  p.gev = {e.number("gev.shape"), e.number("gev.location"), e.number("gev.scale")};
  if (e.has_prefix("antidiag_cm_exp.")) {
    file.has_refinement = true;
    p.antidiag_cm_exp = take_curve(e, "antidiag_cm_exp");
    e.number_if("antidiag_cm_exp.threshold_hz", p.cm_exp_threshold_hz);
  }
  if (e.has_prefix("grid.")) {
    const auto tx = labels(e.require("grid.tx"));
    const auto rx = labels(e.require("grid.rx"));
    const Entry nf = e.require("grid.n_freq");
    std::size_t n_freq = 0;
    auto res = std::from_chars(nf.value.data(), nf.value.data() + nf.value.size(), n_freq);
    if (res.ec != std::errc() || res.ptr != nf.value.data() + nf.value.size()) {
      throw ParseError("bad grid.n_freq '" + nf.value + "'", nf.line);
    }
    const double f0 = e.number("grid.f_start_hz");
    const double df = e.number("grid.f_step_hz");
    try {
      file.grid.emplace(tx, rx, n_freq, f0, df);
    } catch (const InvalidInput& ex) {
      throw ParseError(ex.what(), nf.line);
    }
  }
  if (e.has_prefix("noise.")) file.noise = take_noise(e);
  if (e.has("mask")) file.mask = take_mask(e);
  e.finish();
  try {
    p.validate();
  } catch (const ParameterError& ex) {
    throw ParseError(ex.what());
  }
  return file;
}

std::string format_noise_model(const NoiseModel& noise) {
  std::ostringstream out;
  put_noise(out, noise);
  return out.str();
}

NoiseModel parse_noise_model(std::string_view text) {
  Entries e(text);
  NoiseModel n = take_noise(e);
  e.finish();
  return n;
}

std::string format_psd_mask(const PsdMask& mask) {
  return "mask = " + join_pairs(mask.breakpoints) + "\n";
}

PsdMask parse_psd_mask(std::string_view text) {
  Entries e(text);
  PsdMask m = take_mask(e);
  e.finish();
  return m;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParameterFile read_parameter_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const InvalidInput& ex) {
    throw ParameterError(ex.what());
  }
  return parse_parameter_file(text);
}

void write_parameter_file(const std::filesystem::path& path, const ParameterFile& file) {
  const std::string text = format_parameter_file(file);
  write_atomically(path, [&](std::ostream& out) { out << text; });
}

}  // namespace plcsynth

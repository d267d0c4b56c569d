#include "plcsynth/channel_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "plcsynth/atomic_file.hpp"

namespace plcsynth {

namespace {

void append_double(std::string& buf, double v) {
  char tmp[32];
  auto res = std::to_chars(tmp, tmp + sizeof tmp, v, std::chars_format::general, 17);
  buf.append(tmp, res.ptr);
}

struct Row {
  std::uint64_t realization;
  std::uint32_t tx;
  std::uint32_t rx;
  double freq;
  double re;
  double im;
  std::size_t line;
};

std::uint32_t intern(std::vector<std::string>& labels, std::string_view token) {
  auto it = std::find(labels.begin(), labels.end(), token);
  if (it != labels.end()) return static_cast<std::uint32_t>(it - labels.begin());
  labels.emplace_back(token);
  return static_cast<std::uint32_t>(labels.size() - 1);
}

double parse_double(std::string_view field, std::size_t line, const char* name) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError(std::string("bad ") + name + " value '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + name, line);
  return v;
}

}  // namespace

void write_channel_csv(std::ostream& out, const ChannelSet& set) {
  set.validate();
  const MimoGrid& g = set.grid;
  std::string buf;
  buf.reserve(1 << 20);
  buf.append(kChannelHeader);
  buf.push_back('\n');
  for (std::size_t r = 0; r < set.size(); ++r) {
    const CfrArray& h = set.realizations[r];
    for (std::size_t i = 0; i < g.n_tx(); ++i) {
      for (std::size_t j = 0; j < g.n_rx(); ++j) {
        for (std::size_t n = 0; n < g.n_freq(); ++n) {
          buf.append(std::to_string(r));
          buf.push_back(',');
          buf.append(g.tx_modes()[i]);
          buf.push_back(',');
          buf.append(g.rx_modes()[j]);
          buf.push_back(',');
          append_double(buf, g.frequency(n));
          buf.push_back(',');
          append_double(buf, h(j, i, n).real());
          buf.push_back(',');
          append_double(buf, h(j, i, n).imag());
          buf.push_back('\n');
        }
        if (buf.size() > (1u << 20)) {
          out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
          buf.clear();
        }
      }
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_channel_file(const std::filesystem::path& path, const ChannelSet& set) {
  write_atomically(path, [&](std::ostream& out) { write_channel_csv(out, set); });
}

ChannelSet parse_channel_csv(std::string_view text) {
  std::vector<std::string> tx_labels, rx_labels;
  std::vector<Row> rows;
  std::size_t line = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view ln = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line;
    if (!ln.empty() && ln.back() == '\r') ln.remove_suffix(1);
    if (ln.empty()) continue;
    if (!header_seen) {
      if (ln != kChannelHeader) {
        throw ParseError("expected header '" + std::string(kChannelHeader) + "'", line);
      }
      header_seen = true;
      continue;
    }
    std::string_view f[6];
    std::size_t n_fields = 0, start = 0;
    for (std::size_t k = 0; k <= ln.size(); ++k) {
      if (k == ln.size() || ln[k] == ',') {
        if (n_fields == 6) throw ParseError("too many fields (expected 6)", line);
        f[n_fields++] = ln.substr(start, k - start);
        start = k + 1;
      }
    }
    if (n_fields != 6) {
      throw ParseError("expected 6 fields, found " + std::to_string(n_fields), line);
    }
    Row row{};
    row.line = line;
    auto res = std::from_chars(f[0].data(), f[0].data() + f[0].size(), row.realization);
    if (f[0].empty() || res.ec != std::errc() || res.ptr != f[0].data() + f[0].size()) {
      throw ParseError("bad realization_id '" + std::string(f[0]) + "'", line);
    }
    if (f[1].empty() || f[2].empty()) throw ParseError("empty mode label", line);
    row.tx = intern(tx_labels, f[1]);
    row.rx = intern(rx_labels, f[2]);
    row.freq = parse_double(f[3], line, "freq_hz");
    row.re = parse_double(f[4], line, "re");
    row.im = parse_double(f[5], line, "im");
    rows.push_back(row);
  }
  if (!header_seen) throw InvalidInput("channel file is empty");
  if (rows.empty()) throw InvalidInput("channel file has no data rows");

  // Frequencies of the first (realization, tx, rx) block define the grid.
  std::vector<double> freqs;
  for (const Row& r : rows) {
    if (r.realization != rows.front().realization || r.tx != rows.front().tx ||
        r.rx != rows.front().rx) {
      continue;
    }
    if (!freqs.empty() && !(r.freq > freqs.back())) {
      throw ParseError("frequencies must be strictly increasing", r.line);
    }
    freqs.push_back(r.freq);
  }
  if (freqs.size() < 2) throw ParseError("need at least two frequencies per port pair");
  const double step = (freqs.back() - freqs.front()) / static_cast<double>(freqs.size() - 1);
  for (std::size_t n = 0; n < freqs.size(); ++n) {
    if (std::abs(freqs.front() + static_cast<double>(n) * step - freqs[n]) > 1e-6 * step) {
      throw ParseError("frequency grid is not uniform at bin " + std::to_string(n));
    }
  }

  MimoGrid grid(tx_labels, rx_labels, freqs.size(), freqs.front(), step);
  std::map<std::uint64_t, std::size_t> ids;
  for (const Row& r : rows) ids.emplace(r.realization, 0);
  std::size_t next = 0;
  for (auto& [id, idx] : ids) idx = next++;

  std::vector<CfrArray> real(ids.size(), CfrArray(grid));
  // Next expected bin per (realization, tx, rx) block, enforcing increasing order.
  std::vector<std::size_t> cursor(ids.size() * grid.n_combinations(), 0);
  for (const Row& r : rows) {
    const std::size_t ri = ids[r.realization];
    const std::size_t block = ri * grid.n_combinations() + r.tx * grid.n_rx() + r.rx;
    const std::size_t n = cursor[block];
    if (n >= freqs.size()) throw ParseError("too many frequencies for this port pair", r.line);
    if (r.freq != freqs[n]) {
      throw ParseError("frequency " + std::to_string(r.freq) + " out of place (expected bin " +
                           std::to_string(n) + ")",
                       r.line);
    }
    cursor[block] = n + 1;
    real[ri](r.rx, r.tx, n) = Complex(r.re, r.im);
  }
  for (std::size_t b = 0; b < cursor.size(); ++b) {
    if (cursor[b] != freqs.size()) {
      const std::size_t c = b % grid.n_combinations();
      auto id = std::next(ids.begin(), static_cast<std::ptrdiff_t>(b / grid.n_combinations()))->first;
      throw ParseError("incomplete grid: realization " + std::to_string(id) + " " +
                       grid.combination(c).label() + " has " + std::to_string(cursor[b]) + " of " +
                       std::to_string(freqs.size()) + " frequencies");
    }
  }
  return ChannelSet(std::move(grid), std::move(real));
}

ChannelSet read_channel_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open channel file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_channel_csv(ss.str());
}

}  // namespace plcsynth

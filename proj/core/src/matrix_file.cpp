#include "plcsynth/matrix_file.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "plcsynth/atomic_file.hpp"
#include "plcsynth/error.hpp"

namespace plcsynth {

namespace {

constexpr std::array<char, 8> kMagic{'P', 'L', 'C', 'M', 'A', 'T', 'R', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_string(std::ostream& out, const std::string& s) {
  put(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_labels(std::ostream& out, const std::vector<std::string>& v) {
  put(out, static_cast<std::uint32_t>(v.size()));
  for (const auto& s : v) put_string(out, s);
}

class Reader {
 public:
  Reader(std::istream& in, const std::filesystem::path& path) : in_(in), path_(path) {}

  template <class T>
  T get() {
    T v{};
    read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  }

  void read(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (!in_) throw InvalidInput("matrix file " + path_.string() + " is truncated");
  }

  std::string get_string() {
    const auto n = get<std::uint32_t>();
    if (n > 4096) throw InvalidInput("matrix file " + path_.string() + " has a corrupt label");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }

  std::vector<std::string> get_labels() {
    const auto n = get<std::uint32_t>();
    if (n == 0 || n > 64) throw InvalidInput("matrix file " + path_.string() + " has a corrupt port list");
    std::vector<std::string> v;
    for (std::uint32_t k = 0; k < n; ++k) v.push_back(get_string());
    return v;
  }

 private:
  std::istream& in_;
  const std::filesystem::path& path_;
};

}  // namespace

void write_matrix_file(const std::filesystem::path& path, const EmpiricalMatrices& matrices) {
  matrices.validate();
  const MimoGrid& g = matrices.grid;
  write_atomically(
      path,
      [&](std::ostream& out) {
        out.write(kMagic.data(), kMagic.size());
        put(out, kVersion);
        put_labels(out, g.tx_modes());
        put_labels(out, g.rx_modes());
        put(out, static_cast<std::uint64_t>(g.n_freq()));
        put(out, g.f_start());
        put(out, g.f_step());
        const auto m = static_cast<std::uint64_t>(g.size());
        put(out, m);
        const auto bytes = [](const auto& x) {
          return static_cast<std::streamsize>(x.size() * sizeof(double));
        };
        out.write(reinterpret_cast<const char*>(matrices.amplitude_mean.data()), bytes(matrices.amplitude_mean));
        out.write(reinterpret_cast<const char*>(matrices.amplitude_covariance.data()),
                  bytes(matrices.amplitude_covariance));
        out.write(reinterpret_cast<const char*>(matrices.phase_correlation.data()),
                  bytes(matrices.phase_correlation));
      },
      true);
}

EmpiricalMatrices read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open matrix file " + path.string());
  Reader r(in, path);
  std::array<char, 8> magic{};
  r.read(magic.data(), magic.size());
  if (magic != kMagic) throw InvalidInput(path.string() + " is not a plcsynth matrix file");
  if (r.get<std::uint32_t>() != kVersion) throw InvalidInput("unsupported matrix file version");
  auto tx = r.get_labels();
  auto rx = r.get_labels();
  const auto n_freq = r.get<std::uint64_t>();
  const double f0 = r.get<double>();
  const double df = r.get<double>();
  MimoGrid grid(std::move(tx), std::move(rx), static_cast<std::size_t>(n_freq), f0, df);
  const auto m = r.get<std::uint64_t>();
  if (m != grid.size()) throw InvalidInput("matrix file dimension does not match its grid");
  const auto n = static_cast<Eigen::Index>(m);
  EmpiricalMatrices out{grid, Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  r.read(reinterpret_cast<char*>(out.amplitude_mean.data()), m * sizeof(double));
  r.read(reinterpret_cast<char*>(out.amplitude_covariance.data()), m * m * sizeof(double));
  r.read(reinterpret_cast<char*>(out.phase_correlation.data()), m * m * sizeof(double));
  out.validate();
  return out;
}

}  // namespace plcsynth

#include "sparsepsd/tensor_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sparsepsd {
namespace {

constexpr std::array<char, 8> kMagic = {'S', 'P', 'S', 'D', 'T', 'N', 'S', '1'};

static_assert(std::endian::native == std::endian::little,
              "tensor container writer assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("tensor container truncated");
  return value;
}

void require_shape(const Tensor& t, std::size_t rank, bool complex, const char* what) {
  if (t.shape.size() != rank || t.complex != complex) {
    throw std::invalid_argument(std::string("tensor does not describe ") + what);
  }
}

}  // namespace

std::uint64_t Tensor::element_count() const {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Tensor to_tensor(const RowMatrixXd& m) {
  Tensor t;
  t.shape = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  t.data.assign(m.data(), m.data() + m.size());
  return t;
}

Tensor to_tensor(const RowMatrixXcd& m) {
  Tensor t;
  t.complex = true;
  t.shape = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  t.data.reserve(2 * static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.size(); ++i) {
    t.data.push_back(m.data()[i].real());
    t.data.push_back(m.data()[i].imag());
  }
  return t;
}

Tensor to_tensor(const SpectralCoefficients& u) {
  Tensor t;
  t.complex = true;
  t.shape = {static_cast<std::uint64_t>(u.trials()), static_cast<std::uint64_t>(u.sources()),
             static_cast<std::uint64_t>(u.bins())};
  for (const auto& m : u.u) {
    for (Index i = 0; i < m.size(); ++i) {
      t.data.push_back(m.data()[i].real());
      t.data.push_back(m.data()[i].imag());
    }
  }
  return t;
}

Tensor to_tensor(const ObservationSet& obs) {
  Tensor t;
  t.complex = true;
  t.shape = {static_cast<std::uint64_t>(obs.trials()), static_cast<std::uint64_t>(obs.length())};
  for (const auto& v : obs.y) {
    for (Index i = 0; i < v.size(); ++i) {
      t.data.push_back(v[i].real());
      t.data.push_back(v[i].imag());
    }
  }
  return t;
}

RowMatrixXd real_matrix(const Tensor& t) {
  require_shape(t, 2, false, "a real matrix");
  RowMatrixXd m(static_cast<Index>(t.shape[0]), static_cast<Index>(t.shape[1]));
  std::copy(t.data.begin(), t.data.end(), m.data());
  return m;
}

RowMatrixXcd complex_matrix(const Tensor& t) {
  require_shape(t, 2, true, "a complex matrix");
  RowMatrixXcd m(static_cast<Index>(t.shape[0]), static_cast<Index>(t.shape[1]));
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = {t.data[2 * i], t.data[2 * i + 1]};
  return m;
}

SpectralCoefficients spectral_coefficients(const Tensor& t) {
  require_shape(t, 3, true, "spectral coefficients (J, N, L)");
  const auto J = static_cast<Index>(t.shape[0]);
  const auto N = static_cast<Index>(t.shape[1]);
  const auto L = static_cast<Index>(t.shape[2]);
  SpectralCoefficients u(J, N, L);
  std::size_t pos = 0;
  for (auto& m : u.u) {
    for (Index i = 0; i < m.size(); ++i, pos += 2) m.data()[i] = {t.data[pos], t.data[pos + 1]};
  }
  return u;
}

ObservationSet observation_set(const Tensor& t) {
  require_shape(t, 2, true, "an observation set (J, d)");
  ObservationSet obs;
  const auto J = static_cast<Index>(t.shape[0]);
  const auto d = static_cast<Index>(t.shape[1]);
  std::size_t pos = 0;
  for (Index j = 0; j < J; ++j) {
    Eigen::VectorXcd v(d);
    for (Index i = 0; i < d; ++i, pos += 2) v[i] = {t.data[pos], t.data[pos + 1]};
    obs.y.push_back(std::move(v));
  }
  return obs;
}

void write_binary(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, t.complex ? 1u : 0u);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.shape.size()));
  for (auto d : t.shape) put<std::uint64_t>(os, d);
  os.write(reinterpret_cast<const char*>(t.data.data()),
           static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Tensor read_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error(path.string() + ": bad tensor magic");
  Tensor t;
  const auto kind = get<std::uint32_t>(is);
  if (kind > 1) throw std::runtime_error(path.string() + ": unknown tensor kind");
  t.complex = kind == 1;
  const auto rank = get<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < rank; ++i) t.shape.push_back(get<std::uint64_t>(is));
  t.data.resize(t.element_count() * (t.complex ? 2 : 1));
  is.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!is) throw std::runtime_error(path.string() + ": payload truncated");
  return t;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf.data(), end);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first != last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

void write_csv(const std::filesystem::path& path, const Tensor& t) {
  if (t.shape.empty()) throw std::invalid_argument("cannot write a rank-0 tensor as CSV");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "# sparsepsd " << (t.complex ? "complex" : "real");
  for (auto d : t.shape) os << ' ' << d;
  os << '\n';
  const std::size_t per_entry = t.complex ? 2 : 1;
  const std::size_t row_len = static_cast<std::size_t>(t.shape.back()) * per_entry;
  if (row_len == 0) return;
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    os << format_double(t.data[i]);
    os << ((i + 1) % row_len == 0 ? '\n' : ',');
  }
}

Tensor read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  std::istringstream header(line);
  std::string hash, tag, kind;
  header >> hash >> tag >> kind;
  if (hash != "#" || tag != "sparsepsd" || (kind != "real" && kind != "complex")) {
    throw std::runtime_error(path.string() + ": missing sparsepsd CSV header");
  }
  Tensor t;
  t.complex = kind == "complex";
  std::uint64_t d = 0;
  while (header >> d) t.shape.push_back(d);
  t.data.reserve(t.element_count() * (t.complex ? 2 : 1));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      t.data.push_back(parse_double(line.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (t.data.size() != t.element_count() * (t.complex ? 2 : 1)) {
    throw std::runtime_error(path.string() + ": entry count does not match header shape");
  }
  return t;
}

}  // namespace sparsepsd

// Tensor persistence.
//
// Binary container (all integers and doubles little-endian):
//   bytes 0..7   magic "SPSDTNS1"
//   uint32       kind: 0 = real, 1 = complex
//   uint32       rank
//   uint64[rank] shape, outermost dimension first
//   double[]     row-major payload; complex entries as (re, im) pairs
//
// CSV: a first line "# sparsepsd <real|complex> d0 d1 ...", then one row per
// index of all but the last dimension (row-major order) holding the last
// dimension's entries; complex entries take two adjacent columns (re, im).
// Doubles are written in shortest round-trip form, so both formats are
// bit-exact.
#ifndef SPARSEPSD_TENSOR_IO_HPP_
#define SPARSEPSD_TENSOR_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sparsepsd/core.hpp"

namespace sparsepsd {

struct Tensor {
  std::vector<std::uint64_t> shape;
  bool complex = false;
  std::vector<double> data;

  std::uint64_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

Tensor to_tensor(const RowMatrixXd& m);
Tensor to_tensor(const RowMatrixXcd& m);
Tensor to_tensor(const SpectralCoefficients& u);
Tensor to_tensor(const ObservationSet& obs);
inline Tensor to_tensor(const PsdEstimate& p) { return to_tensor(p.S); }
inline Tensor to_tensor(const SigmaField& s) { return to_tensor(s.sigma); }

RowMatrixXd real_matrix(const Tensor& t);
RowMatrixXcd complex_matrix(const Tensor& t);
SpectralCoefficients spectral_coefficients(const Tensor& t);
ObservationSet observation_set(const Tensor& t);

void write_binary(const std::filesystem::path& path, const Tensor& t);
Tensor read_binary(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const Tensor& t);
Tensor read_csv(const std::filesystem::path& path);

std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace sparsepsd

#endif  // SPARSEPSD_TENSOR_IO_HPP_

#pragma once

#include <complex>
#include <vector>

namespace qclock {

using cvec = std::vector<std::complex<double>>;

// Selects the transform backend. Auto uses the direct O(d^2) sum for small
// lengths and FFTW above kFastDftThreshold.
enum class DftPath { Auto, Direct, Fast };

inline constexpr int kFastDftThreshold = 256;

// Vectors of odd length d are indexed by the centered labels
// k = -(d-1)/2 .. (d-1)/2 stored in ascending order.
inline int half_width(int d) { return (d - 1) / 2; }

// Unitary DFT on centered labels:
//   out[n] = d^{-1/2} sum_k exp(sign * 2 pi i n k / d) in[k],  sign = +1 or -1.
cvec centered_dft(const cvec& in, int sign, DftPath path = DftPath::Auto);

// Circular convolution on Z_d with a fixed real kernel,
//   out[p] = sum_q in[p - q] kernel[q]   (labels mod d, centered storage).
// The kernel transform is computed once at construction.
class CircularConvolver {
 public:
  CircularConvolver(const std::vector<double>& kernel, DftPath path = DftPath::Auto);

  void apply(cvec& v) const;
  int dim() const { return d_; }

 private:
  int d_;
  bool fast_;
  std::vector<double> kernel_;
  cvec kernel_hat_;
};

}  // namespace qclock

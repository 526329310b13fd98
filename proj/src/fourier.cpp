#include "qclock/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include <fftw3.h>

#include "qclock/errors.hpp"

namespace qclock {

namespace {

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
// Plans are cached per (length, direction) for the lifetime of the process.
fftw_plan cached_plan(int n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  fftw_complex* in = fftw_alloc_complex(static_cast<size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(n));
  fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  plans.emplace(std::make_pair(n, sign), plan);
  return plan;
}

// Centered storage position p holds label p - h; the natural FFT slot of a
// label k is k mod d. Moving between the two layouts is a rotation by h.
void centered_to_slots(cvec& v) {
  const int d = static_cast<int>(v.size());
  std::rotate(v.begin(), v.begin() + half_width(d), v.end());
}

void slots_to_centered(cvec& v) {
  const int d = static_cast<int>(v.size());
  std::rotate(v.begin(), v.begin() + (d - half_width(d)), v.end());
}

// Unnormalized transform in slot layout: out[s] = sum_t exp(sign 2 pi i s t/d) in[t].
cvec slot_dft(const cvec& in, int sign, bool fast) {
  const int d = static_cast<int>(in.size());
  cvec out(in.size());
  if (fast) {
    fftw_execute_dft(cached_plan(d, sign),
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }
  cvec twiddle(in.size());
  for (int j = 0; j < d; ++j) {
    twiddle[j] = std::polar(1.0, sign * 2.0 * std::numbers::pi * j / d);
  }
  for (int s = 0; s < d; ++s) {
    std::complex<double> acc = 0.0;
    long idx = 0;
    for (int t = 0; t < d; ++t) {
      acc += twiddle[idx] * in[t];
      idx += s;
      if (idx >= d) idx -= d;
    }
    out[s] = acc;
  }
  return out;
}

bool use_fast(int d, DftPath path) {
  if (path == DftPath::Fast) return true;
  if (path == DftPath::Direct) return false;
  return d >= kFastDftThreshold;
}

void check_length(size_t n) {
  if (n == 0 || n % 2 == 0) {
    throw InvalidParam("centered transforms need an odd, positive length");
  }
}

}  // namespace

cvec centered_dft(const cvec& in, int sign, DftPath path) {
  check_length(in.size());
  const int d = static_cast<int>(in.size());
  cvec work = in;
  centered_to_slots(work);
  cvec out = slot_dft(work, sign, use_fast(d, path));
  slots_to_centered(out);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& x : out) x *= scale;
  return out;
}

CircularConvolver::CircularConvolver(const std::vector<double>& kernel, DftPath path)
    : d_(static_cast<int>(kernel.size())), fast_(use_fast(static_cast<int>(kernel.size()), path)),
      kernel_(kernel) {
  check_length(kernel.size());
  if (fast_) {
    cvec k(kernel.begin(), kernel.end());
    centered_to_slots(k);
    kernel_hat_ = slot_dft(k, -1, true);
  }
}

void CircularConvolver::apply(cvec& v) const {
  if (static_cast<int>(v.size()) != d_) {
    throw InvalidParam("CircularConvolver: length mismatch");
  }
  if (fast_) {
    centered_to_slots(v);
    cvec vhat = slot_dft(v, -1, true);
    for (int s = 0; s < d_; ++s) vhat[s] *= kernel_hat_[s];
    v = slot_dft(vhat, +1, true);
    const double scale = 1.0 / d_;
    for (auto& x : v) x *= scale;
    slots_to_centered(v);
    return;
  }
  // Direct sum in slot layout: out[s] = sum_t in[s - t] kernel[t].
  cvec in = v;
  centered_to_slots(in);
  std::vector<double> k = kernel_;
  std::rotate(k.begin(), k.begin() + half_width(d_), k.end());
  cvec out(v.size(), 0.0);
  for (int s = 0; s < d_; ++s) {
    std::complex<double> acc = 0.0;
    for (int t = 0; t < d_; ++t) {
      int src = s - t;
      if (src < 0) src += d_;
      acc += in[src] * k[t];
    }
    out[s] = acc;
  }
  slots_to_centered(out);
  v = std::move(out);
}

}  // namespace qclock

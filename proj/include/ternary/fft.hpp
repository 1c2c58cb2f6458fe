#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace ternary {
namespace fft {

/** Cached complex-to-complex transforms for n-by-n grids.
 *
 *  FFTW planning is not thread safe and plans are tied to their buffers, so a
 *  single mutex serializes every transform. Plans use FFTW_ESTIMATE: plan
 *  choice is then independent of runtime timing and results are reproducible
 *  bit for bit across runs.
 */
class Engine {
public:
  static Engine &instance() {
    static Engine e;
    return e;
  }

  // out = unnormalized forward DFT of v (row-major n x n).
  void forward(int n, const std::vector<double> &v,
               std::vector<std::complex<double>> &out) {
    std::lock_guard<std::mutex> lock(mu_);
    Slot &s = slot(n);
    for (std::size_t i = 0; i < v.size(); ++i) {
      s.in[i][0] = v[i];
      s.in[i][1] = 0.0;
    }
    fftw_execute(s.fwd);
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = {s.out[i][0], s.out[i][1]};
  }

  // out = backward DFT of spec divided by n^2, real part only.
  void backward(int n, const std::vector<std::complex<double>> &spec,
                std::vector<double> &out) {
    std::lock_guard<std::mutex> lock(mu_);
    Slot &s = slot(n);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      s.in[i][0] = spec[i].real();
      s.in[i][1] = spec[i].imag();
    }
    fftw_execute(s.bwd);
    out.resize(spec.size());
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (std::size_t i = 0; i < spec.size(); ++i)
      out[i] = s.out[i][0] * scale;
  }

private:
  struct Slot {
    fftw_complex *in = nullptr;
    fftw_complex *out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
  };

  Slot &slot(int n) {
    if (n <= 0)
      throw std::invalid_argument("fft: grid size must be positive");
    auto it = slots_.find(n);
    if (it != slots_.end())
      return it->second;
    Slot s;
    const std::size_t m = static_cast<std::size_t>(n) * n;
    s.in = fftw_alloc_complex(m);
    s.out = fftw_alloc_complex(m);
    s.fwd = fftw_plan_dft_2d(n, n, s.in, s.out, FFTW_FORWARD, FFTW_ESTIMATE);
    s.bwd = fftw_plan_dft_2d(n, n, s.in, s.out, FFTW_BACKWARD, FFTW_ESTIMATE);
    return slots_.emplace(n, s).first->second;
  }

  Engine() = default;
  ~Engine() {
    for (auto &kv : slots_) {
      fftw_destroy_plan(kv.second.fwd);
      fftw_destroy_plan(kv.second.bwd);
      fftw_free(kv.second.in);
      fftw_free(kv.second.out);
    }
  }
  Engine(const Engine &) = delete;
  Engine &operator=(const Engine &) = delete;

  std::mutex mu_;
  std::map<int, Slot> slots_;
};

// Signed integer frequency of row/column index j on an n-grid.
inline int freq(int j, int n) { return j <= n / 2 ? j : j - n; }

} // namespace fft
} // namespace ternary

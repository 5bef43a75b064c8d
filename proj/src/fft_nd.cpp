#include "fft_nd.hpp"

#include <unsupported/Eigen/FFT>

namespace latblock::detail {

void fft_nd(std::vector<std::complex<double>>& data, const std::vector<int>& dims, bool inverse) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::size_t stride = 1;
  for (auto axis = dims.size(); axis-- > 0;) {
    const auto n = static_cast<std::size_t>(dims[axis]);
    const std::size_t block = stride * n;
    std::vector<std::complex<double>> line(n), out(n);
    for (std::size_t base = 0; base < data.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t i = 0; i < n; ++i) line[i] = data[base + off + i * stride];
        if (inverse) {
          fft.inv(out.data(), line.data(), static_cast<Eigen::Index>(n));
        } else {
          fft.fwd(out.data(), line.data(), static_cast<Eigen::Index>(n));
        }
        for (std::size_t i = 0; i < n; ++i) data[base + off + i * stride] = out[i];
      }
    }
    stride = block;
  }
}

}  // namespace latblock::detail

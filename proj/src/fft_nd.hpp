#pragma once

#include <complex>
#include <vector>

namespace latblock::detail {

/// In-place unscaled N-d DFT over a row-major array (last axis fastest).
/// `inverse` uses the conjugate kernel without the 1/M factor.
void fft_nd(std::vector<std::complex<double>>& data, const std::vector<int>& dims, bool inverse);

}  // namespace latblock::detail

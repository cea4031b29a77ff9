#pragma once

#include <complex>
#include <vector>

namespace director {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

} // namespace director

#pragma once

#include <vector>

#include "sidelink/common.hpp"

namespace sidelink::phy {

// Unitary DFT/IDFT of arbitrary length (1/sqrt(N) both ways), FFTW-backed.
// Plans are cached per size and safe for concurrent execution.
std::vector<cplx> dft_forward(const std::vector<cplx>& in);
std::vector<cplx> dft_inverse(const std::vector<cplx>& in);

// DFT-spread transform precoding: independent unitary DFT per block of
// m_subcarriers symbols. Throws when the input is not block-aligned.
std::vector<cplx> transform_precode(const std::vector<cplx>& symbols, int m_subcarriers);
std::vector<cplx> transform_deprecode(const std::vector<cplx>& symbols, int m_subcarriers);

}  // namespace sidelink::phy

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "../fft.hpp"

namespace tiedown {

/// Sequences shorter than this are convolved directly.
inline constexpr std::size_t direct_convolution_limit = 256;

/// Truncated self-convolution powers of `kernel` (first `length` terms).
/// Calls visit(m, power) for m = m_min..m_max in increasing order; the span
/// is only valid during the call. m_min is reached by binary powering. A
/// visitor returning bool can stop early by returning false.
template <class Visit>
void for_each_power(std::span<const double> kernel, std::int64_t m_min, std::int64_t m_max, std::size_t length,
                    Visit&& visit) {
  if (m_min < 0 || m_max < m_min) return;
  auto call = [&](std::int64_t m, std::span<const double> pw) -> bool {
    if constexpr (std::is_same_v<std::invoke_result_t<Visit&, std::int64_t, std::span<const double>>, bool>)
      return visit(m, pw);
    else {
      visit(m, pw);
      return true;
    }
  };
  std::vector<double> base(length, 0.0);
  std::copy_n(kernel.begin(), std::min(kernel.size(), length), base.begin());

  std::vector<double> current(length, 0.0), scratch(length, 0.0);
  current[0] = 1.0;

  if (length <= direct_convolution_limit) {
    auto mul = [&](const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out) {
      convolve_direct(a, b, out);
    };
    std::vector<double> sq = base;
    for (std::int64_t e = m_min; e > 0; e >>= 1) {
      if (e & 1) {
        mul(current, sq, scratch);
        current.swap(scratch);
      }
      if (e > 1) {
        mul(sq, sq, scratch);
        sq.swap(scratch);
      }
    }
    for (std::int64_t m = m_min;; ++m) {
      if (!call(m, std::span<const double>(current)) || m == m_max) break;
      mul(current, base, scratch);
      current.swap(scratch);
    }
    return;
  }

  Convolver conv(length);
  const auto base_spec = conv.spectrum(base);
  {
    std::vector<double> sq = base;
    for (std::int64_t e = m_min; e > 0; e >>= 1) {
      if (e & 1) {
        conv.convolve(current, sq, scratch);
        current.swap(scratch);
      }
      if (e > 1) {
        conv.convolve(sq, sq, scratch);
        sq.swap(scratch);
      }
    }
  }
  for (std::int64_t m = m_min;; ++m) {
    if (!call(m, std::span<const double>(current)) || m == m_max) break;
    conv.apply(current, base_spec, scratch);
    current.swap(scratch);
  }
}

}  // namespace tiedown

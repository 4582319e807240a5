// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 only; callers check the CPU before using this table.
// Same operation order as the scalar kernels and no FMA, so results match
// bit for bit.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "splitrx/kernels.hpp"

namespace splitrx::kernels {

const KernelTable& avx2_table_unchecked() noexcept;

namespace {

void combine(std::span<const AntennaTerm> terms, double alpha_sum, const BlockInputs& in,
             const BlockOutputs& out) {
  const std::size_t m = in.x_re.size();
  const std::size_t mv = m & ~std::size_t{3};
  const bool cd = !out.r1_re.empty();
  const bool ed = !out.r2.empty();
  const double* xr = in.x_re.data();
  const double* xi = in.x_im.data();

  if (cd) {
    const __m256d as = _mm256_set1_pd(alpha_sum);
    std::size_t i = 0;
    for (; i < mv; i += 4) {
      _mm256_storeu_pd(out.r1_re.data() + i, _mm256_mul_pd(as, _mm256_loadu_pd(xr + i)));
      _mm256_storeu_pd(out.r1_im.data() + i, _mm256_mul_pd(as, _mm256_loadu_pd(xi + i)));
    }
    for (; i < m; ++i) {
      out.r1_re[i] = alpha_sum * xr[i];
      out.r1_im[i] = alpha_sum * xi[i];
    }
  }
  if (ed) std::fill(out.r2.begin(), out.r2.end(), 0.0);

  for (std::size_t k = 0; k < terms.size(); ++k) {
    const AntennaTerm& t = terms[k];
    const double* ur = in.u_re.data() + k * m;
    const double* ui = in.u_im.data() + k * m;
    const __m256d c = _mm256_set1_pd(t.cos_phi);
    const __m256d s = _mm256_set1_pd(t.sin_phi);
    const __m256d aws = _mm256_set1_pd(t.alpha_w_scale);
    const __m256d zs = _mm256_set1_pd(t.z_scale);
    const __m256d ws = _mm256_set1_pd(t.w_scale);
    const __m256d b = _mm256_set1_pd(t.beta);
    const __m256d ns = _mm256_set1_pd(t.n_scale);
    std::size_t i = 0;
    for (; i < mv; i += 4) {
      const __m256d a_re = _mm256_loadu_pd(ur + i);
      const __m256d a_im = _mm256_loadu_pd(ui + i);
      const __m256d wr = _mm256_add_pd(_mm256_mul_pd(c, a_re), _mm256_mul_pd(s, a_im));
      const __m256d wi = _mm256_sub_pd(_mm256_mul_pd(c, a_im), _mm256_mul_pd(s, a_re));
      if (cd) {
        const __m256d vr = _mm256_loadu_pd(in.v_re.data() + k * m + i);
        const __m256d vi = _mm256_loadu_pd(in.v_im.data() + k * m + i);
        double* o_re = out.r1_re.data() + i;
        double* o_im = out.r1_im.data() + i;
        _mm256_storeu_pd(o_re, _mm256_add_pd(_mm256_loadu_pd(o_re),
                                             _mm256_add_pd(_mm256_mul_pd(aws, wr), _mm256_mul_pd(zs, vr))));
        _mm256_storeu_pd(o_im, _mm256_add_pd(_mm256_loadu_pd(o_im),
                                             _mm256_add_pd(_mm256_mul_pd(aws, wi), _mm256_mul_pd(zs, vi))));
      }
      if (ed) {
        const __m256d er = _mm256_add_pd(_mm256_loadu_pd(xr + i), _mm256_mul_pd(ws, wr));
        const __m256d ei = _mm256_add_pd(_mm256_loadu_pd(xi + i), _mm256_mul_pd(ws, wi));
        const __m256d mag = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(er, er), _mm256_mul_pd(ei, ei)));
        const __m256d nn = _mm256_loadu_pd(in.n.data() + k * m + i);
        double* o = out.r2.data() + i;
        _mm256_storeu_pd(o, _mm256_add_pd(_mm256_loadu_pd(o),
                                          _mm256_add_pd(_mm256_mul_pd(b, mag), _mm256_mul_pd(ns, nn))));
      }
    }
    for (; i < m; ++i) {
      const double wr = t.cos_phi * ur[i] + t.sin_phi * ui[i];
      const double wi = t.cos_phi * ui[i] - t.sin_phi * ur[i];
      if (cd) {
        out.r1_re[i] = out.r1_re[i] + (t.alpha_w_scale * wr + t.z_scale * in.v_re[k * m + i]);
        out.r1_im[i] = out.r1_im[i] + (t.alpha_w_scale * wi + t.z_scale * in.v_im[k * m + i]);
      }
      if (ed) {
        const double er = xr[i] + t.w_scale * wr;
        const double ei = xi[i] + t.w_scale * wi;
        out.r2[i] = out.r2[i] + (t.beta * std::sqrt(er * er + ei * ei) + t.n_scale * in.n[k * m + i]);
      }
    }
  }
}

MinMax min_max(std::span<const double> values) {
  const std::size_t n = values.size();
  const double* p = values.data();
  MinMax r{p[0], p[0]};
  std::size_t i = 0;
  if (n >= 4) {
    __m256d lo = _mm256_loadu_pd(p);
    __m256d hi = lo;
    for (i = 4; i + 4 <= n; i += 4) {
      const __m256d v = _mm256_loadu_pd(p + i);
      lo = _mm256_min_pd(lo, v);
      hi = _mm256_max_pd(hi, v);
    }
    alignas(32) double l[4], h[4];
    _mm256_store_pd(l, lo);
    _mm256_store_pd(h, hi);
    for (int j = 0; j < 4; ++j) {
      r.lo = std::min(r.lo, l[j]);
      r.hi = std::max(r.hi, h[j]);
    }
  }
  for (; i < n; ++i) {
    r.lo = std::min(r.lo, p[i]);
    r.hi = std::max(r.hi, p[i]);
  }
  return r;
}

void accumulate_bins(std::span<const double> values, double lo, double inv_width, std::uint32_t bins,
                     std::span<std::uint32_t> keys) {
  const std::size_t n = values.size();
  const double top = static_cast<double>(bins - 1);
  std::size_t i = 0;
  // Truncation to int32 is exact only below 2^31.
  if (bins <= (1u << 31)) {
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vinv = _mm256_set1_pd(inv_width);
    const __m256d vtop = _mm256_set1_pd(top);
    const __m128i vbins = _mm_set1_epi32(static_cast<int>(bins));
    for (; i + 4 <= n; i += 4) {
      const __m256d pos =
          _mm256_min_pd(_mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(values.data() + i), vlo), vinv), vtop);
      const __m128i idx = _mm256_cvttpd_epi32(pos);
      __m128i* kp = reinterpret_cast<__m128i*>(keys.data() + i);
      const __m128i old = _mm_loadu_si128(kp);
      _mm_storeu_si128(kp, _mm_add_epi32(_mm_mullo_epi32(old, vbins), idx));
    }
  }
  for (; i < n; ++i) {
    const double pos = std::min((values[i] - lo) * inv_width, top);
    keys[i] = keys[i] * bins + static_cast<std::uint32_t>(pos);
  }
}

}  // namespace

const KernelTable& avx2_table_unchecked() noexcept {
  static const KernelTable table{"avx2", combine, min_max, accumulate_bins};
  return table;
}

}  // namespace splitrx::kernels

// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "splitrx/kernels.hpp"

namespace splitrx::kernels {

namespace {

void combine(std::span<const AntennaTerm> terms, double alpha_sum, const BlockInputs& in,
             const BlockOutputs& out) {
  const std::size_t m = in.x_re.size();
  const bool cd = !out.r1_re.empty();
  const bool ed = !out.r2.empty();
  if (cd) {
    for (std::size_t i = 0; i < m; ++i) {
      out.r1_re[i] = alpha_sum * in.x_re[i];
      out.r1_im[i] = alpha_sum * in.x_im[i];
    }
  }
  if (ed) std::fill(out.r2.begin(), out.r2.end(), 0.0);

  for (std::size_t k = 0; k < terms.size(); ++k) {
    const AntennaTerm& t = terms[k];
    const double* ur = in.u_re.data() + k * m;
    const double* ui = in.u_im.data() + k * m;
    for (std::size_t i = 0; i < m; ++i) {
      // Antenna noise is drawn in the antenna frame and rotated into the
      // symbol frame together with the channel phase.
      const double wr = t.cos_phi * ur[i] + t.sin_phi * ui[i];
      const double wi = t.cos_phi * ui[i] - t.sin_phi * ur[i];
      if (cd) {
        const double vr = in.v_re[k * m + i];
        const double vi = in.v_im[k * m + i];
        out.r1_re[i] = out.r1_re[i] + (t.alpha_w_scale * wr + t.z_scale * vr);
        out.r1_im[i] = out.r1_im[i] + (t.alpha_w_scale * wi + t.z_scale * vi);
      }
      if (ed) {
        const double er = in.x_re[i] + t.w_scale * wr;
        const double ei = in.x_im[i] + t.w_scale * wi;
        const double mag = std::sqrt(er * er + ei * ei);
        out.r2[i] = out.r2[i] + (t.beta * mag + t.n_scale * in.n[k * m + i]);
      }
    }
  }
}

MinMax min_max(std::span<const double> values) {
  MinMax r{values[0], values[0]};
  for (double v : values) {
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  return r;
}

void accumulate_bins(std::span<const double> values, double lo, double inv_width, std::uint32_t bins,
                     std::span<std::uint32_t> keys) {
  const double top = static_cast<double>(bins - 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double pos = std::min((values[i] - lo) * inv_width, top);
    keys[i] = keys[i] * bins + static_cast<std::uint32_t>(pos);
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{"scalar", combine, min_max, accumulate_bins};
  return table;
}

}  // namespace splitrx::kernels

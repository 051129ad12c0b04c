#include "panceval/edt.hpp"

#include <cmath>
#include <limits>

namespace panceval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared-distance transform over samples at positions x_i = i * step:
//   out[q] = min_i ( (x_q - x_i)^2 + f[i] )
// Lower envelope of parabolas; exact for arbitrary f, including +inf.
void dt1d(const double* f, double* out, std::size_t n, double step,
          std::size_t* v, double* z) {
    std::size_t k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (std::size_t q = 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        const double xq = static_cast<double>(q) * step;
        for (;;) {
            if (f[v[k]] == kInf) {
                // Parabola at v[k] is everywhere +inf; replace it.
                if (k == 0) {
                    v[0] = q;
                    z[0] = -kInf;
                    z[1] = kInf;
                    break;
                }
                --k;
                continue;
            }
            const double xv = static_cast<double>(v[k]) * step;
            const double s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv));
            if (s <= z[k]) {
                --k;
            } else {
                ++k;
                v[k] = q;
                z[k] = s;
                z[k + 1] = kInf;
                break;
            }
        }
    }
    if (f[v[0]] == kInf) {
        // Entire line is empty along this axis.
        for (std::size_t q = 0; q < n; ++q) out[q] = kInf;
        return;
    }
    std::size_t j = 0;
    for (std::size_t q = 0; q < n; ++q) {
        const double xq = static_cast<double>(q) * step;
        while (z[j + 1] < xq) ++j;
        const double d = xq - static_cast<double>(v[j]) * step;
        out[q] = d * d + f[v[j]];
    }
}

}  // namespace

std::vector<double> edt_squared(const BinaryMask& mask) {
    if (mask.empty()) throw Error("edt: mask is empty");
    const GridSpec& g = mask.grid();
    const std::size_t nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];

    std::vector<double> d(mask.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = mask.test(i) ? 0.0 : kInf;

    const std::size_t nmax = std::max({nx, ny, nz});
    std::vector<double> f(nmax), out(nmax), z(nmax + 1);
    std::vector<std::size_t> v(nmax);

    // x pass
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t base = nx * (j + ny * k);
            for (std::size_t i = 0; i < nx; ++i) f[i] = d[base + i];
            dt1d(f.data(), out.data(), nx, g.spacing[0], v.data(), z.data());
            for (std::size_t i = 0; i < nx; ++i) d[base + i] = out[i];
        }
    // y pass
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t base = i + nx * ny * k;
            for (std::size_t j = 0; j < ny; ++j) f[j] = d[base + nx * j];
            dt1d(f.data(), out.data(), ny, g.spacing[1], v.data(), z.data());
            for (std::size_t j = 0; j < ny; ++j) d[base + nx * j] = out[j];
        }
    // z pass
    const std::size_t stride_z = nx * ny;
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t base = i + nx * j;
            for (std::size_t k = 0; k < nz; ++k) f[k] = d[base + stride_z * k];
            dt1d(f.data(), out.data(), nz, g.spacing[2], v.data(), z.data());
            for (std::size_t k = 0; k < nz; ++k) d[base + stride_z * k] = out[k];
        }
    return d;
}

std::vector<double> edt(const BinaryMask& mask) {
    std::vector<double> d = edt_squared(mask);
    for (double& x : d) x = std::sqrt(x);
    return d;
}

}  // namespace panceval

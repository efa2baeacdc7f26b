#include "ingress/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ingress {
namespace {

inline std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Horizontal then vertical pass of a symmetric odd-length kernel with
// replicated borders. Input and output are float fields of size w*h.
void separable_convolve(const std::vector<double>& src, std::vector<double>& dst, int w, int h,
                        const std::vector<double>& kernel) {
    const int r = static_cast<int>(kernel.size()) / 2;
    std::vector<double> tmp(src.size());
    for (int y = 0; y < h; ++y) {
        const double* row = &src[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -r; k <= r; ++k) acc += kernel[k + r] * row[clamp_index(x + k, w)];
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -r; k <= r; ++k)
                acc += kernel[k + r] * tmp[static_cast<std::size_t>(clamp_index(y + k, h)) * w + x];
            dst[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
}

std::vector<double> to_float(const GrayImage& img) {
    std::vector<double> f(img.data.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = img.data[i];
    return f;
}

const std::vector<double> kBinomial5 = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

}  // namespace

GrayImage rgb_to_gray(const RgbImage& img) {
    GrayImage out(img.width, img.height);
    const std::size_t n = out.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = &img.data[i * 3];
        out.data[i] = to_u8(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
    }
    return out;
}

GrayImage gaussian_blur(const GrayImage& img, int kernel_size, double sigma) {
    if (kernel_size < 3 || kernel_size % 2 == 0)
        throw std::invalid_argument("gaussian_blur: kernel_size must be odd and >= 3");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be positive");

    const int r = kernel_size / 2;
    std::vector<double> kernel(kernel_size);
    double sum = 0.0;
    for (int k = -r; k <= r; ++k) {
        kernel[k + r] = std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
        sum += kernel[k + r];
    }
    for (double& v : kernel) v /= sum;

    std::vector<double> acc(img.data.size());
    separable_convolve(to_float(img), acc, img.width, img.height, kernel);

    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < acc.size(); ++i) out.data[i] = to_u8(acc[i]);
    return out;
}

GrayImage pyr_down(const GrayImage& img) {
    if (img.width < 2 || img.height < 2)
        throw std::invalid_argument("pyr_down: image must be at least 2x2");

    std::vector<double> smooth(img.data.size());
    separable_convolve(to_float(img), smooth, img.width, img.height, kBinomial5);

    const int ow = (img.width + 1) / 2;
    const int oh = (img.height + 1) / 2;
    GrayImage out(ow, oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            out.at(x, y) = to_u8(smooth[static_cast<std::size_t>(2 * y) * img.width + 2 * x]);
    return out;
}

GrayImage pyr_up(const GrayImage& img) {
    const int w = img.width, h = img.height;
    const int ow = 2 * w, oh = 2 * h;

    // Polyphase form of zero-insertion + binomial smoothing with 4x gain:
    // even taps (1,6,1)/8 on source samples, odd taps (1,1)/2, borders
    // clamped in source coordinates so constants are preserved exactly.
    std::vector<double> wide(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = &img.data[static_cast<std::size_t>(y) * w];
        double* orow = &wide[static_cast<std::size_t>(y) * ow];
        for (int x = 0; x < w; ++x) {
            const double left = row[clamp_index(x - 1, w)];
            const double right = row[clamp_index(x + 1, w)];
            orow[2 * x] = (left + 6.0 * row[x] + right) / 8.0;
            orow[2 * x + 1] = (row[x] + right) / 2.0;
        }
    }

    GrayImage out(ow, oh);
    for (int y = 0; y < h; ++y) {
        const double* up = &wide[static_cast<std::size_t>(clamp_index(y - 1, h)) * ow];
        const double* mid = &wide[static_cast<std::size_t>(y) * ow];
        const double* down = &wide[static_cast<std::size_t>(clamp_index(y + 1, h)) * ow];
        for (int x = 0; x < ow; ++x) {
            out.at(x, 2 * y) = to_u8((up[x] + 6.0 * mid[x] + down[x]) / 8.0);
            out.at(x, 2 * y + 1) = to_u8((mid[x] + down[x]) / 2.0);
        }
    }
    return out;
}

GrayImage equalize_histogram(const GrayImage& img) {
    std::size_t hist[256] = {};
    for (std::uint8_t v : img.data) ++hist[v];

    std::size_t cdf[256];
    std::size_t running = 0;
    std::size_t cdf_min = 0;
    for (int v = 0; v < 256; ++v) {
        running += hist[v];
        cdf[v] = running;
        if (cdf_min == 0 && running > 0) cdf_min = running;
    }

    const std::size_t n = img.data.size();
    if (n == cdf_min) return img;  // constant image: formula degenerates

    std::uint8_t lut[256];
    const double denom = static_cast<double>(n - cdf_min);
    for (int v = 0; v < 256; ++v)
        lut[v] = to_u8(255.0 * (static_cast<double>(cdf[v]) - static_cast<double>(cdf_min)) / denom);

    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < n; ++i) out.data[i] = lut[img.data[i]];
    return out;
}

EdgeMap canny(const GrayImage& img, double low_threshold, double high_threshold) {
    if (!(low_threshold >= 0.0) || !(low_threshold < high_threshold))
        throw std::invalid_argument("canny: need 0 <= low_threshold < high_threshold");

    const int w = img.width, h = img.height;
    std::vector<double> gx(img.data.size()), gy(img.data.size()), mag(img.data.size());

    auto px = [&](int x, int y) -> double {
        return img.data[static_cast<std::size_t>(clamp_index(y, h)) * w + clamp_index(x, w)];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double sx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            const double sy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gx[i] = sx;
            gy[i] = sy;
            mag[i] = std::hypot(sx, sy);
        }
    }

    // Non-maximum suppression along the quantized gradient direction.
    // Ties are broken by keeping the pixel on the +gradient side: survive if
    // mag >= backward neighbor and mag > forward neighbor.
    std::vector<std::uint8_t> nms(img.data.size(), 0);  // 0 none, 1 weak, 2 strong
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double m = mag[i];
            if (m < low_threshold || m == 0.0) continue;

            double angle = std::atan2(gy[i], gx[i]) * 180.0 / M_PI;
            if (angle < 0.0) angle += 180.0;
            int dx, dy;
            if (angle < 22.5 || angle >= 157.5) {
                dx = 1; dy = 0;           // gradient ~horizontal
            } else if (angle < 67.5) {
                dx = 1; dy = 1;
            } else if (angle < 112.5) {
                dx = 0; dy = 1;           // gradient ~vertical
            } else {
                dx = -1; dy = 1;
            }
            auto mag_at = [&](int xx, int yy) -> double {
                return (xx >= 0 && xx < w && yy >= 0 && yy < h)
                           ? mag[static_cast<std::size_t>(yy) * w + xx]
                           : 0.0;
            };
            const double forward = mag_at(x + dx, y + dy);
            const double backward = mag_at(x - dx, y - dy);
            if (m >= backward && m > forward)
                nms[i] = (m >= high_threshold) ? 2 : 1;
        }
    }

    // Hysteresis: flood from strong pixels through weak ones (8-connected).
    EdgeMap out(w, h);
    std::vector<Pt> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (nms[static_cast<std::size_t>(y) * w + x] == 2) {
                out.set(x, y);
                stack.push_back({x, y});
            }
    while (!stack.empty()) {
        const Pt p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = p.x + dx, ny = p.y + dy;
                if (!out.in_bounds(nx, ny) || out.test(nx, ny)) continue;
                if (nms[static_cast<std::size_t>(ny) * w + nx] != 0) {
                    out.set(nx, ny);
                    stack.push_back({nx, ny});
                }
            }
        }
    }
    return out;
}

EdgeMap dilate(const EdgeMap& map, int kernel_radius) {
    if (kernel_radius < 1) throw std::invalid_argument("dilate: kernel_radius must be >= 1");
    const int w = map.width, h = map.height, r = kernel_radius;

    // Square structuring element is separable: horizontal pass, then vertical.
    EdgeMap horiz(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int k = std::max(0, x - r); k <= std::min(w - 1, x + r); ++k) {
                if (map.test(k, y)) {
                    horiz.set(x, y);
                    break;
                }
            }
        }
    }
    EdgeMap out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int k = std::max(0, y - r); k <= std::min(h - 1, y + r); ++k) {
                if (horiz.test(x, k)) {
                    out.set(x, y);
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace ingress

#pragma once

#include "ingress/image.hpp"

namespace ingress {

// Raster primitives for the detection front end. All operations are pure;
// intermediate arithmetic is floating point, quantized to u8 only at the
// operation boundary. Convolutions replicate the border pixel.

/// Per-pixel luma: round(0.299 R + 0.587 G + 0.114 B).
GrayImage rgb_to_gray(const RgbImage& img);

/// Separable Gaussian blur with an L1-normalized kernel.
/// kernel_size must be odd and >= 3, sigma > 0.
GrayImage gaussian_blur(const GrayImage& img, int kernel_size, double sigma);

/// Half-size pyramid level: 5x5 binomial smoothing, then keep every other
/// row/column. Output is ceil(w/2) x ceil(h/2); input must be at least 2x2.
GrayImage pyr_down(const GrayImage& img);

/// Double-size pyramid level: zero insertion followed by the binomial kernel
/// with 4x gain (implemented polyphase so borders replicate source samples).
/// Output is 2w x 2h.
GrayImage pyr_up(const GrayImage& img);

/// Global histogram equalization:
///   v -> round(255 * (cdf(v) - cdf_min) / (N - cdf_min)).
/// A constant image is returned unchanged (the formula degenerates).
GrayImage equalize_histogram(const GrayImage& img);

/// Canny edge detector: 3x3 Sobel gradients, direction quantized to four
/// bins, non-maximum suppression, then double-threshold hysteresis where
/// weak pixels survive only if 8-connected to a strong pixel.
/// Requires 0 <= low_threshold < high_threshold.
EdgeMap canny(const GrayImage& img, double low_threshold, double high_threshold);

/// Morphological dilation with a square structuring element of side
/// 2*kernel_radius + 1. kernel_radius must be >= 1.
EdgeMap dilate(const EdgeMap& map, int kernel_radius);

}  // namespace ingress

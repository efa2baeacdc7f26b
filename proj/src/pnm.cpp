#include "ingress/pnm.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ingress {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("PNM: " + path + ": " + what);
}

// Skips whitespace and '#' comments, then reads one non-negative ASCII integer.
int read_header_int(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c)) fail(path, "malformed header");
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1'000'000'000) fail(path, "header value out of range");
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(value);
}

struct PnmHeader {
    int width = 0;
    int height = 0;
    int maxval = 0;
};

PnmHeader read_header(std::istream& in, const std::string& path, char expected_digit) {
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || m1 != expected_digit)
        fail(path, std::string("expected magic P") + expected_digit);
    PnmHeader h;
    h.width = read_header_int(in, path);
    h.height = read_header_int(in, path);
    h.maxval = read_header_int(in, path);
    if (h.width < 1 || h.height < 1) fail(path, "non-positive dimensions");
    if (h.maxval < 1 || h.maxval > 255) fail(path, "unsupported maxval (must be 1..255)");
    // Exactly one whitespace byte separates the header from raster data.
    int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) fail(path, "missing raster separator");
    return h;
}

void read_raster(std::istream& in, const std::string& path, std::vector<std::uint8_t>& out) {
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (static_cast<std::size_t>(in.gcount()) != out.size()) fail(path, "truncated raster data");
}

}  // namespace

RgbImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    PnmHeader h = read_header(in, path, '6');
    RgbImage img(h.width, h.height);
    read_raster(in, path, img.data);
    return img;
}

void write_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) fail(path, "write failed");
}

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    PnmHeader h = read_header(in, path, '5');
    GrayImage img(h.width, h.height);
    read_raster(in, path, img.data);
    return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) fail(path, "write failed");
}

}  // namespace ingress

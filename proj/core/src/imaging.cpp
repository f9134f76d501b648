#include "tvspline/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace tvspline {

namespace {

std::uint8_t quantize(double v) {
    const long r = std::lround(v);
    if (r < 0) return 0;
    if (r > 255) return 255;
    return static_cast<std::uint8_t>(r);
}

bool interior(int r, int c, int rows, int cols) {
    return r > 0 && r + 1 < rows && c > 0 && c + 1 < cols;
}

void check_image_dims(const std::vector<int>& dims) {
    if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1)
        throw std::invalid_argument("image dimensions must be two positive pixel counts");
}

/// Draws `count` distinct elements from `pool` by a partial Fisher-Yates
/// shuffle; the prefix of `pool` holds the sample afterwards.
void sample_prefix(std::vector<std::size_t>& pool, std::size_t count, std::mt19937_64& rng) {
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
}

std::vector<std::size_t> interior_indices(int rows, int cols) {
    std::vector<std::size_t> idx;
    for (int r = 1; r + 1 < rows; ++r)
        for (int c = 1; c + 1 < cols; ++c) idx.push_back(static_cast<std::size_t>(r) * cols + c);
    return idx;
}

void rasterize_scratch(InpaintingMask& mask, int rows, int cols, int r0, int c0, int r1, int c1,
                       int width) {
    const int lo = -((width - 1) / 2);
    const int hi = width / 2;
    const int steps = std::max(std::abs(r1 - r0), std::abs(c1 - c0));
    for (int i = 0; i <= steps; ++i) {
        const double t = steps > 0 ? static_cast<double>(i) / steps : 0.0;
        const int rr = static_cast<int>(std::llround(r0 + t * (r1 - r0)));
        const int cc = static_cast<int>(std::llround(c0 + t * (c1 - c0)));
        for (int di = lo; di <= hi; ++di) {
            for (int dj = lo; dj <= hi; ++dj) {
                const int r = rr + di, c = cc + dj;
                if (interior(r, c, rows, cols))
                    mask.unknown[static_cast<std::size_t>(r) * cols + c] = 1;
            }
        }
    }
}

}  // namespace

PixelImage render(const TensorKnotGrid& grid, std::span<const double> coefficients,
                  const PixelGrid& pixels) {
    if (grid.dim() != 2 || pixels.dim() != 2)
        throw std::invalid_argument("render expects a two-dimensional grid");
    if (coefficients.size() != grid.basis_count())
        throw std::invalid_argument("coefficient count does not match the basis");

    PixelImage out = PixelImage::constant(pixels.counts[0], pixels.counts[1], 0.0);
    for (int r = 0; r < out.rows; ++r) {
        const double x0 = pixels.center(0, r);
        for (int c = 0; c < out.cols; ++c) {
            const double x1 = pixels.center(1, c);
            out.at(r, c) = eval_spline(grid, coefficients, std::array{x0, x1});
        }
    }
    return out;
}

InpaintingMask make_mask(const MaskSpec& spec, const std::vector<int>& dims) {
    check_image_dims(dims);
    const int rows = dims[0], cols = dims[1];
    if (rows < 3 || cols < 3)
        throw std::invalid_argument("image too small to hold an interior mask");

    InpaintingMask mask;
    mask.dims = dims;
    mask.unknown.assign(static_cast<std::size_t>(rows) * cols, 0);
    std::mt19937_64 rng(spec.seed);

    switch (spec.kind) {
        case MaskKind::random_fraction: {
            if (!(spec.fraction > 0.0 && spec.fraction < 1.0))
                throw std::invalid_argument("mask fraction must lie in (0, 1)");
            const std::size_t count = static_cast<std::size_t>(
                std::floor(spec.fraction * static_cast<double>(rows) * cols));
            auto pool = interior_indices(rows, cols);
            if (count >= pool.size())
                throw std::invalid_argument("mask would cover every interior pixel");
            sample_prefix(pool, count, rng);
            for (std::size_t i = 0; i < count; ++i) mask.unknown[pool[i]] = 1;
            break;
        }
        case MaskKind::scratches: {
            if (spec.scratch_width < 1)
                throw std::invalid_argument("scratch width must be at least one pixel");
            auto segments = spec.endpoints;
            if (segments.empty()) {
                if (spec.scratch_count < 1)
                    throw std::invalid_argument("scratch count must be at least one");
                std::uniform_int_distribution<int> row_pick(1, rows - 2);
                std::uniform_int_distribution<int> col_pick(1, cols - 2);
                for (int s = 0; s < spec.scratch_count; ++s) {
                    const int r0 = row_pick(rng), c0 = col_pick(rng);
                    const int r1 = row_pick(rng), c1 = col_pick(rng);
                    segments.push_back({r0, c0, r1, c1});
                }
            }
            for (const auto& seg : segments) {
                if (seg[0] < 0 || seg[0] >= rows || seg[2] < 0 || seg[2] >= rows ||
                    seg[1] < 0 || seg[1] >= cols || seg[3] < 0 || seg[3] >= cols)
                    throw std::invalid_argument("scratch endpoint outside the image");
                rasterize_scratch(mask, rows, cols, seg[0], seg[1], seg[2], seg[3],
                                  spec.scratch_width);
            }
            break;
        }
        case MaskKind::text_bitmap: {
            mask = read_mask(spec.bitmap_path);
            if (mask.dims != dims)
                throw std::invalid_argument("mask file dimensions do not match the image");
            break;
        }
    }

    const std::size_t interior_count =
        static_cast<std::size_t>(rows - 2) * static_cast<std::size_t>(cols - 2);
    if (mask.unknown_count() >= interior_count)
        throw std::invalid_argument("mask covers every interior pixel");
    validate_mask(mask);
    return mask;
}

NoisyImage add_noise(const PixelImage& image, const NoiseSpec& spec, double intensity_min,
                     double intensity_max) {
    if (!(spec.salt_pepper_fraction >= 0.0 && spec.salt_pepper_fraction < 1.0))
        throw std::invalid_argument("salt-and-pepper fraction must lie in [0, 1)");
    if (spec.gaussian_sigma < 0.0)
        throw std::invalid_argument("noise standard deviation must be nonnegative");

    NoisyImage out;
    out.image = image;
    std::mt19937_64 rng(spec.seed);

    if (spec.gaussian_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, spec.gaussian_sigma);
        for (auto& v : out.image.values) v += noise(rng);
    }

    if (spec.salt_pepper_fraction > 0.0) {
        const std::size_t count = static_cast<std::size_t>(
            std::floor(spec.salt_pepper_fraction * static_cast<double>(image.pixel_count())));
        auto pool = interior_indices(image.rows, image.cols);
        sample_prefix(pool, std::min(count, pool.size()), rng);
        std::bernoulli_distribution coin(0.5);
        for (std::size_t i = 0; i < std::min(count, pool.size()); ++i)
            out.image.values[pool[i]] = coin(rng) ? intensity_max : intensity_min;
    }

    out.implied_mask.dims = {image.rows, image.cols};
    out.implied_mask.unknown.assign(image.pixel_count(), 0);
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        const double v = out.image.values[i];
        if (v <= intensity_min || v >= intensity_max) out.implied_mask.unknown[i] = 1;
    }
    return out;
}

double snr_db(const PixelImage& reference, const PixelImage& reconstruction) {
    if (reference.rows != reconstruction.rows || reference.cols != reconstruction.cols)
        throw std::invalid_argument("images must have equal dimensions");
    double ref = 0.0, err = 0.0;
    for (std::size_t i = 0; i < reference.pixel_count(); ++i) {
        const double r = reference.values[i];
        const double e = r - reconstruction.values[i];
        ref += r * r;
        err += e * e;
    }
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ref / err);
}

namespace {

int parse_pgm_int(std::istream& in) {
    // Whitespace and '#' comment lines may precede each header field.
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF || !std::isdigit(ch)) throw std::runtime_error("malformed PGM header");
    int value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        ch = in.get();
    }
    return value;
}

PixelImage read_pgm(std::istream& in, const std::string& path) {
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw std::runtime_error("not a binary PGM file: " + path);
    const int cols = parse_pgm_int(in);
    const int rows = parse_pgm_int(in);
    const int maxval = parse_pgm_int(in);
    if (rows < 1 || cols < 1) throw std::runtime_error("malformed PGM header: " + path);
    if (maxval < 1 || maxval > 255)
        throw std::runtime_error("unsupported PGM depth (expected 8-bit): " + path);

    PixelImage img = PixelImage::constant(rows, cols, 0.0);
    std::vector<unsigned char> buf(img.pixel_count());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw std::runtime_error("truncated PGM data: " + path);
    for (std::size_t i = 0; i < buf.size(); ++i) img.values[i] = static_cast<double>(buf[i]);
    return img;
}

void write_pgm(const std::string& path, const PixelImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P5\n" << image.cols << " " << image.rows << "\n255\n";
    std::vector<unsigned char> buf(image.pixel_count());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = quantize(image.values[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::string& path, const char* mode)
        : fp(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

PixelImage read_png(const std::string& path) {
    FileHandle file(path, "rb");
    if (!file.fp) throw std::runtime_error("cannot open: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("cannot initialize PNG reader");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("corrupt PNG file: " + path);
    }

    png_init_io(png, file.fp);
    png_read_info(png, info);
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("unsupported PNG (grayscale only): " + path);
    }
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int rows = static_cast<int>(png_get_image_height(png, info));
    const int cols = static_cast<int>(png_get_image_width(png, info));
    PixelImage img = PixelImage::constant(rows, cols, 0.0);
    std::vector<unsigned char> row(png_get_rowbytes(png, info));
    for (int r = 0; r < rows; ++r) {
        png_read_row(png, row.data(), nullptr);
        for (int c = 0; c < cols; ++c) img.at(r, c) = static_cast<double>(row[c]);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, const PixelImage& image) {
    FileHandle file(path, "wb");
    if (!file.fp) throw std::runtime_error("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("cannot initialize PNG writer");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG write failed: " + path);
    }

    png_init_io(png, file.fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols),
                 static_cast<png_uint_32>(image.rows), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<unsigned char> row(static_cast<std::size_t>(image.cols));
    for (int r = 0; r < image.rows; ++r) {
        for (int c = 0; c < image.cols; ++c) row[c] = quantize(image.at(r, c));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

constexpr unsigned char kPngSignature[4] = {0x89, 'P', 'N', 'G'};

InpaintingMask read_mask_rle(std::istream& in, const std::string& path) {
    std::string magic;
    int cols = 0, rows = 0;
    if (!(in >> magic >> cols >> rows) || magic != "mask-rle" || rows < 1 || cols < 1)
        throw std::runtime_error("malformed mask header: " + path);

    InpaintingMask mask;
    mask.dims = {rows, cols};
    mask.unknown.assign(static_cast<std::size_t>(rows) * cols, 0);
    long long start = 0, length = 0;
    while (in >> start >> length) {
        if (start < 0 || length < 1 ||
            start + length > static_cast<long long>(mask.unknown.size()))
            throw std::runtime_error("mask run out of range: " + path);
        for (long long i = start; i < start + length; ++i)
            mask.unknown[static_cast<std::size_t>(i)] = 1;
    }
    if (!in.eof() && in.fail()) throw std::runtime_error("malformed mask run: " + path);
    return mask;
}

}  // namespace

PixelImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char head[4] = {};
    in.read(head, 4);
    if (!in) throw std::runtime_error("unreadable image file: " + path);
    in.seekg(0);

    if (head[0] == 'P' && head[1] == '5') return read_pgm(in, path);
    if (std::equal(std::begin(kPngSignature), std::end(kPngSignature),
                   reinterpret_cast<unsigned char*>(head))) {
        in.close();
        return read_png(path);
    }
    throw std::runtime_error("unsupported image format: " + path);
}

void write_image(const std::string& path, const PixelImage& image) {
    if (image.rows < 1 || image.cols < 1)
        throw std::invalid_argument("cannot write an empty image");
    if (has_suffix(path, ".png")) {
        write_png(path, image);
    } else if (has_suffix(path, ".pgm")) {
        write_pgm(path, image);
    } else {
        throw std::runtime_error("unsupported image extension (use .pgm or .png): " + path);
    }
}

InpaintingMask read_mask(const std::string& path) {
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open: " + path);
        char head[8] = {};
        in.read(head, 8);
        if (in.gcount() >= 8 && std::string(head, 8) == "mask-rle") {
            in.seekg(0);
            return read_mask_rle(in, path);
        }
    }
    const PixelImage img = read_image(path);
    InpaintingMask mask;
    mask.dims = {img.rows, img.cols};
    mask.unknown.assign(img.pixel_count(), 0);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        if (img.values[i] != 0.0) mask.unknown[i] = 1;
    return mask;
}

void write_mask(const std::string& path, const InpaintingMask& mask) {
    if (mask.dims.size() != 2)
        throw std::invalid_argument("only two-dimensional masks can be written");
    if (has_suffix(path, ".txt") || has_suffix(path, ".rle")) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        out << "mask-rle " << mask.dims[1] << " " << mask.dims[0] << "\n";
        const std::size_t n = mask.unknown.size();
        for (std::size_t i = 0; i < n;) {
            if (!mask.unknown[i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < n && mask.unknown[j]) ++j;
            out << i << " " << (j - i) << "\n";
            i = j;
        }
        if (!out) throw std::runtime_error("write failed: " + path);
        return;
    }
    PixelImage img = PixelImage::constant(mask.dims[0], mask.dims[1], 0.0);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        if (mask.unknown[i]) img.values[i] = 255.0;
    write_image(path, img);
}

}  // namespace tvspline

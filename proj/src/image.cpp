#include <chromaterm/image.hpp>

#include <chromaterm/error.hpp>

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

namespace chromaterm {

namespace fs = std::filesystem;

Image::Image(int w, int h, Srgb fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

Mask::Mask(int w, int h, bool value)
    : width(w), height(h), on(static_cast<std::size_t>(w) * h, value ? 1 : 0) {}

std::size_t Mask::count() const { return static_cast<std::size_t>(std::count(on.begin(), on.end(), 1)); }

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw data_error(path.string() + ": cannot open: " + std::strerror(errno));
    return f;
}

struct PngError {
    char message[256] = "unknown libpng error";
};

void on_png_error(png_structp png, png_const_charp msg) {
    auto* err = static_cast<PngError*>(png_get_error_ptr(png));
    std::snprintf(err->message, sizeof err->message, "%s", msg);
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

Image decode_png(std::FILE* fp, const fs::path& path) {
    PngError err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
    if (!png) throw data_error(path.string() + ": libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    Image image;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw data_error(path.string() + ": PNG decode failed: " + err.message);
    }

    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const auto width = png_get_image_width(png, info);
    const auto height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const auto rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    image = Image(static_cast<int>(width), static_cast<int>(height));
    image.bit_depth = depth;
    for (png_uint_32 y = 0; y < height; ++y) {
        const png_byte* row = rows[y];
        for (png_uint_32 x = 0; x < width; ++x) {
            double c[3];
            for (int k = 0; k < 3; ++k) {
                if (depth == 16) {
                    const png_byte* s = row + (x * 3 + k) * 2;
                    c[k] = ((s[0] << 8) | s[1]) / 65535.0;
                } else {
                    c[k] = row[x * 3 + k] / 255.0;
                }
            }
            image.at(static_cast<int>(x), static_cast<int>(y)) = {c[0], c[1], c[2]};
        }
    }
    return image;
}

// Netpbm header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    char ch;
    while (in.get(ch)) {
        if (ch == '#') {
            std::string skip;
            std::getline(in, skip);
            if (!token.empty()) break;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!token.empty()) break;
            continue;
        }
        token.push_back(ch);
    }
    return token;
}

Image decode_pnm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error(path.string() + ": cannot open");
    const std::string magic = next_token(in);
    if (magic != "P6" && magic != "P5") throw data_error(path.string() + ": unsupported netpbm type " + magic);
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(next_token(in));
        height = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw data_error(path.string() + ": malformed PNM header");
    }
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
        throw data_error(path.string() + ": invalid PNM dimensions or maxval");

    const int channels = magic == "P6" ? 3 : 1;
    const int bytes_per_sample = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> data(static_cast<std::size_t>(width) * height * channels * bytes_per_sample);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size()))
        throw data_error(path.string() + ": truncated PNM pixel data");

    Image image(width, height);
    image.bit_depth = bytes_per_sample == 1 ? 8 : 16;
    auto sample = [&](std::size_t i) {
        if (bytes_per_sample == 1) return data[i] / static_cast<double>(maxval);
        return ((data[2 * i] << 8) | data[2 * i + 1]) / static_cast<double>(maxval);
    };
    for (std::size_t p = 0; p < image.size(); ++p) {
        if (channels == 3) {
            image.pixels[p] = {sample(3 * p), sample(3 * p + 1), sample(3 * p + 2)};
        } else {
            const double v = sample(p);
            image.pixels[p] = {v, v, v};
        }
    }
    return image;
}

// Encodes prepared row pointers; `palette` is only used for palette images.
void encode_png(const fs::path& path, int width, int height, int colour_type, int depth,
                const std::vector<png_bytep>& rows, std::span<const Srgb8> palette) {
    FilePtr fp = open_file(path, "wb");
    PngError err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
    if (!png) throw data_error(path.string() + ": libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    std::vector<png_color> plte;
    for (const auto& c : palette) plte.push_back({c.r, c.g, c.b});

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw data_error(path.string() + ": PNG encode failed: " + err.message);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth, colour_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (colour_type == PNG_COLOR_TYPE_PALETTE) png_set_PLTE(png, info, plte.data(), static_cast<int>(plte.size()));
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(fp.get()) != 0) throw data_error(path.string() + ": write failed");
}

void check_size(const fs::path& path, int width, int height, std::size_t have, std::size_t per_pixel) {
    if (width <= 0 || height <= 0) throw usage_error(path.string() + ": image dimensions must be positive");
    if (have != static_cast<std::size_t>(width) * height * per_pixel)
        throw usage_error(path.string() + ": pixel buffer does not match image dimensions");
}

}  // namespace

Image read_image(const fs::path& path) {
    FilePtr fp = open_file(path, "rb");
    unsigned char magic[8] = {};
    const std::size_t got = std::fread(magic, 1, sizeof magic, fp.get());
    if (got == sizeof magic && png_sig_cmp(magic, 0, sizeof magic) == 0) {
        std::rewind(fp.get());
        return decode_png(fp.get(), path);
    }
    if (got >= 2 && magic[0] == 'P' && (magic[1] == '6' || magic[1] == '5')) {
        fp.reset();
        return decode_pnm(path);
    }
    throw data_error(path.string() + ": unrecognised image format (expected PNG or binary PPM)");
}

Mask read_mask(const fs::path& path) {
    const Image image = read_image(path);
    Mask mask(image.width, image.height, false);
    for (std::size_t i = 0; i < image.size(); ++i) {
        const Srgb& p = image.pixels[i];
        mask.on[i] = (p.r + p.g + p.b) / 3.0 >= 0.5 ? 1 : 0;
    }
    return mask;
}

void write_atomically(const fs::path& path, const std::function<void(const fs::path&)>& writer) {
    fs::path tmp = path;
    tmp += ".partial";
    try {
        writer(tmp);
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

void write_png_rgb8(const fs::path& path, int width, int height, std::span<const Srgb8> pixels) {
    check_size(path, width, height, pixels.size(), 1);
    std::vector<png_byte> buffer;
    buffer.reserve(pixels.size() * 3);
    for (const auto& p : pixels) {
        buffer.push_back(p.r);
        buffer.push_back(p.g);
        buffer.push_back(p.b);
    }
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * width * 3;
    write_atomically(path, [&](const fs::path& tmp) { encode_png(tmp, width, height, PNG_COLOR_TYPE_RGB, 8, rows, {}); });
}

void write_png_grey8(const fs::path& path, int width, int height, std::span<const std::uint8_t> values) {
    check_size(path, width, height, values.size(), 1);
    std::vector<png_byte> buffer(values.begin(), values.end());
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * width;
    write_atomically(path, [&](const fs::path& tmp) { encode_png(tmp, width, height, PNG_COLOR_TYPE_GRAY, 8, rows, {}); });
}

void write_png_indexed(const fs::path& path, int width, int height, std::span<const std::uint8_t> indices,
                       std::span<const Srgb8> palette) {
    check_size(path, width, height, indices.size(), 1);
    if (palette.empty() || palette.size() > 256) throw usage_error(path.string() + ": palette must hold 1..256 entries");
    for (auto i : indices)
        if (i >= palette.size()) throw usage_error(path.string() + ": label index outside the palette");
    std::vector<png_byte> buffer(indices.begin(), indices.end());
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * width;
    write_atomically(path, [&](const fs::path& tmp) {
        encode_png(tmp, width, height, PNG_COLOR_TYPE_PALETTE, 8, rows, palette);
    });
}

void write_png_rgb16(const fs::path& path, const Image& image) {
    check_size(path, image.width, image.height, image.size(), 1);
    std::vector<png_byte> buffer;
    buffer.reserve(image.size() * 6);
    for (const auto& p : image.pixels) {
        for (double c : {p.r, p.g, p.b}) {
            const auto v = static_cast<unsigned>(std::clamp(std::lround(c * 65535.0), 0L, 65535L));
            buffer.push_back(static_cast<png_byte>(v >> 8));
            buffer.push_back(static_cast<png_byte>(v & 0xff));
        }
    }
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * image.width * 6;
    write_atomically(path, [&](const fs::path& tmp) {
        encode_png(tmp, image.width, image.height, PNG_COLOR_TYPE_RGB, 16, rows, {});
    });
}

void write_ppm(const fs::path& path, int width, int height, std::span<const Srgb8> pixels) {
    check_size(path, width, height, pixels.size(), 1);
    write_atomically(path, [&](const fs::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        out << "P6\n" << width << ' ' << height << "\n255\n";
        for (const auto& p : pixels) {
            const char rgb[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
            out.write(rgb, 3);
        }
        if (!out.flush()) throw data_error(path.string() + ": write failed");
    });
}

std::vector<Srgb8> to_rgb8(const Image& image) {
    std::vector<Srgb8> out;
    out.reserve(image.size());
    for (const auto& p : image.pixels) out.push_back(quantise(p));
    return out;
}

IndexedImage read_png_indexed(const fs::path& path) {
    FilePtr fp = open_file(path, "rb");
    PngError err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
    if (!png) throw data_error(path.string() + ": libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    IndexedImage out;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw data_error(path.string() + ": PNG decode failed: " + err.message);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_PALETTE) png_error(png, "not a palette image");
    png_set_packing(png);
    png_read_update_info(png, info);
    const auto width = png_get_image_width(png, info);
    const auto height = png_get_image_height(png, info);
    const auto rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_colorp plte = nullptr;
    int entries = 0;
    png_get_PLTE(png, info, &plte, &entries);
    for (int i = 0; i < entries; ++i) out.palette.push_back({plte[i].red, plte[i].green, plte[i].blue});
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.indices.reserve(static_cast<std::size_t>(width) * height);
    for (png_uint_32 y = 0; y < height; ++y)
        out.indices.insert(out.indices.end(), rows[y], rows[y] + width);
    return out;
}

}  // namespace chromaterm

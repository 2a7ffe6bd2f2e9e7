#pragma once

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "comprint/errors.hpp"
#include "comprint/image.hpp"

// PNG and baseline-JPEG image I/O. Everything decodes to single-channel
// luminance; color inputs go through the BT.601 luma transform.
namespace comprint::io {

inline float bt601_luma(float r, float g, float b) {
    return 0.299f * r + 0.587f * g + 0.114f * b;
}

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

namespace detail {

struct PngReadCtx {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

inline void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->pos + len > ctx->size) png_error(png, "read past end of buffer");
    std::memcpy(out, ctx->data + ctx->pos, len);
    ctx->pos += len;
}

inline void png_mem_write(png_structp png, png_bytep data, png_size_t len) {
    auto* sink = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    sink->insert(sink->end(), data, data + len);
}

inline void png_mem_flush(png_structp) {}

}  // namespace detail

inline bool looks_like_png(const std::vector<std::uint8_t>& bytes) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

inline GrayImage decode_png_gray(const std::vector<std::uint8_t>& bytes) {
    if (!looks_like_png(bytes)) throw InvalidArgument("decode_png_gray: not a PNG stream");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("decode_png_gray: png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("decode_png_gray: png_create_info_struct failed");
    }
    std::vector<std::uint8_t> rgb;
    int width = 0, height = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InvalidArgument("decode_png_gray: malformed PNG");
    }
    detail::PngReadCtx ctx{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &ctx, detail::png_mem_read);
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    // Normalize every layout to 8-bit RGB, then take luma.
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    rgb.resize(static_cast<std::size_t>(width) * height * 3);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = rgb.data() + static_cast<std::size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    GrayImage out(width, height);
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] = bt601_luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
    return out;
}

inline std::vector<std::uint8_t> encode_png_gray(const GrayImage& img) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("encode_png_gray: png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("encode_png_gray: png_create_info_struct failed");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("encode_png_gray: libpng write failure");
    }
    png_set_write_fn(png, &out, detail::png_mem_write, detail::png_mem_flush);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::vector<std::uint8_t> px = to_bytes(img);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(px.data() + static_cast<std::size_t>(y) * img.width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

// 8-bit RGB rows (3 bytes per pixel); used for heatmap renderings.
inline std::vector<std::uint8_t> encode_png_rgb(const std::vector<std::uint8_t>& rgb, int width,
                                                int height) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw InvalidArgument("encode_png_rgb: buffer does not match dimensions");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("encode_png_rgb: png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("encode_png_rgb: png_create_info_struct failed");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("encode_png_rgb: libpng write failure");
    }
    png_set_write_fn(png, &out, detail::png_mem_write, detail::png_mem_flush);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

// ---------------------------------------------------------------------------
// JPEG (libjpeg). The encoder doubles as the reference codec in tests.
// ---------------------------------------------------------------------------

namespace detail {

struct JpegErrorMgr {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_jpeg_gray(const GrayImage& img, int quality,
                                                  bool float_dct = true) {
    if (quality < 1 || quality > 100) throw InvalidArgument("encode_jpeg_gray: quality outside [1,100]");
    const std::vector<std::uint8_t> px = to_bytes(img);

    jpeg_compress_struct cinfo;
    detail::JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = detail::jpeg_error_exit;
    unsigned char* buf = nullptr;
    unsigned long buf_size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (buf) free(buf);
        throw Error(std::string("encode_jpeg_gray: ") + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buf, &buf_size);
    cinfo.image_width = img.width;
    cinfo.image_height = img.height;
    cinfo.input_components = 1;
    cinfo.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    if (float_dct) cinfo.dct_method = JDCT_FLOAT;
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(px.data() +
                                            static_cast<std::size_t>(cinfo.next_scanline) * img.width);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::vector<std::uint8_t> out(buf, buf + buf_size);
    free(buf);
    return out;
}

inline GrayImage decode_jpeg_gray(const std::vector<std::uint8_t>& bytes, bool float_dct = true) {
    jpeg_decompress_struct cinfo;
    detail::JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = detail::jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw InvalidArgument(std::string("decode_jpeg_gray: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), bytes.size());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_GRAYSCALE;
    if (float_dct) cinfo.dct_method = JDCT_FLOAT;
    jpeg_start_decompress(&cinfo);
    GrayImage out(cinfo.output_width, cinfo.output_height);
    std::vector<std::uint8_t> row(cinfo.output_width);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW rp = row.data();
        const int y = cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &rp, 1);
        for (unsigned x = 0; x < cinfo.output_width; ++x) out.at(y, x) = row[x];
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw InvalidArgument("read_file: cannot open " + path.string());
    std::fseek(f, 0, SEEK_END);
    const long size = std::ftell(f);
    std::fseek(f, 0, SEEK_SET);
    std::vector<std::uint8_t> bytes(size > 0 ? static_cast<std::size_t>(size) : 0);
    if (!bytes.empty() && std::fread(bytes.data(), 1, bytes.size(), f) != bytes.size()) {
        std::fclose(f);
        throw Error("read_file: short read on " + path.string());
    }
    std::fclose(f);
    return bytes;
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw Error("write_file: cannot open " + path.string());
    if (!bytes.empty() && std::fwrite(bytes.data(), 1, bytes.size(), f) != bytes.size()) {
        std::fclose(f);
        throw Error("write_file: short write on " + path.string());
    }
    std::fclose(f);
}

// Loads PNG or JPEG by signature, as grayscale.
inline GrayImage load_image_gray(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (looks_like_png(bytes)) return decode_png_gray(bytes);
    if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) return decode_jpeg_gray(bytes);
    throw InvalidArgument("load_image_gray: " + path.string() + " is neither PNG nor JPEG");
}

inline void save_png_gray(const std::filesystem::path& path, const GrayImage& img) {
    write_file(path, encode_png_gray(img));
}

}  // namespace comprint::io

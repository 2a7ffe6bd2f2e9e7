#pragma once

#include <array>
#include <limits>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "comprint/errors.hpp"
#include "comprint/image.hpp"

// JPEG compression-artifact simulation: the DCT/quantize/dequantize/IDCT
// pipeline with arbitrary quantization tables, plus DQT parsing for real
// files. Entropy coding is lossless and therefore not simulated.
namespace comprint::jpegsim {

enum class TableOrigin { StandardQf, Photoshop, Parsed, User };

struct QuantTable {
    std::array<int, 64> values{};  // natural (row-major) order
    std::string label;
    TableOrigin origin = TableOrigin::User;

    int at(int r, int c) const { return values[r * 8 + c]; }

    bool valid() const {
        for (int v : values)
            if (v < 1 || v > 255) return false;
        return true;
    }
};

// Annex K.1 luminance table; quantization tables scale from this.
inline const std::array<int, 64>& standard_luminance_table() {
    static const std::array<int, 64> t = {
        16, 11, 10, 16, 24,  40,  51,  61,
        12, 12, 14, 19, 26,  58,  60,  55,
        14, 13, 16, 24, 40,  57,  69,  56,
        14, 17, 22, 29, 51,  87,  80,  62,
        18, 22, 37, 56, 68,  109, 103, 77,
        24, 35, 55, 64, 81,  104, 113, 92,
        49, 64, 78, 87, 103, 121, 120, 101,
        72, 92, 95, 98, 112, 100, 103, 99};
    return t;
}

inline const std::array<int, 64>& zigzag_order() {
    static const std::array<int, 64> z = {
        0,  1,  8,  16, 9,  2,  3,  10,
        17, 24, 32, 25, 18, 11, 4,  5,
        12, 19, 26, 33, 40, 48, 41, 34,
        27, 20, 13, 6,  7,  14, 21, 28,
        35, 42, 49, 56, 57, 50, 43, 36,
        29, 22, 15, 23, 30, 37, 44, 51,
        58, 59, 52, 45, 38, 31, 39, 46,
        53, 60, 61, 54, 47, 55, 62, 63};
    return z;
}

// Standard-QF table: the base table under the conventional linear scaling
// law, entry' = clamp(floor((entry*s + 50)/100), 1, 255) with the integer
// scale s = 5000/qf (qf < 50) or 200 - 2*qf. Integer arithmetic matches the
// tables that reference encoders emit at the same quality.
inline QuantTable qf_to_table(int qf) {
    if (qf < 1 || qf > 100)
        throw InvalidArgument("qf_to_table: quality factor " + std::to_string(qf) +
                              " outside [1, 100]");
    const long scale = (qf < 50) ? 5000L / qf : 200L - 2L * qf;
    QuantTable out;
    const auto& base = standard_luminance_table();
    for (int i = 0; i < 64; ++i) {
        long v = (base[i] * scale + 50L) / 100L;
        out.values[i] = static_cast<int>(std::clamp(v, 1L, 255L));
    }
    out.label = "QF" + std::to_string(qf);
    out.origin = TableOrigin::StandardQf;
    return out;
}

namespace detail {

// Orthonormal DCT-II basis: basis[u][x] = a(u) cos((2x+1)u pi / 16).
// This normalization is exactly the one T.81 quantization tables apply to.
inline const std::array<std::array<double, 8>, 8>& dct_basis() {
    static const auto basis = [] {
        std::array<std::array<double, 8>, 8> m{};
        const double pi = std::acos(-1.0);
        for (int u = 0; u < 8; ++u) {
            const double a = (u == 0) ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int x = 0; x < 8; ++x)
                m[u][x] = a * std::cos((2 * x + 1) * u * pi / 16.0);
        }
        return m;
    }();
    return basis;
}

}  // namespace detail

// F = M B M^T on one 8x8 block, float64.
inline void forward_dct8(const double block[64], double coeff[64]) {
    const auto& m = detail::dct_basis();
    double tmp[64];
    for (int u = 0; u < 8; ++u)
        for (int y = 0; y < 8; ++y) {
            double s = 0.0;
            for (int x = 0; x < 8; ++x) s += m[u][x] * block[x * 8 + y];
            tmp[u * 8 + y] = s;
        }
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int y = 0; y < 8; ++y) s += tmp[u * 8 + y] * m[v][y];
            coeff[u * 8 + v] = s;
        }
}

inline void inverse_dct8(const double coeff[64], double block[64]) {
    const auto& m = detail::dct_basis();
    double tmp[64];
    for (int x = 0; x < 8; ++x)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int u = 0; u < 8; ++u) s += m[u][x] * coeff[u * 8 + v];
            tmp[x * 8 + v] = s;
        }
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            double s = 0.0;
            for (int v = 0; v < 8; ++v) s += tmp[x * 8 + v] * m[v][y];
            block[x * 8 + y] = s;
        }
}

namespace detail {

// The float64 pipeline per 8x8 block: level shift, DCT, divide by the table
// and round, multiply back, inverse DCT, unshift, clamp. Deterministic;
// quantization is the only lossy step.
inline std::vector<double> simulate_compression(const GrayImage& img, const QuantTable& table) {
    if (img.width < 8 || img.height < 8)
        throw InvalidArgument("compress: image must be at least 8x8");
    if (img.width % 8 != 0 || img.height % 8 != 0)
        throw InvalidArgument("compress: dimensions must be multiples of 8 (got " +
                              std::to_string(img.width) + "x" + std::to_string(img.height) + ")");
    if (!table.valid()) throw InvalidArgument("compress: quantization table entries outside [1,255]");

    std::vector<double> out(img.pixel_count());
    double block[64], coeff[64];
    for (int by = 0; by < img.height; by += 8) {
        for (int bx = 0; bx < img.width; bx += 8) {
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    block[y * 8 + x] = static_cast<double>(img.at(by + y, bx + x)) - 128.0;
            forward_dct8(block, coeff);
            for (int i = 0; i < 64; ++i) {
                const double q = static_cast<double>(table.values[i]);
                coeff[i] = std::round(coeff[i] / q) * q;
            }
            inverse_dct8(coeff, block);
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    out[static_cast<std::size_t>(by + y) * img.width + bx + x] =
                        std::clamp(block[y * 8 + x] + 128.0, 0.0, 255.0);
        }
    }
    return out;
}

// Single float rounding point shared by compress and compression_noise: the
// residual is the rounded quantity and the output sample is defined as
// sample + residual in float arithmetic, so the definitional identity
// compress(img) == img + compression_noise(img) holds bit-exactly. The
// residual is nudged by at most a few ulp to keep the sum inside [0, 255].
inline void split_residual(float sample, double compressed, float& residual_out, float& value_out) {
    constexpr float inf = std::numeric_limits<float>::infinity();
    float n = static_cast<float>(compressed - static_cast<double>(sample));
    float v = sample + n;
    while (v > 255.0f) {
        n = std::nextafterf(n, -inf);
        v = sample + n;
    }
    while (v < 0.0f) {
        n = std::nextafterf(n, inf);
        v = sample + n;
    }
    residual_out = n;
    value_out = v;
}

}  // namespace detail

// Quantization-artifact simulation; see detail::simulate_compression.
inline GrayImage compress(const GrayImage& img, const QuantTable& table) {
    const std::vector<double> sim = detail::simulate_compression(img, table);
    GrayImage out(img.width, img.height);
    float residual;
    for (std::size_t i = 0; i < sim.size(); ++i)
        detail::split_residual(img.samples[i], sim[i], residual, out.samples[i]);
    return out;
}

// Convenience wrapper for arbitrary sizes: center-crops to block multiples
// first, so the caller never deals with partial edge blocks.
inline GrayImage compress_center_cropped(const GrayImage& img, const QuantTable& table) {
    return compress(center_crop_multiple(img, 8), table);
}

// compress(img) - img, elementwise. The pretraining target.
inline GrayImage compression_noise(const GrayImage& img, const QuantTable& table) {
    const std::vector<double> sim = detail::simulate_compression(img, table);
    GrayImage noise(img.width, img.height);
    float value;
    for (std::size_t i = 0; i < sim.size(); ++i)
        detail::split_residual(img.samples[i], sim[i], noise.samples[i], value);
    return noise;
}

// ---------------------------------------------------------------------------
// DQT parsing (ITU-T T.81 marker syntax)
// ---------------------------------------------------------------------------

inline std::vector<QuantTable> parse_dqt(const std::vector<std::uint8_t>& bytes) {
    const std::size_t n = bytes.size();
    if (n < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8)
        throw NotAJpeg("parse_dqt: missing SOI marker, not a JPEG stream");

    std::vector<QuantTable> tables;
    std::size_t pos = 2;
    while (pos < n) {
        // Fill bytes before a marker are legal.
        while (pos < n && bytes[pos] == 0xFF && pos + 1 < n && bytes[pos + 1] == 0xFF) ++pos;
        if (pos + 1 >= n) throw MalformedStream("parse_dqt: truncated marker", pos);
        if (bytes[pos] != 0xFF) throw MalformedStream("parse_dqt: expected marker byte 0xFF", pos);
        const std::uint8_t marker = bytes[pos + 1];
        pos += 2;

        if (marker == 0xD9) break;                       // EOI
        if (marker == 0xDA) break;                       // SOS: entropy data follows
        if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) continue;  // standalone

        if (pos + 2 > n) throw MalformedStream("parse_dqt: truncated segment length", pos);
        const std::size_t seg_len = (static_cast<std::size_t>(bytes[pos]) << 8) | bytes[pos + 1];
        if (seg_len < 2) throw MalformedStream("parse_dqt: segment length below 2", pos);
        if (pos + seg_len > n) throw MalformedStream("parse_dqt: segment runs past end of stream", pos);

        if (marker == 0xDB) {
            std::size_t p = pos + 2;
            const std::size_t seg_end = pos + seg_len;
            while (p < seg_end) {
                const int precision = bytes[p] >> 4;
                if (precision != 0 && precision != 1)
                    throw MalformedStream("parse_dqt: bad table precision nibble", p);
                ++p;
                const std::size_t entry_bytes = precision ? 2 : 1;
                if (p + 64 * entry_bytes > seg_end)
                    throw MalformedStream("parse_dqt: truncated quantization table", p);
                QuantTable t;
                const auto& zz = zigzag_order();
                for (int i = 0; i < 64; ++i) {
                    int v;
                    if (precision) {
                        v = (static_cast<int>(bytes[p]) << 8) | bytes[p + 1];
                        p += 2;
                    } else {
                        v = bytes[p];
                        ++p;
                    }
                    if (v == 0) throw MalformedStream("parse_dqt: zero quantizer entry", p - 1);
                    t.values[zz[i]] = v;
                }
                t.label = "parsed#" + std::to_string(tables.size());
                t.origin = TableOrigin::Parsed;
                tables.push_back(std::move(t));
            }
        }
        pos += seg_len;
    }
    return tables;
}

// Minimal synthetic stream (SOI, one DQT segment holding all tables, EOI).
// Writing 16-bit entries exercises the parser's wide path.
inline std::vector<std::uint8_t> serialize_dqt(const std::vector<QuantTable>& tables,
                                               bool wide_precision = false) {
    std::vector<std::uint8_t> out = {0xFF, 0xD8, 0xFF, 0xDB};
    const std::size_t per_table = 1 + 64 * (wide_precision ? 2 : 1);
    const std::size_t seg_len = 2 + per_table * tables.size();
    out.push_back(static_cast<std::uint8_t>(seg_len >> 8));
    out.push_back(static_cast<std::uint8_t>(seg_len & 0xFF));
    const auto& zz = zigzag_order();
    for (std::size_t ti = 0; ti < tables.size(); ++ti) {
        out.push_back(static_cast<std::uint8_t>(((wide_precision ? 1 : 0) << 4) | (ti & 0x3)));
        for (int i = 0; i < 64; ++i) {
            const int v = tables[ti].values[zz[i]];
            if (wide_precision) {
                out.push_back(static_cast<std::uint8_t>(v >> 8));
                out.push_back(static_cast<std::uint8_t>(v & 0xFF));
            } else {
                out.push_back(static_cast<std::uint8_t>(v));
            }
        }
    }
    out.push_back(0xFF);
    out.push_back(0xD9);
    return out;
}

struct NearestQf {
    int qf = 0;
    long distance = 0;  // L1 over the 64 entries
};

// Exhaustive scan over QF 1..100; ties go to the larger QF.
inline NearestQf nearest_standard_qf(const QuantTable& table) {
    NearestQf best{0, 0};
    bool first = true;
    for (int qf = 1; qf <= 100; ++qf) {
        const QuantTable cand = qf_to_table(qf);
        long d = 0;
        for (int i = 0; i < 64; ++i) d += std::abs(cand.values[i] - table.values[i]);
        if (first || d <= best.distance) {
            best = {qf, d};
            first = false;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Compression-class registry
// ---------------------------------------------------------------------------

struct CompressionClassRegistry {
    std::vector<QuantTable> tables;

    void add(QuantTable t) {
        if (!t.valid()) throw InvalidArgument("registry: table entries outside [1,255]");
        for (const auto& e : tables)
            if (e.label == t.label)
                throw InvalidArgument("registry: duplicate label '" + t.label + "'");
        tables.push_back(std::move(t));
    }

    const QuantTable& by_label(const std::string& label) const {
        for (const auto& t : tables)
            if (t.label == label) return t;
        throw InvalidArgument("registry: no table labelled '" + label + "'");
    }

    std::size_t size() const { return tables.size(); }

    // Number of value-distinct tables; Siamese training needs at least two.
    std::size_t distinct_value_count() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < tables.size(); ++i) {
            bool dup = false;
            for (std::size_t j = 0; j < i && !dup; ++j)
                dup = tables[i].values == tables[j].values;
            if (!dup) ++n;
        }
        return n;
    }
};

// The nine Photoshop-style tables shipped with the library, coarsest first
// (PS4) to finest (PS12). Values are the Photoshop-equivalent luminance
// tables distributed with Pillow's JPEG presets; PS10 and PS11 share one
// luminance table in that source. The data file under data/ carries the
// same records and can be swapped out by the user.
inline std::vector<QuantTable> builtin_photoshop_tables() {
    static const std::array<std::array<int, 64>, 9> values = {{
        {20, 16, 25, 39, 50, 46, 62, 68, 16, 18, 23, 38, 38, 53, 65, 68, 25, 23, 31, 38, 53, 65,
         68, 68, 39, 38, 38, 53, 65, 68, 68, 68, 50, 38, 53, 65, 68, 68, 68, 68, 46, 53, 65, 68,
         68, 68, 68, 68, 62, 65, 68, 68, 68, 68, 68, 68, 68, 68, 68, 68, 68, 68, 68, 68},
        {16, 11, 11, 16, 23, 27, 31, 30, 11, 12, 12, 15, 20, 23, 23, 30, 11, 12, 13, 16, 23, 26,
         35, 47, 16, 15, 16, 23, 26, 37, 47, 64, 23, 20, 23, 26, 39, 51, 64, 64, 27, 23, 26, 37,
         51, 64, 64, 64, 31, 23, 35, 47, 64, 64, 64, 64, 30, 30, 47, 64, 64, 64, 64, 64},
        {18, 14, 14, 21, 30, 35, 34, 17, 14, 16, 16, 19, 26, 23, 12, 12, 14, 16, 17, 21, 23, 12,
         12, 12, 21, 19, 21, 23, 12, 12, 12, 12, 30, 26, 23, 12, 12, 12, 12, 12, 35, 23, 12, 12,
         12, 12, 12, 12, 34, 12, 12, 12, 12, 12, 12, 12, 17, 12, 12, 12, 12, 12, 12, 12},
        {6,  4,  4,  6,  9,  11, 12, 16, 4,  5,  5,  6,  8,  10, 12, 12, 4,  5,  5,  6,  10, 12,
         14, 19, 6,  6,  6,  11, 12, 15, 19, 28, 9,  8,  10, 12, 16, 20, 27, 31, 11, 10, 12, 15,
         20, 27, 31, 31, 12, 12, 14, 19, 27, 31, 31, 31, 16, 12, 19, 28, 31, 31, 31, 31},
        {12, 8,  8,  12, 17, 21, 24, 17, 8,  9,  9,  11, 15, 19, 12, 12, 8,  9,  10, 12, 19, 12,
         12, 12, 12, 11, 12, 21, 12, 12, 12, 12, 17, 15, 19, 12, 12, 12, 12, 12, 21, 19, 12, 12,
         12, 12, 12, 12, 24, 12, 12, 12, 12, 12, 12, 12, 17, 12, 12, 12, 12, 12, 12, 12},
        {6,  4,  4,  6,  9,  11, 12, 16, 4,  5,  5,  6,  8,  10, 12, 12, 4,  5,  5,  6,  10, 12,
         12, 12, 6,  6,  6,  11, 12, 12, 12, 12, 9,  8,  10, 12, 12, 12, 12, 12, 11, 10, 12, 12,
         12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 16, 12, 12, 12, 12, 12, 12, 12},
        {2,  2, 2, 2, 3,  4,  5,  6,  2, 2, 2, 2, 3,  4,  5,  6,  2, 2, 2, 2, 4,  5,  7,  9,
         2,  2, 2, 4, 5,  7,  9,  12, 3, 3, 4, 5, 8,  10, 12, 12, 4, 4, 5, 7, 10, 12, 12, 12,
         5,  5, 7, 9, 12, 12, 12, 12, 6, 6, 9, 12, 12, 12, 12, 12},
        {2,  2, 2, 2, 3,  4,  5,  6,  2, 2, 2, 2, 3,  4,  5,  6,  2, 2, 2, 2, 4,  5,  7,  9,
         2,  2, 2, 4, 5,  7,  9,  12, 3, 3, 4, 5, 8,  10, 12, 12, 4, 4, 5, 7, 10, 12, 12, 12,
         5,  5, 7, 9, 12, 12, 12, 12, 6, 6, 9, 12, 12, 12, 12, 12},
        {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2,
         1, 1, 1, 1, 1, 1, 2, 2, 1, 1, 1, 1, 1, 2, 2, 3, 1, 1, 1, 1, 2, 2, 3, 3,
         1, 1, 1, 2, 2, 3, 3, 3, 1, 1, 2, 2, 3, 3, 3, 3},
    }};
    std::vector<QuantTable> out;
    out.reserve(9);
    for (int i = 0; i < 9; ++i) {
        QuantTable t;
        t.values = values[i];
        t.label = "PS" + std::to_string(i + 4);
        t.origin = TableOrigin::Photoshop;
        out.push_back(std::move(t));
    }
    return out;
}

// Table data file: one record per table, "label" then 64 integers in natural
// order, whitespace separated; '#' starts a comment.
inline std::vector<QuantTable> load_table_file(const std::filesystem::path& path,
                                               TableOrigin origin = TableOrigin::User) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("load_table_file: cannot open " + path.string());
    std::string stripped, line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        stripped += line;
        stripped += ' ';
    }
    std::istringstream ss(stripped);
    std::vector<QuantTable> out;
    std::string label;
    while (ss >> label) {
        QuantTable t;
        t.label = label;
        t.origin = origin;
        for (int i = 0; i < 64; ++i) {
            if (!(ss >> t.values[i]))
                throw InvalidArgument("load_table_file: record '" + label +
                                      "' has fewer than 64 entries");
        }
        if (!t.valid())
            throw InvalidArgument("load_table_file: record '" + label +
                                  "' has entries outside [1,255]");
        out.push_back(std::move(t));
    }
    return out;
}

inline void save_table_file(const std::filesystem::path& path,
                            const std::vector<QuantTable>& tables) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("save_table_file: cannot open " + path.string());
    for (const auto& t : tables) {
        out << t.label << "\n";
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) out << (c ? " " : "  ") << t.at(r, c);
            out << "\n";
        }
    }
}

// 10 standard QFs {20,25,...,90} plus the nine Photoshop tables: 19 classes.
inline CompressionClassRegistry default_registry() {
    CompressionClassRegistry reg;
    for (int qf : {20, 25, 30, 35, 40, 50, 60, 70, 80, 90}) reg.add(qf_to_table(qf));
    for (auto& t : builtin_photoshop_tables()) reg.add(std::move(t));
    return reg;
}

inline CompressionClassRegistry registry_from_labels(const std::vector<std::string>& labels) {
    const CompressionClassRegistry full = default_registry();
    CompressionClassRegistry reg;
    for (const auto& l : labels) reg.add(full.by_label(l));
    return reg;
}

}  // namespace comprint::jpegsim

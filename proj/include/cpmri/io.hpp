#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "cpmri/adam.hpp"
#include "cpmri/errors.hpp"
#include "cpmri/field.hpp"
#include "cpmri/mask.hpp"

namespace cpmri {

// Container framing shared by all binary formats:
//   16-byte magic | u64 little-endian header length | JSON header | payload
inline constexpr char kFieldMagic[16] = {'C', 'P', 'M', 'R', 'I', '.', 'F', 'I',
                                         'E', 'L', 'D', '.', 'V', '1', 0, 0};
inline constexpr char kMaskMagic[16] = {'C', 'P', 'M', 'R', 'I', '.', 'M', 'A',
                                        'S', 'K', '.', 'V', '1', 0, 0, 0};
inline constexpr char kCkptMagic[16] = {'C', 'P', 'M', 'R', 'I', '.', 'C', 'K',
                                        'P', 'T', '.', 'V', '1', 0, 0, 0};

namespace detail {

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& is, void* p, std::size_t n, const char* what) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw io_error(std::string("truncated file while reading ") + what);
}

inline void write_container(std::ostream& os, const char (&magic)[16], const nlohmann::json& header,
                            const void* payload, std::size_t payload_bytes) {
    write_bytes(os, magic, 16);
    const std::string h = header.dump();
    const std::uint64_t len = h.size();
    write_bytes(os, &len, sizeof len);
    write_bytes(os, h.data(), h.size());
    if (payload_bytes > 0) write_bytes(os, payload, payload_bytes);
}

inline nlohmann::json read_container_header(std::istream& is, const char (&magic)[16],
                                            const char* what) {
    char m[16];
    read_bytes(is, m, 16, what);
    if (std::memcmp(m, magic, 16) != 0) throw io_error(std::string("bad magic in ") + what);
    std::uint64_t len = 0;
    read_bytes(is, &len, sizeof len, what);
    if (len > (1u << 26)) throw io_error(std::string("implausible header length in ") + what);
    std::string h(static_cast<std::size_t>(len), '\0');
    read_bytes(is, h.data(), h.size(), what);
    nlohmann::json j = nlohmann::json::parse(h, nullptr, false);
    if (j.is_discarded()) throw io_error(std::string("malformed JSON header in ") + what);
    return j;
}

/// Write to a temporary sibling then rename, so readers never observe a
/// partially written file.
template <class Fn>
void atomic_write(const std::filesystem::path& path, Fn&& writer) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw io_error("cannot open for writing: " + tmp.string());
        writer(os);
        os.flush();
        if (!os) throw io_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("rename failed: " + path.string() + " (" + ec.message() + ")");
}

} // namespace detail

inline void write_field(const std::filesystem::path& path, const ComplexField& x) {
    detail::atomic_write(path, [&x](std::ostream& os) {
        nlohmann::json header{{"height", x.height}, {"width", x.width}, {"dtype", "c128"}};
        static_assert(sizeof(cplx) == 16, "interleaved (re, im) doubles");
        detail::write_container(os, kFieldMagic, header, x.data.data(), x.data.size() * sizeof(cplx));
    });
}

inline ComplexField read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open field file: " + path.string());
    const nlohmann::json h = detail::read_container_header(is, kFieldMagic, path.string().c_str());
    if (!h.contains("height") || !h.contains("width") || h.value("dtype", "") != "c128")
        throw io_error("malformed field header: " + path.string());
    ComplexField x(h.at("height").get<std::int64_t>(), h.at("width").get<std::int64_t>());
    detail::read_bytes(is, x.data.data(), x.data.size() * sizeof(cplx), "field payload");
    return x;
}

inline void write_mask(const std::filesystem::path& path, const SamplingMask& m) {
    detail::atomic_write(path, [&m](std::ostream& os) {
        nlohmann::json header{{"height", m.height},           {"width", m.width},
                              {"dtype", "bool8"},             {"target_R", m.target_R},
                              {"calib_radius", m.calib_radius}, {"seed", m.seed},
                              {"min_distance", m.min_distance}};
        detail::write_container(os, kMaskMagic, header, m.kept.data(), m.kept.size());
    });
}

inline SamplingMask read_mask(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open mask file: " + path.string());
    const nlohmann::json h = detail::read_container_header(is, kMaskMagic, path.string().c_str());
    if (!h.contains("height") || !h.contains("width") || h.value("dtype", "") != "bool8")
        throw io_error("malformed mask header: " + path.string());
    SamplingMask m;
    m.height = h.at("height").get<std::int64_t>();
    m.width = h.at("width").get<std::int64_t>();
    m.target_R = h.value("target_R", 0.0);
    m.calib_radius = h.value("calib_radius", std::int64_t{0});
    m.seed = h.value("seed", std::uint64_t{0});
    m.min_distance = h.value("min_distance", 0.0);
    if (m.height <= 0 || m.width <= 0) throw io_error("malformed mask dimensions: " + path.string());
    m.kept.resize(static_cast<std::size_t>(m.height * m.width));
    detail::read_bytes(is, m.kept.data(), m.kept.size(), "mask payload");
    if (m.kept_count() == 0) throw io_error("mask keeps no samples: " + path.string());
    return m;
}

/// Checkpoint: architecture constants and tensor directory in the JSON
/// header, every parameter (and optionally Adam state) as raw little-endian
/// doubles in the payload. Round-trips bit-exactly.
inline void write_checkpoint(const std::filesystem::path& path, const CPNetWeights& w,
                             const AdamState* adam = nullptr, std::int64_t epoch = -1,
                             std::uint64_t train_seed = 0) {
    std::vector<std::pair<std::string, std::pair<const double*, std::size_t>>> entries;
    for_each_param(w, [&entries](const char* name, const double* p, std::size_t n) {
        entries.emplace_back(name, std::make_pair(p, n));
    });
    if (adam != nullptr) {
        for_each_param(adam->m, [&entries](const char* name, const double* p, std::size_t n) {
            entries.emplace_back(std::string("adam.m/") + name, std::make_pair(p, n));
        });
        for_each_param(adam->v, [&entries](const char* name, const double* p, std::size_t n) {
            entries.emplace_back(std::string("adam.v/") + name, std::make_pair(p, n));
        });
    }

    nlohmann::json dir = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, pn] : entries) {
        dir.push_back({{"name", name}, {"count", pn.second}, {"offset", offset}});
        offset += pn.second;
    }
    nlohmann::json header{{"format", "cpnet-weights"},
                          {"n_iters", w.n_iters()},
                          {"dual_channels", {kDualInChannels, kHiddenChannels, kHiddenChannels, kBlockOutChannels}},
                          {"primal_channels", {kPrimalInChannels, kHiddenChannels, kHiddenChannels, kBlockOutChannels}},
                          {"kernel_size", 3},
                          {"init_seed", w.init_seed},
                          {"train_seed", train_seed},
                          {"has_adam", adam != nullptr},
                          {"adam_t", adam != nullptr ? adam->t : 0},
                          {"epoch", epoch},
                          {"tensors", dir}};

    detail::atomic_write(path, [&](std::ostream& os) {
        detail::write_container(os, kCkptMagic, header, nullptr, 0);
        for (const auto& [name, pn] : entries)
            detail::write_bytes(os, pn.first, pn.second * sizeof(double));
    });
}

struct Checkpoint {
    CPNetWeights weights;
    std::optional<AdamState> adam;
    std::int64_t epoch = -1;
    std::uint64_t train_seed = 0;
};

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open checkpoint: " + path.string());
    const nlohmann::json h = detail::read_container_header(is, kCkptMagic, path.string().c_str());
    if (h.value("format", "") != "cpnet-weights")
        throw io_error("not a weight checkpoint: " + path.string());
    const int n_iters = h.value("n_iters", 0);
    if (n_iters < 1) throw io_error("malformed checkpoint header: " + path.string());

    Checkpoint ck;
    ck.weights = CPNetWeights::zeros(n_iters);
    ck.weights.init_seed = h.value("init_seed", std::uint64_t{0});
    ck.train_seed = h.value("train_seed", std::uint64_t{0});
    ck.epoch = h.value("epoch", std::int64_t{-1});
    const bool has_adam = h.value("has_adam", false);
    if (has_adam) {
        ck.adam = AdamState::for_weights(ck.weights);
        ck.adam->t = h.value("adam_t", std::int64_t{0});
    }

    // payload is laid out in directory order, which is enumeration order
    auto consume = [&is](const char* name, double* p, std::size_t n) {
        detail::read_bytes(is, p, n * sizeof(double), name);
    };
    for_each_param(ck.weights, consume);
    if (has_adam) {
        for_each_param(ck.adam->m, consume);
        for_each_param(ck.adam->v, consume);
    }
    return ck;
}

/// 8-bit binary PGM of a [0,1] grayscale image (values clamped).
inline void write_pgm(const std::filesystem::path& path, const std::vector<double>& pixels,
                      std::int64_t height, std::int64_t width) {
    detail::atomic_write(path, [&](std::ostream& os) {
        os << "P5\n" << width << ' ' << height << "\n255\n";
        for (double v : pixels) {
            const double c = v < 0.0 ? 0.0 : v > 1.0 ? 1.0 : v;
            const unsigned char b = static_cast<unsigned char>(c * 255.0 + 0.5);
            os.put(static_cast<char>(b));
        }
    });
}

} // namespace cpmri

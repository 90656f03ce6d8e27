#include "mrseg/mask_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace mrseg {

namespace {

constexpr std::array<unsigned char, 8> kMagic = {0x4D, 0x52, 0x53, 0x45,
                                                 0x47, 0x56, 0x31, 0x00};

static_assert(std::endian::native == std::endian::little,
              "MRSG I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t offset) {
    T value;
    std::memcpy(&value, in.data() + offset, sizeof(T));
    return value;
}

std::string build_header(std::uint8_t dtype, const Dims& d, const Spacing& s) {
    std::string out;
    out.reserve(kMrsgHeaderSize);
    out.append(reinterpret_cast<const char*>(kMagic.data()), kMagic.size());
    out.push_back(char(dtype));
    put(out, d.nx);
    put(out, d.ny);
    put(out, d.nz);
    put(out, s.sx);
    put(out, s.sy);
    put(out, s.sz);
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& header,
                const char* payload, std::size_t payload_len) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(header.data(), std::streamsize(header.size()));
    f.write(payload, std::streamsize(payload_len));
    if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace

Grid load_mask(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());

    if (bytes.size() < kMrsgHeaderSize ||
        std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
        throw FormatError("not an MRSG v1 file: " + path.string());

    const std::uint8_t dtype = std::uint8_t(bytes[8]);
    if (dtype > 1) throw FormatError("unknown dtype in " + path.string());

    Dims dims{get<std::uint32_t>(bytes, 9), get<std::uint32_t>(bytes, 13),
              get<std::uint32_t>(bytes, 17)};
    if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0)
        throw FormatError("zero dimension in " + path.string());
    Spacing spacing{get<double>(bytes, 21), get<double>(bytes, 29),
                    get<double>(bytes, 37)};

    const std::size_t n = dims.count();
    const std::size_t elem = dtype == 0 ? 1 : 4;
    if (bytes.size() != kMrsgHeaderSize + n * elem)
        throw TruncatedError("payload length mismatch in " + path.string());

    if (dtype == 0) {
        std::vector<std::uint8_t> data(n);
        std::memcpy(data.data(), bytes.data() + kMrsgHeaderSize, n);
        return VoxelMask(dims, spacing, std::move(data));
    }
    std::vector<float> data(n);
    std::memcpy(data.data(), bytes.data() + kMrsgHeaderSize, n * 4);
    for (float v : data)
        if (!(v >= 0.0f && v <= 1.0f))
            throw ValueError("probability outside [0,1] in " + path.string());
    return ProbabilityGrid(dims, spacing, std::move(data));
}

void save_mask(const VoxelMask& mask, const std::filesystem::path& path) {
    const std::string header = build_header(0, mask.dims(), mask.spacing());
    write_file(path, header,
               reinterpret_cast<const char*>(mask.data().data()),
               mask.data().size());
}

void save_mask(const ProbabilityGrid& grid, const std::filesystem::path& path) {
    const std::string header = build_header(1, grid.dims(), grid.spacing());
    write_file(path, header,
               reinterpret_cast<const char*>(grid.data().data()),
               grid.data().size() * 4);
}

void save_mask(const Grid& grid, const std::filesystem::path& path) {
    std::visit([&](const auto& g) { save_mask(g, path); }, grid);
}

VoxelMask load_binary_mask(const std::filesystem::path& path) {
    Grid g = load_mask(path);
    if (auto* m = std::get_if<VoxelMask>(&g)) return std::move(*m);
    throw FormatError("expected a binary mask: " + path.string());
}

}  // namespace mrseg

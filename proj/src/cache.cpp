#include "fraclab/cache.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t hash = seed;
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= p[i];
        hash *= 1099511628211ULL;
    }
    return hash;
}

namespace {

constexpr char kMagic[5] = {'F', 'R', 'L', 'B', '1'};

template <typename T>
void put(std::vector<unsigned char>& buf, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

template <typename T>
T take(const unsigned char*& p, const unsigned char* end) {
    if (p + sizeof(T) > end) throw InvalidState("decomposition cache: truncated file");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

} // namespace

void save_decomposition(const std::string& path, const SpectralDecomposition& dec) {
    if (dec.augmentation() != Augmentation::None)
        throw InvalidState("save_decomposition: only raw decompositions are cached");

    const std::uint32_t n = static_cast<std::uint32_t>(dec.size());
    std::vector<unsigned char> payload;
    payload.reserve(14 + 8ull * n * (n + 1));
    put(payload, n);
    put(payload, static_cast<std::uint8_t>(dec.grid().layout == GridLayout::CellCentered ? 1 : 0));
    put(payload, static_cast<std::uint8_t>(dec.bc() == BcKind::Neumann ? 1 : 0));
    put(payload, dec.grid().left);
    put(payload, dec.grid().right);
    for (double v : dec.eigenvalues()) put(payload, v);
    for (double v : dec.raw_vectors()) put(payload, v);

    const std::uint64_t checksum = fnv1a(payload.data(), payload.size());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidState("save_decomposition: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
    if (!out) throw InvalidState("save_decomposition: write failed for " + path);
}

SpectralDecomposition load_decomposition(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidState("load_decomposition: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw InvalidState("load_decomposition: bad magic in " + path);

    const unsigned char* payload = bytes.data() + sizeof(kMagic);
    const std::size_t payload_len = bytes.size() - sizeof(kMagic) - 8;
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    if (fnv1a(payload, payload_len) != stored)
        throw InvalidState("load_decomposition: checksum mismatch in " + path);

    const unsigned char* p = payload;
    const unsigned char* end = payload + payload_len;
    const auto n = take<std::uint32_t>(p, end);
    const auto layout = take<std::uint8_t>(p, end);
    const auto bc = take<std::uint8_t>(p, end);
    const double left = take<double>(p, end);
    const double right = take<double>(p, end);

    std::vector<double> lam(n), vec(static_cast<std::size_t>(n) * n);
    for (auto& v : lam) v = take<double>(p, end);
    for (auto& v : vec) v = take<double>(p, end);
    if (p != end) throw InvalidState("load_decomposition: trailing bytes in " + path);

    Grid grid = build_uniform_grid(left, right, static_cast<int>(n),
                                   layout ? GridLayout::CellCentered : GridLayout::NodeCentered);
    return SpectralDecomposition(std::move(grid), bc ? BcKind::Neumann : BcKind::Dirichlet,
                                 std::move(lam), std::move(vec), Augmentation::None);
}

} // namespace fraclab

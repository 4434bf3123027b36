#include "embench/cache.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace embench {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', 'C'};
constexpr uint32_t kVersion = 1;
constexpr size_t kHeaderSize = 4 + 4 + 4 + 8;

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
uint32_t read_u32(const unsigned char* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
uint64_t read_u64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

} // namespace

EmbeddingCache::EmbeddingCache(std::string path, size_t dim)
    : path_(std::move(path)), dim_(dim) {
    open_or_create();
}

void EmbeddingCache::reset_file() {
    index_.clear();
    std::string header;
    header.append(kMagic, 4);
    put_u32(header, kVersion);
    put_u32(header, static_cast<uint32_t>(dim_));
    put_u64(header, 0);
    if (!path_.empty()) {
        fs::path dir = fs::path(path_).parent_path();
        if (!dir.empty()) fs::create_directories(dir);
    }
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
}

void EmbeddingCache::open_or_create() {
    std::lock_guard lock(mu_);
    std::ifstream in(path_, std::ios::binary);
    if (!in) {
        reset_file();
        return;
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    auto corrupt = [&](const std::string& why) {
        std::cerr << "[cache] " << path_ << ": " << why << "; starting empty\n";
        reset_file();
    };
    if (bytes.size() < kHeaderSize) return corrupt("truncated header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) return corrupt("bad magic");
    if (read_u32(bytes.data() + 4) != kVersion) return corrupt("unsupported version");
    uint32_t file_dim = read_u32(bytes.data() + 8);
    if (file_dim != dim_) return corrupt("dimension mismatch");
    uint64_t count = read_u64(bytes.data() + 12);
    const size_t record_size = 32 + dim_ * sizeof(float);
    if (bytes.size() < kHeaderSize + count * record_size) return corrupt("truncated records");

    for (uint64_t i = 0; i < count; ++i) {
        size_t off = kHeaderSize + i * record_size;
        Digest256 key;
        std::memcpy(key.data(), bytes.data() + off, 32);
        index_[key] = off + 32;
    }
}

size_t EmbeddingCache::size() const {
    std::lock_guard lock(mu_);
    return index_.size();
}

std::optional<EmbeddingVector> EmbeddingCache::get(const Digest256& key) const {
    uint64_t offset;
    {
        std::lock_guard lock(mu_);
        auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        offset = it->second;
    }
    std::ifstream in(path_, std::ios::binary);
    if (!in) return std::nullopt;
    in.seekg(static_cast<std::streamoff>(offset));
    std::vector<float> values(dim_);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(dim_ * sizeof(float)));
    if (!in) throw CacheCorrupt("cache record unreadable at offset " + std::to_string(offset));
    return EmbeddingVector::of(std::move(values));
}

void EmbeddingCache::put(const Digest256& key, const EmbeddingVector& vec) {
    if (vec.dim() != dim_)
        throw DimensionMismatch("cache expects dim " + std::to_string(dim_) + ", got " +
                                std::to_string(vec.dim()));
    std::lock_guard lock(mu_);
    if (index_.count(key)) return;

    std::fstream out(path_, std::ios::binary | std::ios::in | std::ios::out);
    if (!out) throw CacheCorrupt("cache file vanished: " + path_);
    out.seekp(0, std::ios::end);
    uint64_t offset = static_cast<uint64_t>(out.tellp());
    out.write(reinterpret_cast<const char*>(key.data()), 32);
    out.write(reinterpret_cast<const char*>(vec.values.data()),
              static_cast<std::streamsize>(dim_ * sizeof(float)));

    uint64_t count = index_.size() + 1;
    std::string enc;
    put_u64(enc, count);
    out.seekp(12);
    out.write(enc.data(), 8);
    out.flush();
    index_[key] = offset + 32;
}

} // namespace embench

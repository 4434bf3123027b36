#pragma once
// Persistent embedding cache. Binary layout:
//   magic "EMBC" | u32 LE version=1 | u32 LE dim | u64 LE record count
//   then per record: 32-byte key digest | dim x f32 LE
// Records are appended; the key -> offset index is rebuilt on open. A corrupt
// file (bad magic/version/truncation) is reported and treated as empty.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "embench/digest.hpp"
#include "embench/model.hpp"

namespace embench {

class EmbeddingCache {
public:
    EmbeddingCache(std::string path, size_t dim);

    std::optional<EmbeddingVector> get(const Digest256& key) const;
    void put(const Digest256& key, const EmbeddingVector& vec);

    size_t size() const;
    size_t dim() const { return dim_; }

private:
    std::string path_;
    size_t dim_;
    mutable std::mutex mu_;
    std::map<Digest256, uint64_t> index_;  // key -> file offset of the f32 row
    void open_or_create();
    void reset_file();
};

} // namespace embench

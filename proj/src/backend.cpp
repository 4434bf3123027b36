#include "embench/backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "embench/cache.hpp"
#include "embench/fixtures.hpp"
#include "embench/remote.hpp"

namespace embench {

void BackendSpec::validate() const {
    if (id.empty()) throw ConfigError("backend id must be nonempty");
    if (model_name.empty()) throw ConfigError("backend \"" + id + "\": model_name required");
    if (dim == 0) throw ConfigError("backend \"" + id + "\": dim must be positive");
    if (max_batch == 0 || max_concurrency == 0)
        throw ConfigError("backend \"" + id + "\": max_batch and max_concurrency must be positive");
    if (retry.max_attempts < 1)
        throw ConfigError("backend \"" + id + "\": retry.max_attempts must be >= 1");
    if (price_per_million_tokens < 0)
        throw ConfigError("backend \"" + id + "\": price must be nonnegative");
    if (kind == "remote") {
        if (!endpoint || endpoint->empty())
            throw ConfigError("backend \"" + id + "\": remote kind requires endpoint");
    } else if (kind == "precomputed") {
        if (!vectors_path || vectors_path->empty())
            throw ConfigError("backend \"" + id + "\": precomputed kind requires vectors_path");
    } else if (kind != "hash") {
        throw ConfigError("backend \"" + id + "\": unknown kind \"" + kind + "\"");
    }
}

uint64_t estimate_tokens(const std::string& text) {
    if (text.empty()) return 0;
    uint64_t codepoints = 0;
    for (unsigned char c : text) {
        if ((c & 0xc0) != 0x80) ++codepoints;  // count non-continuation bytes
    }
    if (codepoints == 0) codepoints = 1;
    return (codepoints + 3) / 4;
}

std::string apply_instruction(const std::optional<std::string>& instruction,
                              const std::string& text) {
    if (!instruction || instruction->empty()) return text;
    const std::string& tpl = *instruction;

    static const char* kSlots[] = {"{query}", "{text}", "{article}"};
    size_t best_pos = std::string::npos;
    size_t best_len = 0;
    for (const char* slot : kSlots) {
        size_t pos = tpl.rfind(slot);
        if (pos != std::string::npos && (best_pos == std::string::npos || pos > best_pos)) {
            best_pos = pos;
            best_len = std::string(slot).size();
        }
    }
    if (best_pos != std::string::npos) {
        std::string out = tpl;
        out.replace(best_pos, best_len, text);
        return out;
    }
    return "Instruction: " + tpl + " Query: " + text;
}

Digest256 embedding_key(const std::string& model_name,
                        const std::optional<std::string>& instruction,
                        const std::string& text) {
    std::string buf;
    buf.reserve(model_name.size() + text.size() + 2 +
                (instruction ? instruction->size() : 0));
    buf += model_name;
    buf.push_back('\x1f');
    if (instruction) buf += *instruction;
    buf.push_back('\x1f');
    buf += text;
    return sha256(buf);
}

LedgerSummary ledger_summary(const UsageLedger& ledger) {
    LedgerSummary s;
    s.cost_estimate = ledger.cost_estimate;
    s.tokens_estimated = ledger.tokens_estimated;
    if (ledger.latencies_ms.empty()) return s;
    std::vector<double> sorted = ledger.latencies_ms;
    std::sort(sorted.begin(), sorted.end());
    auto nearest_rank = [&](double p) {
        size_t rank = static_cast<size_t>(std::ceil(p * static_cast<double>(sorted.size())));
        if (rank == 0) rank = 1;
        return sorted[rank - 1];
    };
    s.p50_ms = nearest_rank(0.50);
    s.p95_ms = nearest_rank(0.95);
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean_ms = sum / static_cast<double>(sorted.size());
    return s;
}

// --- transports ---------------------------------------------------------------

namespace {

class HashTransport final : public Transport {
public:
    HashTransport(size_t dim, uint64_t seed) : dim_(dim), seed_(seed) {}
    std::vector<std::vector<float>> embed_batch(
        const std::vector<std::string>& payloads) override {
        std::vector<std::vector<float>> out;
        out.reserve(payloads.size());
        for (const auto& text : payloads) out.push_back(hash_embed(text, dim_, seed_).values);
        return out;
    }
    bool metered() const override { return false; }

private:
    size_t dim_;
    uint64_t seed_;
};

class PrecomputedTransport final : public Transport {
public:
    PrecomputedTransport(std::string model_name, const std::string& path, size_t dim)
        : model_name_(std::move(model_name)), store_(path, dim) {}
    std::vector<std::vector<float>> embed_batch(
        const std::vector<std::string>& payloads) override {
        std::vector<std::vector<float>> out;
        out.reserve(payloads.size());
        for (const auto& text : payloads) {
            auto vec = store_.get(embedding_key(model_name_, std::nullopt, text));
            if (!vec)
                throw BackendUnavailable("precomputed store has no vector for a payload (" +
                                         std::to_string(text.size()) + " bytes)");
            out.push_back(std::move(vec->values));
        }
        return out;
    }
    bool metered() const override { return false; }

private:
    std::string model_name_;
    EmbeddingCache store_;
};

} // namespace

std::unique_ptr<Transport> make_hash_transport(size_t dim, uint64_t seed) {
    return std::make_unique<HashTransport>(dim, seed);
}

std::unique_ptr<Transport> make_precomputed_transport(const std::string& model_name,
                                                      const std::string& vectors_path,
                                                      size_t dim) {
    return std::make_unique<PrecomputedTransport>(model_name, vectors_path, dim);
}

// --- pipeline ------------------------------------------------------------------

namespace {

std::unique_ptr<Transport> build_transport(const BackendSpec& spec) {
    if (spec.kind == "hash") return make_hash_transport(spec.dim, spec.seed);
    if (spec.kind == "precomputed")
        return make_precomputed_transport(spec.model_name, *spec.vectors_path, spec.dim);
    return make_remote_transport(spec);
}

} // namespace

Embedder::Embedder(BackendSpec spec, std::function<void(int)> sleep_ms)
    : Embedder(std::move(spec), nullptr, std::move(sleep_ms)) {}

Embedder::Embedder(BackendSpec spec, std::unique_ptr<Transport> transport,
                   std::function<void(int)> sleep_ms)
    : spec_(std::move(spec)), transport_(std::move(transport)), sleep_ms_(std::move(sleep_ms)) {
    spec_.validate();
    if (!transport_) transport_ = build_transport(spec_);
    if (spec_.cache_path && !spec_.cache_path->empty())
        cache_ = std::make_unique<EmbeddingCache>(*spec_.cache_path, spec_.dim);
    if (!sleep_ms_)
        sleep_ms_ = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

Embedder::~Embedder() = default;

UsageLedger Embedder::ledger_snapshot() const {
    std::lock_guard lock(ledger_mu_);
    return ledger_;
}

std::vector<std::vector<float>> Embedder::call_with_retry(
    const std::vector<std::string>& payloads) {
    int attempt = 1;
    for (;;) {
        try {
            transport_calls_.fetch_add(1);
            return transport_->embed_batch(payloads);
        } catch (const BackendUnavailable&) {
            if (attempt >= spec_.retry.max_attempts) throw;
            sleep_ms_(spec_.retry.base_backoff_ms * (1 << (attempt - 1)));
            ++attempt;
        }
    }
}

std::vector<EmbeddingVector> Embedder::embed_texts(
    const std::vector<std::string>& texts, const std::optional<std::string>& instruction) {
    if (texts.empty()) throw ValidationError("embed_texts requires at least one text");

    const size_t n = texts.size();
    std::vector<std::string> payloads(n);
    for (size_t i = 0; i < n; ++i) payloads[i] = apply_instruction(instruction, texts[i]);

    std::vector<std::optional<EmbeddingVector>> out(n);
    std::vector<Digest256> keys(n);
    std::vector<size_t> misses;
    for (size_t i = 0; i < n; ++i) {
        keys[i] = embedding_key(spec_.model_name, instruction, texts[i]);
        if (cache_) {
            if (auto hit = cache_->get(keys[i])) {
                out[i] = std::move(*hit);
                continue;
            }
        }
        misses.push_back(i);
    }

    // Batch the misses in submission order, then run up to max_concurrency
    // workers over the batch queue. Results land in their input slots.
    std::vector<std::vector<size_t>> batches;
    for (size_t i = 0; i < misses.size(); i += spec_.max_batch) {
        size_t end = std::min(misses.size(), i + spec_.max_batch);
        batches.emplace_back(misses.begin() + static_cast<long>(i),
                             misses.begin() + static_cast<long>(end));
    }

    std::atomic<size_t> next_batch{0};
    std::mutex error_mu;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            size_t b = next_batch.fetch_add(1);
            if (b >= batches.size()) return;
            {
                std::lock_guard lock(error_mu);
                if (first_error) return;
            }
            const auto& slots = batches[b];
            std::vector<std::string> batch_payloads;
            batch_payloads.reserve(slots.size());
            for (size_t slot : slots) batch_payloads.push_back(payloads[slot]);
            try {
                auto t0 = std::chrono::steady_clock::now();
                auto rows = call_with_retry(batch_payloads);
                auto t1 = std::chrono::steady_clock::now();
                if (rows.size() != slots.size())
                    throw BackendUnavailable("service returned " + std::to_string(rows.size()) +
                                             " vectors for " + std::to_string(slots.size()) +
                                             " inputs");
                for (size_t j = 0; j < slots.size(); ++j) {
                    if (rows[j].size() != spec_.dim)
                        throw DimensionMismatch("service returned width " +
                                                std::to_string(rows[j].size()) + ", expected " +
                                                std::to_string(spec_.dim));
                    for (float v : rows[j])
                        if (!std::isfinite(v)) throw NaNVector("service returned a non-finite value");
                    out[slots[j]] = EmbeddingVector::of(std::move(rows[j]));
                    if (cache_) cache_->put(keys[slots[j]], *out[slots[j]]);
                }
                uint64_t batch_tokens = 0;
                for (size_t slot : slots) batch_tokens += estimate_tokens(payloads[slot]);
                double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                {
                    std::lock_guard lock(ledger_mu_);
                    ledger_.texts_embedded += slots.size();
                    ledger_.tokens_estimated += batch_tokens;
                    ledger_.cost_estimate = static_cast<double>(ledger_.tokens_estimated) *
                                            spec_.price_per_million_tokens / 1e6;
                    if (transport_->metered()) {
                        ledger_.requests += 1;
                        ledger_.latencies_ms.push_back(ms);
                    }
                }
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    size_t workers = std::min(spec_.max_concurrency, batches.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<EmbeddingVector> result;
    result.reserve(n);
    for (size_t i = 0; i < n; ++i) result.push_back(std::move(*out[i]));
    return result;
}

} // namespace embench

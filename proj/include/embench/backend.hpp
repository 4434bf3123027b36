#pragma once
// Pluggable embedding producers. One pipeline (instruction application ->
// cache lookup -> batched, bounded-concurrency transport calls -> reassembly
// in submission order) serves every backend kind; only the transport differs.

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "embench/digest.hpp"
#include "embench/model.hpp"

namespace embench {

struct RetryPolicy {
    int max_attempts = 4;
    int base_backoff_ms = 250;
};

struct BackendSpec {
    std::string id;
    std::string kind = "remote";  // remote | precomputed | hash
    std::optional<std::string> endpoint;
    std::string model_name;
    size_t dim = 0;
    size_t max_batch = 64;
    size_t max_concurrency = 4;
    RetryPolicy retry;
    double price_per_million_tokens = 0.0;
    std::optional<std::string> vectors_path;  // precomputed store
    std::optional<std::string> cache_path;    // persistent embedding cache
    std::string adapter = "generic";          // wire-format adapter name
    std::optional<std::string> api_key_env;   // env var holding a bearer token
    uint64_t seed = 42;                       // hash backend only

    void validate() const;
};

struct UsageLedger {
    uint64_t requests = 0;
    uint64_t texts_embedded = 0;
    uint64_t tokens_estimated = 0;
    double cost_estimate = 0.0;
    std::vector<double> latencies_ms;
};

struct LedgerSummary {
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double mean_ms = 0.0;
    double cost_estimate = 0.0;
    uint64_t tokens_estimated = 0;
};

// Nearest-rank percentiles over the recorded latencies; all zeros when empty.
LedgerSummary ledger_summary(const UsageLedger& ledger);

// Deterministic token heuristic: ceil(codepoints/4), at least 1 for nonempty.
uint64_t estimate_tokens(const std::string& text);

// Applies an instruction template to one text: the final {query}/{text}/
// {article} placeholder is substituted; a template without one becomes the
// prefix "Instruction: <template> Query: <text>".
std::string apply_instruction(const std::optional<std::string>& instruction,
                              const std::string& text);

// Cache key: SHA-256 of model_name 0x1F instruction-or-empty 0x1F text.
Digest256 embedding_key(const std::string& model_name,
                        const std::optional<std::string>& instruction,
                        const std::string& text);

// A transport turns a batch of final payload texts into raw float rows.
// Throws BackendUnavailable for transient failures (the pipeline retries),
// DimensionMismatch/NaNVector for protocol violations (no retry).
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::vector<std::vector<float>> embed_batch(
        const std::vector<std::string>& payloads) = 0;
    // Remote transports are metered (requests, latency, tokens, cost).
    virtual bool metered() const { return true; }
};

// Pure local transport backed by the seeded hash embedder; never networked.
std::unique_ptr<Transport> make_hash_transport(size_t dim, uint64_t seed);

// Lookup-only transport over a vector store file (cache file layout, keys
// computed with an empty instruction slot over the payload text).
std::unique_ptr<Transport> make_precomputed_transport(const std::string& model_name,
                                                      const std::string& vectors_path,
                                                      size_t dim);

class EmbeddingCache;

class Embedder {
public:
    // Builds the transport from spec.kind. sleep is injectable for tests of
    // the retry schedule; the default really sleeps.
    explicit Embedder(BackendSpec spec,
                      std::function<void(int)> sleep_ms = {});
    // Wraps a caller-provided transport (tests, scripted backends).
    Embedder(BackendSpec spec, std::unique_ptr<Transport> transport,
             std::function<void(int)> sleep_ms = {});
    ~Embedder();

    // One vector per input, order preserved, every vector of spec.dim.
    // Cache is consulted before the transport; the ledger moves on misses only.
    std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts,
                                             const std::optional<std::string>& instruction);

    const BackendSpec& spec() const { return spec_; }
    UsageLedger ledger_snapshot() const;
    // Number of transport batch calls issued so far (resume accounting).
    uint64_t transport_calls() const { return transport_calls_.load(); }

private:
    BackendSpec spec_;
    std::unique_ptr<Transport> transport_;
    std::unique_ptr<EmbeddingCache> cache_;
    std::function<void(int)> sleep_ms_;
    mutable std::mutex ledger_mu_;
    UsageLedger ledger_;
    std::atomic<uint64_t> transport_calls_{0};

    std::vector<std::vector<float>> call_with_retry(const std::vector<std::string>& payloads);
};

} // namespace embench

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "did/chat.hpp"

namespace did::provider {

struct ChatParams {
    std::optional<double> temperature;
    std::optional<double> top_p;
    std::optional<int> max_tokens;

    bool operator==(const ChatParams&) const = default;
};

/// One chat-completion request. Params left unset are not sent, so the
/// provider's own defaults apply.
struct ChatRequest {
    std::string provider_id;
    std::string model;
    chat::Messages messages;
    ChatParams params;

    bool operator==(const ChatRequest&) const = default;
};

struct TokenUsage {
    std::int64_t prompt = 0;
    std::int64_t completion = 0;

    bool operator==(const TokenUsage&) const = default;
};

struct ChatResponse {
    std::string text;
    std::int64_t latency_ms = 0;
    std::optional<TokenUsage> token_usage;
    std::string finish_reason = "stop";

    bool operator==(const ChatResponse&) const = default;
};

/// Persisted record of one request/response pair, keyed for replay.
struct Transcript {
    ChatRequest request;
    ChatResponse response;
    int attempt = 0;
    std::string cache_key;
    std::string timestamp;  // ISO-8601 UTC, set when first persisted
};

/// Stable serialization of a request: JSON with sorted keys, unset params
/// omitted, message content byte-preserved. Equal requests always produce
/// equal bytes, across runs and platforms.
std::string canonical_request_json(const ChatRequest& req);

/// SHA-256 hex over canonical_request_json plus the attempt index.
std::string cache_key_for(const ChatRequest& req, int attempt);

std::string sha256_hex(const std::string& bytes);

// ---------------------------------------------------------------------------

/// A backend that can answer one chat request (one network attempt).
/// Implementations throw TransportError/HttpStatusError/AuthError/
/// MalformedPayloadError; retries live in ChatClient.
class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string id() const = 0;
    virtual ChatResponse send(const ChatRequest& req) = 0;
};

// --- scripted mock ---

struct MockRule {
    enum class Kind { substring, regex };
    Kind kind = Kind::substring;
    std::string pattern;
    std::string response;
};

/// Deterministic provider for tests and offline runs: the last user message
/// is matched against the rules in order, first hit wins.
class ScriptedProvider : public Provider {
public:
    explicit ScriptedProvider(std::vector<MockRule> rules,
                              std::string default_text = "I don't know.",
                              std::string provider_id = "mock");

    std::string id() const override { return provider_id_; }
    ChatResponse send(const ChatRequest& req) override;

    /// The next n send() calls raise TransportError before matching.
    void fail_next(int n) { failures_remaining_ = n; }
    int calls() const { return calls_.load(); }

private:
    struct CompiledRule;
    std::vector<CompiledRule> rules_;
    std::string default_text_;
    std::string provider_id_;
    std::atomic<int> calls_{0};
    std::atomic<int> failures_remaining_{0};
};

// --- transcript store ---

/// One JSON file per transcript, named <cache_key>.json. Writes go through
/// a temp file and an atomic rename, so concurrent writers are safe. Files
/// that fail to parse or whose embedded content hash mismatches are treated
/// as misses and reported through the warning callback.
class TranscriptStore {
public:
    using WarningFn = std::function<void(const std::string&)>;

    explicit TranscriptStore(std::filesystem::path dir, WarningFn warn = {});

    std::optional<Transcript> get(const std::string& cache_key) const;
    void put(const Transcript& transcript);

    std::vector<std::string> keys() const;
    /// Returns the keys of corrupt entries (and warns about each).
    std::vector<std::string> verify() const;
    std::size_t purge();

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    WarningFn warn_;
};

// --- retry/caching client ---

struct RetryPolicy {
    int max_attempts = 5;         // total tries per request
    int base_delay_ms = 200;      // first backoff
    double multiplier = 2.0;
    double jitter_frac = 0.2;     // uniform +/- fraction of the delay
    int max_delay_ms = 8000;
};

enum class CacheMode {
    off,              // always live, nothing persisted
    record,           // serve from store when present, else live + persist
    replay,           // store only; a miss is an error
    replay_else_live, // store first, forward misses to the provider
};

struct ClientOptions {
    std::optional<std::filesystem::path> cache_dir;
    CacheMode mode = CacheMode::record;
    RetryPolicy retry;
    int max_in_flight = 4;
    std::uint64_t jitter_seed = 0;
    TranscriptStore::WarningFn warn;
};

/// The handle callers talk to: complete() resolves a request through the
/// transcript store and/or the provider, retrying transient failures with
/// exponential backoff. Safe for concurrent use from multiple workers.
class ChatClient {
public:
    ChatClient(std::shared_ptr<Provider> provider, ClientOptions options);

    /// attempt distinguishes deliberate re-asks of the same request (repeat
    /// runs); it is part of the cache key.
    ChatResponse complete(const ChatRequest& req, int attempt);

    std::int64_t network_calls() const { return network_calls_.load(); }
    std::int64_t cache_hits() const { return cache_hits_.load(); }
    TranscriptStore* store() { return store_ ? &*store_ : nullptr; }

private:
    ChatResponse complete_live(const ChatRequest& req, int attempt,
                               const std::string& cache_key);

    std::shared_ptr<Provider> provider_;
    ClientOptions options_;
    std::optional<TranscriptStore> store_;
    std::atomic<std::int64_t> network_calls_{0};
    std::atomic<std::int64_t> cache_hits_{0};

    // bounded in-flight gate
    std::mutex gate_mutex_;
    std::condition_variable gate_cv_;
    int in_flight_ = 0;

    std::mutex rng_mutex_;
    std::uint64_t rng_state_;
};

/// Replay-only client over a directory of prior transcripts. Optionally
/// forwards misses to a live provider.
ChatClient make_replay_client(const std::filesystem::path& transcript_dir,
                              std::shared_ptr<Provider> fallback = nullptr,
                              ClientOptions options = {});

// --- HTTP providers ---

enum class Dialect { openai_chat, anthropic_messages };

std::string to_string(Dialect d);
Dialect dialect_from_string(const std::string& s);

struct HttpProviderConfig {
    std::string provider_id;
    Dialect dialect = Dialect::openai_chat;
    /// Full URL, e.g. "https://api.openai.com/v1/chat/completions".
    std::string endpoint;
    /// Name of the environment variable holding the API key. The key is
    /// read from the environment only, never from config files.
    std::string credential_env;
    int timeout_s = 60;
};

class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config);

    std::string id() const override { return config_.provider_id; }
    ChatResponse send(const ChatRequest& req) override;

    const HttpProviderConfig& config() const { return config_; }

private:
    HttpProviderConfig config_;
    std::string base_url_;
    std::string path_;
};

/// Builds the dialect-specific request body (exposed for tests).
std::string http_request_body(Dialect dialect, const ChatRequest& req);

}  // namespace did::provider

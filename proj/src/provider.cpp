#include "did/provider.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "did/errors.hpp"
#include "json.hpp"

namespace did::provider {

using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(std::size_t(len) * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

namespace {

json params_to_json(const ChatParams& p) {
    json j = json::object();
    if (p.temperature) j["temperature"] = *p.temperature;
    if (p.top_p) j["top_p"] = *p.top_p;
    if (p.max_tokens) j["max_tokens"] = *p.max_tokens;
    return j;
}

ChatParams params_from_json(const json& j) {
    ChatParams p;
    if (j.contains("temperature")) p.temperature = j["temperature"].get<double>();
    if (j.contains("top_p")) p.top_p = j["top_p"].get<double>();
    if (j.contains("max_tokens")) p.max_tokens = j["max_tokens"].get<int>();
    return p;
}

json messages_to_json(const chat::Messages& msgs) {
    json arr = json::array();
    for (const chat::Message& m : msgs) {
        arr.push_back({{"content", m.content}, {"role", chat::to_string(m.role)}});
    }
    return arr;
}

chat::Messages messages_from_json(const json& arr) {
    chat::Messages msgs;
    for (const json& m : arr) {
        msgs.push_back({chat::role_from_string(m.at("role").get<std::string>()),
                        m.at("content").get<std::string>()});
    }
    return msgs;
}

json request_to_json(const ChatRequest& req) {
    // nlohmann objects keep keys sorted, which is what makes this canonical.
    json j;
    j["messages"] = messages_to_json(req.messages);
    j["model"] = req.model;
    j["params"] = params_to_json(req.params);
    j["provider_id"] = req.provider_id;
    return j;
}

ChatRequest request_from_json(const json& j) {
    ChatRequest req;
    req.provider_id = j.at("provider_id").get<std::string>();
    req.model = j.at("model").get<std::string>();
    req.messages = messages_from_json(j.at("messages"));
    req.params = params_from_json(j.value("params", json::object()));
    return req;
}

json response_to_json(const ChatResponse& r) {
    json j;
    j["finish_reason"] = r.finish_reason;
    j["latency_ms"] = r.latency_ms;
    j["text"] = r.text;
    if (r.token_usage) {
        j["token_usage"] = {{"completion", r.token_usage->completion},
                            {"prompt", r.token_usage->prompt}};
    }
    return j;
}

ChatResponse response_from_json(const json& j) {
    ChatResponse r;
    r.text = j.at("text").get<std::string>();
    r.latency_ms = j.at("latency_ms").get<std::int64_t>();
    r.finish_reason = j.at("finish_reason").get<std::string>();
    if (j.contains("token_usage")) {
        TokenUsage u;
        u.prompt = j["token_usage"].at("prompt").get<std::int64_t>();
        u.completion = j["token_usage"].at("completion").get<std::int64_t>();
        r.token_usage = u;
    }
    return r;
}

std::string utc_now_iso() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string canonical_request_json(const ChatRequest& req) {
    return request_to_json(req).dump();
}

std::string cache_key_for(const ChatRequest& req, int attempt) {
    return sha256_hex(canonical_request_json(req) + "\nattempt=" + std::to_string(attempt));
}

// --- scripted mock ---

struct ScriptedProvider::CompiledRule {
    MockRule::Kind kind;
    std::string pattern;
    std::regex compiled;  // only for Kind::regex
    std::string response;
};

ScriptedProvider::ScriptedProvider(std::vector<MockRule> rules, std::string default_text,
                                   std::string provider_id)
    : default_text_(std::move(default_text)), provider_id_(std::move(provider_id)) {
    for (MockRule& r : rules) {
        CompiledRule c;
        c.kind = r.kind;
        c.pattern = r.pattern;
        c.response = std::move(r.response);
        if (r.kind == MockRule::Kind::regex) {
            try {
                c.compiled = std::regex(r.pattern);
            } catch (const std::regex_error& e) {
                throw ValidationError("invalid mock rule pattern \"" + r.pattern +
                                      "\": " + e.what());
            }
        }
        rules_.push_back(std::move(c));
    }
}

ChatResponse ScriptedProvider::send(const ChatRequest& req) {
    calls_.fetch_add(1);
    int f = failures_remaining_.load();
    while (f > 0 && !failures_remaining_.compare_exchange_weak(f, f - 1)) {
    }
    if (f > 0) {
        throw TransportError("scripted transport failure");
    }

    std::string last_user;
    for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
        if (it->role == chat::Role::user) {
            last_user = it->content;
            break;
        }
    }

    const std::string* text = &default_text_;
    for (const CompiledRule& r : rules_) {
        bool hit = r.kind == MockRule::Kind::substring
                       ? last_user.find(r.pattern) != std::string::npos
                       : std::regex_search(last_user, r.compiled);
        if (hit) {
            text = &r.response;
            break;
        }
    }

    ChatResponse resp;
    resp.text = *text;
    resp.finish_reason = resp.text.empty() ? "empty" : "stop";
    return resp;
}

// --- transcript store ---

TranscriptStore::TranscriptStore(std::filesystem::path dir, WarningFn warn)
    : dir_(std::move(dir)), warn_(std::move(warn)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
        throw IoError("cannot create transcript dir " + dir_.string() + ": " + ec.message());
    }
    if (!warn_) {
        warn_ = [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
    }
}

namespace {

json transcript_body(const Transcript& t) {
    json body;
    body["attempt"] = t.attempt;
    body["request"] = request_to_json(t.request);
    body["response"] = response_to_json(t.response);
    return body;
}

}  // namespace

std::optional<Transcript> TranscriptStore::get(const std::string& cache_key) const {
    std::filesystem::path file = dir_ / (cache_key + ".json");
    std::ifstream in(file);
    if (!in) return std::nullopt;
    json doc;
    try {
        doc = json::parse(in);
        Transcript t;
        t.cache_key = doc.at("cache_key").get<std::string>();
        t.attempt = doc.at("attempt").get<int>();
        t.timestamp = doc.value("timestamp", "");
        t.request = request_from_json(doc.at("request"));
        t.response = response_from_json(doc.at("response"));
        std::string stored_hash = doc.at("body_sha256").get<std::string>();
        if (stored_hash != sha256_hex(transcript_body(t).dump()) || t.cache_key != cache_key) {
            warn_("transcript " + file.string() + " failed content check; treating as miss");
            return std::nullopt;
        }
        return t;
    } catch (const std::exception& e) {
        warn_("transcript " + file.string() + " unreadable (" + e.what() +
              "); treating as miss");
        return std::nullopt;
    }
}

void TranscriptStore::put(const Transcript& transcript) {
    json doc = transcript_body(transcript);
    doc["cache_key"] = transcript.cache_key;
    doc["timestamp"] = transcript.timestamp;
    doc["body_sha256"] = sha256_hex(transcript_body(transcript).dump());

    std::filesystem::path final_path = dir_ / (transcript.cache_key + ".json");
    // Unique temp name per writer, then atomic rename into place.
    static std::atomic<std::uint64_t> counter{0};
    std::ostringstream tmp_name;
    tmp_name << transcript.cache_key << ".tmp." << ::getpid() << "." << counter.fetch_add(1);
    std::filesystem::path tmp_path = dir_ / tmp_name.str();
    {
        std::ofstream out(tmp_path);
        if (!out) throw IoError("cannot write " + tmp_path.string());
        out << doc.dump(2) << "\n";
        if (!out) throw IoError("failed writing " + tmp_path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp_path, final_path, ec);
    if (ec) {
        std::filesystem::remove(tmp_path);
        throw IoError("cannot finalize " + final_path.string() + ": " + ec.message());
    }
}

std::vector<std::string> TranscriptStore::keys() const {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (entry.path().extension() == ".json") {
            out.push_back(entry.path().stem().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> TranscriptStore::verify() const {
    std::vector<std::string> corrupt;
    for (const std::string& key : keys()) {
        if (!get(key)) corrupt.push_back(key);
    }
    return corrupt;
}

std::size_t TranscriptStore::purge() {
    std::size_t n = 0;
    for (const std::string& key : keys()) {
        if (std::filesystem::remove(dir_ / (key + ".json"))) ++n;
    }
    return n;
}

// --- retry/caching client ---

ChatClient::ChatClient(std::shared_ptr<Provider> provider, ClientOptions options)
    : provider_(std::move(provider)), options_(std::move(options)) {
    if (options_.cache_dir) {
        store_.emplace(*options_.cache_dir, options_.warn);
    } else if (options_.mode != CacheMode::off) {
        throw ValidationError("cache mode requires a cache_dir");
    }
    if (options_.max_in_flight < 1) {
        throw ValidationError("max_in_flight must be >= 1");
    }
    rng_state_ = options_.jitter_seed ? options_.jitter_seed : 0x9e3779b97f4a7c15ULL;
}

namespace {

bool retryable(const std::exception& e) {
    if (dynamic_cast<const TransportError*>(&e)) return true;
    if (auto* h = dynamic_cast<const HttpStatusError*>(&e)) {
        return h->status() == 429 || h->status() >= 500;
    }
    return false;
}

}  // namespace

ChatResponse ChatClient::complete(const ChatRequest& req, int attempt) {
    std::string key = cache_key_for(req, attempt);
    if (store_ && options_.mode != CacheMode::off) {
        if (auto hit = store_->get(key)) {
            cache_hits_.fetch_add(1);
            return hit->response;
        }
        if (options_.mode == CacheMode::replay) {
            throw ReplayMissError("no recorded transcript for cache key " + key);
        }
    }
    if (!provider_) {
        throw ReplayMissError("no recorded transcript for cache key " + key +
                              " and no live provider configured");
    }
    return complete_live(req, attempt, key);
}

ChatResponse ChatClient::complete_live(const ChatRequest& req, int attempt,
                                       const std::string& cache_key) {
    const RetryPolicy& rp = options_.retry;
    double delay = double(rp.base_delay_ms);
    std::exception_ptr last_error;

    for (int try_no = 1; try_no <= rp.max_attempts; ++try_no) {
        try {
            ChatResponse resp;
            {
                std::unique_lock lock(gate_mutex_);
                gate_cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
                ++in_flight_;
                lock.unlock();

                auto t0 = std::chrono::steady_clock::now();
                try {
                    network_calls_.fetch_add(1);
                    resp = provider_->send(req);
                } catch (...) {
                    lock.lock();
                    --in_flight_;
                    gate_cv_.notify_one();
                    throw;
                }
                auto t1 = std::chrono::steady_clock::now();
                if (resp.latency_ms == 0) {
                    resp.latency_ms =
                        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
                }
                lock.lock();
                --in_flight_;
                gate_cv_.notify_one();
            }
            if (resp.text.empty() && resp.finish_reason == "stop") {
                resp.finish_reason = "empty";
            }
            if (store_) {
                Transcript t;
                t.request = req;
                t.response = resp;
                t.attempt = attempt;
                t.cache_key = cache_key;
                t.timestamp = utc_now_iso();
                store_->put(t);
            }
            return resp;
        } catch (const AuthError&) {
            throw;
        } catch (const MalformedPayloadError&) {
            throw;
        } catch (const std::exception& e) {
            if (!retryable(e)) throw;
            last_error = std::current_exception();
            if (try_no == rp.max_attempts) break;

            double jitter;
            {
                // splitmix64; seeded, so backoff schedules are reproducible
                std::lock_guard g(rng_mutex_);
                rng_state_ += 0x9e3779b97f4a7c15ULL;
                std::uint64_t z = rng_state_;
                z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
                z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
                z = z ^ (z >> 31);
                jitter = (double(z >> 11) / 9007199254740992.0) * 2.0 - 1.0;  // [-1, 1)
            }
            double sleep_ms = std::min(delay, double(rp.max_delay_ms));
            sleep_ms = std::max(0.0, sleep_ms * (1.0 + rp.jitter_frac * jitter));
            std::this_thread::sleep_for(
                std::chrono::milliseconds(std::int64_t(sleep_ms)));
            delay *= rp.multiplier;
        }
    }

    std::string reason = "unknown";
    try {
        if (last_error) std::rethrow_exception(last_error);
    } catch (const std::exception& e) {
        reason = e.what();
    }
    throw RetriesExhaustedError("request failed after " + std::to_string(rp.max_attempts) +
                                " attempts; last error: " + reason);
}

ChatClient make_replay_client(const std::filesystem::path& transcript_dir,
                              std::shared_ptr<Provider> fallback, ClientOptions options) {
    options.cache_dir = transcript_dir;
    options.mode = fallback ? CacheMode::replay_else_live : CacheMode::replay;
    return ChatClient(std::move(fallback), std::move(options));
}

}  // namespace did::provider

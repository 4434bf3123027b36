#include "embench/remote.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

using nlohmann::json;

namespace embench {

namespace {

// Splits "http://host:port/path" into (scheme://host:port, /path).
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    size_t scheme = endpoint.find("://");
    size_t path_start = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

httplib::Headers auth_headers(const std::optional<std::string>& api_key_env) {
    httplib::Headers headers;
    if (api_key_env && !api_key_env->empty()) {
        const char* token = std::getenv(api_key_env->c_str());
        if (token && *token) headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    return headers;
}

} // namespace

std::string build_embed_request(const std::string& adapter, const std::string& model,
                                const std::vector<std::string>& input) {
    // The generic and openai request shapes coincide.
    (void)adapter;
    json body;
    body["model"] = model;
    body["input"] = input;
    return body.dump();
}

std::vector<std::vector<float>> parse_embed_response(const std::string& adapter,
                                                     const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw BackendUnavailable(std::string("embedding response is not JSON: ") + e.what());
    }
    try {
        std::vector<std::vector<float>> rows;
        if (adapter == "openai") {
            for (const auto& item : doc.at("data"))
                rows.push_back(item.at("embedding").get<std::vector<float>>());
        } else {
            for (const auto& row : doc.at("embeddings"))
                rows.push_back(row.get<std::vector<float>>());
        }
        return rows;
    } catch (const json::exception& e) {
        throw BackendUnavailable(std::string("embedding response shape: ") + e.what());
    }
}

namespace {

class HttpEmbedTransport final : public Transport {
public:
    explicit HttpEmbedTransport(const BackendSpec& spec)
        : model_(spec.model_name), adapter_(spec.adapter), api_key_env_(spec.api_key_env) {
        std::tie(base_, path_) = split_endpoint(*spec.endpoint);
    }

    std::vector<std::vector<float>> embed_batch(
        const std::vector<std::string>& payloads) override {
        httplib::Client client(base_);
        client.set_connection_timeout(10);
        client.set_read_timeout(120);
        std::string body = build_embed_request(adapter_, model_, payloads);
        auto res = client.Post(path_, auth_headers(api_key_env_), body, "application/json");
        if (!res)
            throw BackendUnavailable("embedding service unreachable: " + base_);
        if (res->status != 200)
            throw BackendUnavailable("embedding service returned HTTP " +
                                     std::to_string(res->status));
        return parse_embed_response(adapter_, res->body);
    }

private:
    std::string base_, path_, model_, adapter_;
    std::optional<std::string> api_key_env_;
};

} // namespace

std::unique_ptr<Transport> make_remote_transport(const BackendSpec& spec) {
    return std::make_unique<HttpEmbedTransport>(spec);
}

std::string build_chat_request(const std::string& adapter, const std::string& model,
                               const std::vector<ChatMessage>& messages, double temperature) {
    (void)adapter;
    json body;
    body["model"] = model;
    body["messages"] = json::array();
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = temperature;
    return body.dump();
}

std::string parse_chat_response(const std::string& adapter, const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw BackendUnavailable(std::string("chat response is not JSON: ") + e.what());
    }
    try {
        if (adapter == "openai")
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        return doc.at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendUnavailable(std::string("chat response shape: ") + e.what());
    }
}

namespace {

class HttpChatBackend final : public ChatBackend {
public:
    explicit HttpChatBackend(ChatSpec spec) : spec_(std::move(spec)) {
        std::tie(base_, path_) = split_endpoint(spec_.endpoint);
    }

    std::string complete(const std::vector<ChatMessage>& messages, double temperature) override {
        std::string body = build_chat_request(spec_.adapter, spec_.model, messages, temperature);
        int attempt = 1;
        for (;;) {
            try {
                httplib::Client client(base_);
                client.set_connection_timeout(10);
                client.set_read_timeout(300);
                auto res = client.Post(path_, auth_headers(spec_.api_key_env), body,
                                       "application/json");
                if (!res) throw BackendUnavailable("chat service unreachable: " + base_);
                if (res->status != 200)
                    throw BackendUnavailable("chat service returned HTTP " +
                                             std::to_string(res->status));
                return parse_chat_response(spec_.adapter, res->body);
            } catch (const BackendUnavailable&) {
                if (attempt >= spec_.retry.max_attempts) throw;
                std::this_thread::sleep_for(std::chrono::milliseconds(
                    spec_.retry.base_backoff_ms * (1 << (attempt - 1))));
                ++attempt;
            }
        }
    }

private:
    ChatSpec spec_;
    std::string base_, path_;
};

} // namespace

std::unique_ptr<ChatBackend> make_http_chat_backend(const ChatSpec& spec) {
    return std::make_unique<HttpChatBackend>(spec);
}

} // namespace embench

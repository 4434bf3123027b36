#pragma once
// HTTP clients for remote embedding and chat-completion services. The wire
// contract is a minimal generic JSON schema; named adapters are pure payload
// transformations onto third-party provider schemas.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "embench/backend.hpp"

namespace embench {

// Generic embedding wire contract:
//   request  {"model": string, "input": [string...]}
//   response {"embeddings": [[number...]...]}  (outer length = input length)
// Adapter "openai" maps to {"data": [{"embedding": [...]}, ...]} responses.
std::string build_embed_request(const std::string& adapter, const std::string& model,
                                const std::vector<std::string>& input);
std::vector<std::vector<float>> parse_embed_response(const std::string& adapter,
                                                     const std::string& body);

std::unique_ptr<Transport> make_remote_transport(const BackendSpec& spec);

// Chat wire contract:
//   request  {"model", "messages": [{"role","content"}...], "temperature"}
//   response {"content": string}
// Adapter "openai" reads choices[0].message.content.
struct ChatMessage {
    std::string role;
    std::string content;
};
std::string build_chat_request(const std::string& adapter, const std::string& model,
                               const std::vector<ChatMessage>& messages, double temperature);
std::string parse_chat_response(const std::string& adapter, const std::string& body);

// A chat backend is any callable that turns messages into the reply text.
// Tests script it; production uses the HTTP client below.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages,
                                 double temperature) = 0;
};

struct ChatSpec {
    std::string endpoint;
    std::string model;
    std::string adapter = "generic";
    std::optional<std::string> api_key_env;
    RetryPolicy retry;
};

std::unique_ptr<ChatBackend> make_http_chat_backend(const ChatSpec& spec);

} // namespace embench

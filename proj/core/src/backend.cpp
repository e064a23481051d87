#include "pskit/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

// httplib pulls in OpenSSL only when asked; plain HTTP is enough for
// local/openai-compatible endpoints and keeps the build light.
#include <httplib.h>

namespace pskit {

namespace {

using nlohmann::json;

class HttpBackend : public LlmBackend {
public:
    explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
        if (const char* env = std::getenv("PSKIT_API_KEY"); env && *env) config_.api_key = env;
    }

    CompletionResult complete(const LlmRequest& request) override {
        json body{
            {"model", request.model},
            {"messages",
             json::array({json{{"role", "system"}, {"content", request.system_text}},
                          json{{"role", "user"}, {"content", request.user_text}}})},
            {"max_tokens", request.max_output_tokens},
            {"temperature", request.temperature},
        };

        httplib::Client client(config_.endpoint);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_connection_timeout(10, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        auto res = client.Post(config_.path, headers, body.dump(), "application/json");
        CompletionResult out;
        if (!res) {
            out.error = "transport failure: " + httplib::to_string(res.error());
            out.transport_error = true;
            return out;
        }
        if (res->status < 200 || res->status >= 300) {
            out.error = "backend returned HTTP " + std::to_string(res->status);
            out.transport_error = res->status >= 500 || res->status == 429;
            return out;
        }
        json payload = json::parse(res->body, nullptr, false);
        if (payload.is_discarded() || !payload.contains("choices") || payload["choices"].empty()) {
            out.error = "backend response is not a chat completion";
            out.transport_error = false;
            return out;
        }
        LlmResponse r;
        const json& choice = payload["choices"][0];
        r.text = choice.value("message", json::object()).value("content", "");
        r.finish_reason = choice.value("finish_reason", "");
        if (payload.contains("usage")) {
            r.prompt_tokens = payload["usage"].value("prompt_tokens", 0);
            r.completion_tokens = payload["usage"].value("completion_tokens", 0);
        }
        out.response = std::move(r);
        return out;
    }

    std::string name() const override { return "http"; }

private:
    HttpBackendConfig config_;
};

std::vector<std::string> load_session(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read session file: " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array())
        throw std::runtime_error("session file is not a JSON array of strings: " + path.string());
    std::vector<std::string> out;
    for (const auto& item : doc) out.push_back(item.get<std::string>());
    return out;
}

class CannedBackend : public LlmBackend {
public:
    CannedBackend(std::vector<std::string> responses, bool strict, std::string name)
        : responses_(std::move(responses)), strict_(strict), name_(std::move(name)) {}

    CompletionResult complete(const LlmRequest&) override {
        CompletionResult out;
        if (next_ >= responses_.size()) {
            if (strict_) {
                out.error = "replay session exhausted after " + std::to_string(next_) + " calls";
                out.transport_error = false;
                return out;
            }
            LlmResponse r;
            r.text = "I have no further suggestions.";
            r.finish_reason = "stop";
            out.response = std::move(r);
            return out;
        }
        LlmResponse r;
        r.text = responses_[next_++];
        r.finish_reason = "stop";
        out.response = std::move(r);
        return out;
    }

    std::string name() const override { return name_; }

private:
    std::vector<std::string> responses_;
    size_t next_ = 0;
    bool strict_;
    std::string name_;
};

}  // namespace

std::unique_ptr<LlmBackend> make_http_backend(HttpBackendConfig config) {
    return std::make_unique<HttpBackend>(std::move(config));
}

std::unique_ptr<LlmBackend> make_replay_backend(const std::filesystem::path& session_file) {
    return std::make_unique<CannedBackend>(load_session(session_file), /*strict=*/true, "replay");
}

std::unique_ptr<LlmBackend> make_scripted_backend(std::vector<std::string> responses) {
    return std::make_unique<CannedBackend>(std::move(responses), /*strict=*/false, "mock");
}

std::unique_ptr<LlmBackend> make_scripted_backend(const std::filesystem::path& session_file) {
    return std::make_unique<CannedBackend>(load_session(session_file), /*strict=*/false, "mock");
}

std::unique_ptr<LlmBackend> make_backend_from_spec(const std::string& spec,
                                                   const HttpBackendConfig& http_config,
                                                   std::string& error) {
    try {
        if (spec == "http") return make_http_backend(http_config);
        if (spec.rfind("replay:", 0) == 0) return make_replay_backend(spec.substr(7));
        if (spec.rfind("mock:", 0) == 0) return make_scripted_backend(std::filesystem::path(spec.substr(5)));
    } catch (const std::exception& e) {
        error = e.what();
        return nullptr;
    }
    error = "unknown backend spec '" + spec + "' (expected http, replay:FILE, or mock:FILE)";
    return nullptr;
}

void write_session_file(const std::filesystem::path& path, const std::vector<std::string>& responses) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : responses) doc.push_back(r);
    std::ofstream out(path, std::ios::binary);
    out << doc.dump(2) << '\n';
}

}  // namespace pskit

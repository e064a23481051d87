#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pskit {

struct LlmRequest {
    std::string system_text;
    std::string user_text;
    int max_output_tokens = 8192;
    double temperature = 1.0;
    std::string model;
};

struct LlmResponse {
    std::string text;  // raw model output; code extraction happens downstream
    std::string finish_reason;
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct CompletionResult {
    std::optional<LlmResponse> response;
    std::string error;
    bool transport_error = false;  // retryable

    bool ok() const { return response.has_value(); }
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual CompletionResult complete(const LlmRequest& request) = 0;
    virtual std::string name() const = 0;
};

/// OpenAI-compatible chat-completions client. The API key comes from the
/// config value unless the PSKIT_API_KEY environment variable is set; it is
/// never logged or persisted.
struct HttpBackendConfig {
    std::string endpoint = "http://localhost:8080";  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string api_key;
    int timeout_seconds = 240;
};
std::unique_ptr<LlmBackend> make_http_backend(HttpBackendConfig config);

/// Replays canned responses from a session file (JSON array of strings),
/// one per call, strictly: running out of responses is a transport error.
std::unique_ptr<LlmBackend> make_replay_backend(const std::filesystem::path& session_file);

/// Scripted backend for tests: same file format, but when the script runs
/// out it keeps returning a fixed prose string instead of failing.
std::unique_ptr<LlmBackend> make_scripted_backend(std::vector<std::string> responses);
std::unique_ptr<LlmBackend> make_scripted_backend(const std::filesystem::path& session_file);

/// Parses a CLI backend spec: "http", "replay:FILE", or "mock:FILE".
/// Returns nullptr with an explanation in `error` on bad specs.
std::unique_ptr<LlmBackend> make_backend_from_spec(const std::string& spec,
                                                   const HttpBackendConfig& http_config,
                                                   std::string& error);

/// Writes the canned-response session format used by replay backends.
void write_session_file(const std::filesystem::path& path, const std::vector<std::string>& responses);

}  // namespace pskit

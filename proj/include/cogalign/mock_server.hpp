#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cogalign/scale.hpp"

namespace cogalign {

/// Scriptable stand-in for a chat-completions endpoint. Speaks the same wire protocol as real
/// gateways: POST <prefix>/chat/completions with a JSON messages array.
class MockServer {
public:
    enum class Behavior {
        /// Answers the keyed option (MC) or the Likert minimum.
        EchoKey,
        /// Always answers `fixed_answer`.
        FixedAnswer,
        /// First `rate_limit_count` requests get HTTP 429, later ones behave like EchoKey.
        RateLimitThenSucceed,
        /// Free text that contains no option letter or integer.
        GarbageText,
    };

    struct Options {
        Behavior behavior = Behavior::EchoKey;
        std::string fixed_answer = "A";
        int rate_limit_count = 2;
        /// When non-empty, requests without "Authorization: Bearer <token>" get HTTP 401.
        std::string required_token;
    };

    MockServer(ScaleDefinition scale, Options options);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    /// Binds an ephemeral port on 127.0.0.1 and serves on a background thread.
    void start();
    /// Blocks serving on host:port until stop() is called from elsewhere.
    void listen(const std::string& host, int port);
    void stop();

    [[nodiscard]] int port() const;
    [[nodiscard]] std::string base_url() const;
    [[nodiscard]] std::size_t request_count() const;
    /// Bodies of every request received, in arrival order.
    [[nodiscard]] std::vector<std::string> request_bodies() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cogalign

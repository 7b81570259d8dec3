// SPDX-License-Identifier: Apache-2.0
#include "support/fixtures.hpp"
#include "turtlesoup/errors.hpp"
#include "turtlesoup/openai_backend.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

using namespace ts_test;

namespace {

// Local provider double. Replies with the queued statuses in order, then 200.
class MockProvider {
public:
    MockProvider() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mu_);
            bodies.push_back(json::parse(req.body));
            auth.push_back(req.get_header_value("Authorization"));
            if (!statuses.empty()) {
                res.status = statuses.front();
                statuses.erase(statuses.begin());
                res.set_content("{\"error\":\"x\"}", "application/json");
                return;
            }
            res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}}}.dump(),
                            "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockProvider() {
        server_.stop();
        thread_.join();
    }

    ProviderProfile profile(bool json_mode = true) const {
        return ProviderProfile{"mock", "http://127.0.0.1:" + std::to_string(port_) + "/v1/", "mock-model", "MOCK_KEY",
                               json_mode};
    }

    std::vector<int> statuses;
    std::string reply = "Yes";
    std::vector<json> bodies;
    std::vector<std::string> auth;

private:
    httplib::Server server_;
    std::thread thread_;
    std::mutex mu_;
    int port_ = 0;
};

EnvLookup with_key() {
    return [](const std::string& n) -> std::optional<std::string> {
        if (n == "MOCK_KEY") return "sk-test";
        return std::nullopt;
    };
}

ChatRequest req(ResponseFormat f = ResponseFormat::text) {
    return ChatRequest("t", {{MessageRole::system, "sys"}, {MessageRole::user, "Was the man short?"}}, f);
}

} // namespace

TEST(OpenAiBackend, PayloadPinsSampling) {
    const auto p = OpenAiBackend::build_payload(ProviderProfile{"x", "", "m", "K", true}, req(ResponseFormat::json));
    EXPECT_EQ(p["model"], "m");
    EXPECT_EQ(p["temperature"], 0.0);
    EXPECT_EQ(p["seed"], 42);
    EXPECT_FALSE(p.contains("top_p"));
    EXPECT_EQ(p["response_format"]["type"], "json_object");
    EXPECT_EQ(p["messages"][0], (json{{"role", "system"}, {"content", "sys"}}));
    EXPECT_EQ(p["messages"][1]["role"], "user");
}

TEST(OpenAiBackend, JsonModeOnlyWhenSupportedAndAsked) {
    EXPECT_FALSE(OpenAiBackend::build_payload(ProviderProfile{"x", "", "m", "K", false}, req(ResponseFormat::json))
                     .contains("response_format"));
    EXPECT_FALSE(OpenAiBackend::build_payload(ProviderProfile{"x", "", "m", "K", true}, req(ResponseFormat::text))
                     .contains("response_format"));
}

TEST(OpenAiBackend, MissingKeyFailsBeforeAnyRequest) {
    MockProvider mock;
    OpenAiBackend be(std::chrono::seconds{5}, [](const std::string&) { return std::nullopt; });
    EXPECT_THROW(be.send(mock.profile(), req()), AuthError);
    EXPECT_TRUE(mock.bodies.empty());
}

TEST(OpenAiBackend, SendsAndParses) {
    MockProvider mock;
    mock.reply = "No";
    OpenAiBackend be(std::chrono::seconds{5}, with_key());
    EXPECT_EQ(be.send(mock.profile(), req()), "No");
    ASSERT_EQ(mock.bodies.size(), 1u);
    EXPECT_EQ(mock.auth[0], "Bearer sk-test");
    EXPECT_EQ(mock.bodies[0]["seed"], 42);
}

TEST(OpenAiBackend, StatusMapping) {
    OpenAiBackend be(std::chrono::seconds{5}, with_key());
    for (auto [status, kind] : std::vector<std::pair<int, int>>{{401, 0}, {403, 0}, {429, 1}, {503, 1}, {400, 2}}) {
        MockProvider mock;
        mock.statuses = {status};
        try {
            be.send(mock.profile(), req());
            FAIL() << status;
        } catch (const AuthError&) {
            EXPECT_EQ(kind, 0) << status;
        } catch (const TransientError&) {
            EXPECT_EQ(kind, 1) << status;
        } catch (const ProviderError&) {
            EXPECT_EQ(kind, 2) << status;
        }
    }
}

TEST(OpenAiBackend, GatewayRetriesServerErrors) {
    MockProvider mock;
    mock.statuses = {500, 429};
    Gateway gw(std::make_shared<OpenAiBackend>(std::chrono::seconds{5}, with_key()), RetryPolicy{},
               [](std::chrono::milliseconds) {});
    EXPECT_EQ(gw.complete(mock.profile(), req()), "Yes");
    EXPECT_EQ(mock.bodies.size(), 3u);
    EXPECT_EQ(mock.bodies[0], mock.bodies[2]);
}

TEST(OpenAiBackend, UnreachableHostIsTransient) {
    OpenAiBackend be(std::chrono::seconds{1}, with_key());
    ProviderProfile p{"dead", "http://127.0.0.1:1/v1", "m", "MOCK_KEY", false};
    EXPECT_THROW(be.send(p, req()), TransientError);
}

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace turtlesoup {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

// Raised by load_corpus; carries the offending record index (or -1 for
// file-level failures) and the field name when one applies.
struct CorpusError : Error {
    CorpusError(std::string message, int record_index = -1, std::string field = {})
        : Error(std::move(message)), record_index(record_index), field(std::move(field)) {}
    int record_index;
    std::string field;
};

struct PromptError : Error {
    using Error::Error;
};

// Base for everything that comes out of the LLM gateway. Sessions treat these
// as hard failures.
struct GatewayError : Error {
    using Error::Error;
};

struct AuthError : GatewayError {
    using GatewayError::GatewayError;
};

// Retryable transport / 5xx / 429 failure. Only surfaces to callers wrapped
// in RetryExhausted.
struct TransientError : GatewayError {
    using GatewayError::GatewayError;
};

struct RetryExhausted : GatewayError {
    using GatewayError::GatewayError;
};

struct ProviderError : GatewayError {
    using GatewayError::GatewayError;
};

struct ScriptExhausted : GatewayError {
    using GatewayError::GatewayError;
};

struct JsonReplyError : Error {
    JsonReplyError(std::string message, std::string last_raw)
        : Error(std::move(message)), last_raw(std::move(last_raw)) {}
    std::string last_raw;
};

struct ParseError : Error {
    using Error::Error;
};

struct EvaluationError : Error {
    using Error::Error;
};

struct BudgetExhausted : Error {
    BudgetExhausted(std::string message, int n_max) : Error(std::move(message)), n_max(n_max) {}
    int n_max;
};

struct StateError : Error {
    using Error::Error;
};

} // namespace turtlesoup

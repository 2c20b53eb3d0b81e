#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "coopgov/agents.hpp"
#include "coopgov/prompt.hpp"

namespace coopgov {

/// Remote chat-completion endpoint settings.
struct LlmEndpointConfig {
    std::string base_url;      // e.g. http://localhost:8080
    std::string model;
    double temperature = 0.8;
    double timeout_seconds = 30.0;
    int max_retries = 3;       // attempts beyond the first
    int max_parallel = 4;      // in-flight request cap
    std::string api_key;       // optional bearer token
    std::string decision_log_path;  // optional JSON-lines attempt log

    void validate() const {
        if (temperature < 0) throw std::invalid_argument("temperature must be >= 0");
        if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
        if (max_parallel < 1) throw std::invalid_argument("max_parallel must be >= 1");
        if (base_url.empty()) throw std::invalid_argument("base_url must be set");
    }
};

/// One request attempt: what was sent, what came back, how it parsed.
struct DecisionRecord {
    std::string prompt;
    std::string completion;
    std::optional<Action> parsed;
    int attempt = 1;
    double latency_ms = 0.0;
    bool transport_error = false;
    std::string error;
};

/// Raised when every attempt at a decision failed; the caller aborts the
/// round rather than substituting a default action.
class DecisionError : public std::runtime_error {
public:
    DecisionError(const std::string& what, int attempts)
        : std::runtime_error(what), attempts_(attempts) {}

    int attempts() const { return attempts_; }

private:
    int attempts_;
};

/// Agent backed by a remote chat-completion endpoint. decide() renders the
/// prompt, posts it at the configured temperature, and parses the answer
/// marker; parse failures and transport errors are retried with the same
/// prompt up to max_retries times. Every attempt is appended to the
/// decision log. Concurrent decide() calls are allowed and at most
/// max_parallel requests are in flight at once.
class LlmSla : public AgentPolicy {
public:
    LlmSla(LlmEndpointConfig config, PromptTemplate tpl, PayoffMatrix matrix);
    ~LlmSla() override;

    /// The rng stream is unused; randomness comes from the endpoint.
    Action decide(const InformationView& view, RngStream& rng) const override;

    bool supports_parallel_decisions() const override { return true; }

    const LlmEndpointConfig& config() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot form: renders, requests, parses, retries per cfg.
Action llm_sla_decide(const LlmEndpointConfig& cfg, const PromptTemplate& tpl,
                      const InformationView& view, const PayoffMatrix& matrix);

}  // namespace coopgov

#include "coopgov/llm_client.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <semaphore>

#include <httplib.h>
#include <json.hpp>

namespace coopgov {

namespace {

nlohmann::json record_to_json(const DecisionRecord& rec) {
    nlohmann::json j;
    j["prompt"] = rec.prompt;
    j["completion"] = rec.completion;
    if (rec.parsed)
        j["parsed"] = to_string(*rec.parsed);
    else
        j["parsed"] = nullptr;
    j["attempt"] = rec.attempt;
    j["latency_ms"] = rec.latency_ms;
    j["transport_error"] = rec.transport_error;
    j["error"] = rec.error;
    return j;
}

}  // namespace

struct LlmSla::Impl {
    LlmEndpointConfig cfg;
    PromptTemplate tpl;
    PayoffMatrix matrix;
    mutable std::counting_semaphore<> slots;
    mutable std::mutex log_mutex;
    mutable std::ofstream log;

    static LlmEndpointConfig validated(LlmEndpointConfig c) {
        c.validate();
        return c;
    }

    Impl(LlmEndpointConfig c, PromptTemplate t, PayoffMatrix m)
        : cfg(validated(std::move(c))), tpl(std::move(t)), matrix(m), slots(cfg.max_parallel) {
        if (!cfg.decision_log_path.empty()) {
            log.open(cfg.decision_log_path, std::ios::app);
            if (!log)
                throw std::runtime_error("cannot open decision log '" + cfg.decision_log_path +
                                         "'");
        }
    }

    void append_record(const DecisionRecord& rec) const {
        if (!log.is_open()) return;
        std::lock_guard<std::mutex> guard(log_mutex);
        log << record_to_json(rec).dump() << '\n';
        log.flush();
    }

    /// One HTTP round trip. Fills completion/error fields of rec.
    void request_once(const std::string& prompt, DecisionRecord& rec) const {
        const auto started = std::chrono::steady_clock::now();

        httplib::Client client(cfg.base_url);
        const auto timeout_s = static_cast<time_t>(cfg.timeout_seconds);
        const auto timeout_us = static_cast<time_t>(
            std::lround((cfg.timeout_seconds - static_cast<double>(timeout_s)) * 1e6));
        client.set_connection_timeout(timeout_s, timeout_us);
        client.set_read_timeout(timeout_s, timeout_us);
        client.set_write_timeout(timeout_s, timeout_us);

        httplib::Headers headers;
        if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

        nlohmann::json body;
        body["model"] = cfg.model;
        body["temperature"] = cfg.temperature;
        body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});

        auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");

        const auto elapsed = std::chrono::steady_clock::now() - started;
        rec.latency_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();

        if (!res) {
            rec.transport_error = true;
            rec.error = "transport: " + httplib::to_string(res.error());
            return;
        }
        if (res->status != 200) {
            rec.transport_error = true;
            rec.error = "http status " + std::to_string(res->status);
            return;
        }
        try {
            auto doc = nlohmann::json::parse(res->body);
            rec.completion = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            rec.transport_error = true;
            rec.error = std::string("malformed response: ") + e.what();
            return;
        }
        rec.parsed = parse_decision(rec.completion);
        if (!rec.parsed) rec.error = "no answer marker in completion";
    }

    Action decide(const InformationView& view) const {
        const std::string prompt = render_prompt(tpl, view, matrix);
        const int max_attempts = cfg.max_retries + 1;
        for (int attempt = 1; attempt <= max_attempts; ++attempt) {
            DecisionRecord rec;
            rec.prompt = prompt;
            rec.attempt = attempt;

            slots.acquire();
            request_once(prompt, rec);
            slots.release();

            append_record(rec);
            if (rec.parsed) return *rec.parsed;
        }
        throw DecisionError("decision failed after " + std::to_string(max_attempts) +
                                " attempts against " + cfg.base_url,
                            max_attempts);
    }
};

LlmSla::LlmSla(LlmEndpointConfig config, PromptTemplate tpl, PayoffMatrix matrix)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(tpl), matrix)) {}

LlmSla::~LlmSla() = default;

Action LlmSla::decide(const InformationView& view, RngStream&) const {
    return impl_->decide(view);
}

const LlmEndpointConfig& LlmSla::config() const { return impl_->cfg; }

Action llm_sla_decide(const LlmEndpointConfig& cfg, const PromptTemplate& tpl,
                      const InformationView& view, const PayoffMatrix& matrix) {
    RngStream unused(0);
    return LlmSla(cfg, tpl, matrix).decide(view, unused);
}

}  // namespace coopgov

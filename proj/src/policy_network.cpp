#include "coopgov/policy_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace coopgov {

Mlp::Mlp(int inputs, int hidden, int outputs) : in_(inputs), hidden_(hidden), out_(outputs) {
    if (inputs < 1 || hidden < 1 || outputs < 1)
        throw std::invalid_argument("Mlp dimensions must be positive");
    params_.assign(static_cast<std::size_t>(hidden_) * (in_ + 1) +
                       static_cast<std::size_t>(out_) * (hidden_ + 1),
                   0.0);
}

void Mlp::set_params(std::vector<double> p) {
    if (p.size() != params_.size()) throw std::invalid_argument("parameter size mismatch");
    params_ = std::move(p);
}

void Mlp::init_uniform(RngStream& rng, double half_range) {
    for (int h = 0; h < hidden_; ++h)
        for (int i = 0; i < in_; ++i) params_[w1_at(h, i)] = rng.uniform(-half_range, half_range);
    for (int h = 0; h < hidden_; ++h) params_[b1_at(h)] = 0.0;
    for (int o = 0; o < out_; ++o)
        for (int h = 0; h < hidden_; ++h) params_[w2_at(o, h)] = rng.uniform(-half_range, half_range);
    for (int o = 0; o < out_; ++o) params_[b2_at(o)] = 0.0;
}

Mlp::Activations Mlp::forward(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != in_)
        throw std::invalid_argument("Mlp::forward input size mismatch");
    Activations acts;
    acts.hidden_pre.resize(static_cast<std::size_t>(hidden_));
    acts.hidden_act.resize(static_cast<std::size_t>(hidden_));
    acts.output.resize(static_cast<std::size_t>(out_));
    for (int h = 0; h < hidden_; ++h) {
        double z = params_[b1_at(h)];
        for (int i = 0; i < in_; ++i) z += params_[w1_at(h, i)] * input[static_cast<std::size_t>(i)];
        acts.hidden_pre[static_cast<std::size_t>(h)] = z;
        acts.hidden_act[static_cast<std::size_t>(h)] = z > 0.0 ? z : 0.0;
    }
    for (int o = 0; o < out_; ++o) {
        double z = params_[b2_at(o)];
        for (int h = 0; h < hidden_; ++h)
            z += params_[w2_at(o, h)] * acts.hidden_act[static_cast<std::size_t>(h)];
        acts.output[static_cast<std::size_t>(o)] = z;
    }
    return acts;
}

void Mlp::backward(std::span<const double> input, const Activations& acts,
                   std::span<const double> output_grad, std::vector<double>& grad) const {
    if (grad.size() != params_.size()) throw std::invalid_argument("gradient size mismatch");
    // Output layer.
    for (int o = 0; o < out_; ++o) {
        const double go = output_grad[static_cast<std::size_t>(o)];
        for (int h = 0; h < hidden_; ++h)
            grad[w2_at(o, h)] += go * acts.hidden_act[static_cast<std::size_t>(h)];
        grad[b2_at(o)] += go;
    }
    // Hidden layer through the rectifier.
    for (int h = 0; h < hidden_; ++h) {
        if (acts.hidden_pre[static_cast<std::size_t>(h)] <= 0.0) continue;
        double gh = 0.0;
        for (int o = 0; o < out_; ++o)
            gh += output_grad[static_cast<std::size_t>(o)] * params_[w2_at(o, h)];
        for (int i = 0; i < in_; ++i)
            grad[w1_at(h, i)] += gh * input[static_cast<std::size_t>(i)];
        grad[b1_at(h)] += gh;
    }
}

void Mlp::apply_gradient(const std::vector<double>& grad, double learning_rate) {
    if (grad.size() != params_.size()) throw std::invalid_argument("gradient size mismatch");
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= learning_rate * grad[i];
}

InfoTier tier_from_action_index(int index) {
    switch (index) {
        case 0: return InfoTier::LA;
        case 1: return InfoTier::LA_AR;
        case 2: return InfoTier::LA_NR;
        default: throw std::out_of_range("tier action index " + std::to_string(index));
    }
}

int action_index_from_tier(InfoTier tier) {
    switch (tier) {
        case InfoTier::LA: return 0;
        case InfoTier::LA_AR: return 1;
        case InfoTier::LA_NR: return 2;
        case InfoTier::NoInfo: break;
    }
    throw std::invalid_argument("NoInfo is not an actor action");
}

std::array<double, kTierActionCount> softmax(std::span<const double> logits) {
    if (logits.size() != kTierActionCount) throw std::invalid_argument("softmax arity mismatch");
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::array<double, kTierActionCount> probs{};
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::exp(logits[i] - peak);
        total += probs[i];
    }
    for (auto& p : probs) p /= total;
    return probs;
}

PolicyNetwork::PolicyNetwork(int hidden, std::uint64_t init_seed)
    : actor_(kObservationDim, hidden, kTierActionCount), critic_(kObservationDim, hidden, 1) {
    RngStream actor_rng(seed_chain(init_seed, kSeedTagInit, 0));
    RngStream critic_rng(seed_chain(init_seed, kSeedTagInit, 1));
    actor_.init_uniform(actor_rng);
    critic_.init_uniform(critic_rng);
}

PolicyNetwork PolicyNetwork::zeros(int hidden) {
    PolicyNetwork net(hidden, 0);
    net.actor_.set_params(std::vector<double>(net.actor_.param_count(), 0.0));
    net.critic_.set_params(std::vector<double>(net.critic_.param_count(), 0.0));
    return net;
}

std::array<double, kTierActionCount> PolicyNetwork::action_probabilities(
    std::span<const double> observation) const {
    return softmax(actor_.forward(observation).output);
}

double PolicyNetwork::value(std::span<const double> observation) const {
    return critic_.forward(observation).output[0];
}

void PolicyNetwork::save(const std::string& path, const std::string& config_hash) const {
    nlohmann::json doc;
    doc["version"] = 1;
    doc["config_hash"] = config_hash;
    doc["observation_dim"] = kObservationDim;
    doc["actions"] = kTierActionCount;
    doc["hidden"] = actor_.hidden();
    doc["actor"] = actor_.params();
    doc["critic"] = critic_.params();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out << doc.dump(2) << '\n';
}

PolicyNetwork PolicyNetwork::load(const std::string& path, std::string* config_hash) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("checkpoint '" + path + "' is not valid JSON: " + e.what());
    }
    if (doc.value("version", 0) != 1)
        throw std::runtime_error("unsupported checkpoint version in '" + path + "'");
    if (doc.value("observation_dim", 0) != kObservationDim ||
        doc.value("actions", 0) != kTierActionCount)
        throw std::runtime_error("checkpoint '" + path + "' has incompatible dimensions");

    PolicyNetwork net(doc.at("hidden").get<int>(), 0);
    net.actor_.set_params(doc.at("actor").get<std::vector<double>>());
    net.critic_.set_params(doc.at("critic").get<std::vector<double>>());
    if (config_hash) *config_hash = doc.value("config_hash", std::string());
    return net;
}

}  // namespace coopgov

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coopgov/ledger.hpp"
#include "coopgov/rng.hpp"

namespace coopgov {

/// One-hidden-layer perceptron with rectified-linear activation. Parameters
/// live in a single flat vector laid out [w1, b1, w2, b2] so gradients can
/// be expressed as an equally shaped flat vector; finite-difference checks
/// and SGD steps index the same layout.
class Mlp {
public:
    Mlp(int inputs, int hidden, int outputs);

    int inputs() const { return in_; }
    int hidden() const { return hidden_; }
    int outputs() const { return out_; }

    std::size_t param_count() const { return params_.size(); }
    double param(std::size_t i) const { return params_[i]; }
    void set_param(std::size_t i, double v) { params_[i] = v; }
    const std::vector<double>& params() const { return params_; }
    void set_params(std::vector<double> p);

    /// Weights uniform in [-half_range, half_range], biases zero.
    void init_uniform(RngStream& rng, double half_range = 0.08);

    struct Activations {
        std::vector<double> hidden_pre;
        std::vector<double> hidden_act;
        std::vector<double> output;
    };

    Activations forward(std::span<const double> input) const;

    /// Accumulates dLoss/dparams into grad (flat, param layout) given
    /// dLoss/doutput for the forward pass produced from `input`.
    void backward(std::span<const double> input, const Activations& acts,
                  std::span<const double> output_grad, std::vector<double>& grad) const;

    /// params -= lr * grad.
    void apply_gradient(const std::vector<double>& grad, double learning_rate);

private:
    int in_, hidden_, out_;
    std::vector<double> params_;

    std::size_t w1_at(int h, int i) const { return static_cast<std::size_t>(h) * in_ + i; }
    std::size_t b1_at(int h) const { return static_cast<std::size_t>(in_) * hidden_ + h; }
    std::size_t w2_at(int o, int h) const {
        return static_cast<std::size_t>(in_ + 1) * hidden_ + static_cast<std::size_t>(o) * hidden_ + h;
    }
    std::size_t b2_at(int o) const {
        return static_cast<std::size_t>(in_ + 1 + out_) * hidden_ + o;
    }
};

inline constexpr int kObservationDim = 4;
inline constexpr int kTierActionCount = 3;  // {LA, LA_AR, LA_NR}

/// Actor index <-> tier. NoInfo is not selectable by the actor; it is
/// forced at step 0 by the round loop.
InfoTier tier_from_action_index(int index);
int action_index_from_tier(InfoTier tier);

/// Softmax with max-subtraction; strictly positive entries for finite
/// logits, sums to 1 within 1e-9.
std::array<double, kTierActionCount> softmax(std::span<const double> logits);

/// Shared actor-critic parameter set: actor 4 -> hidden -> 3 logits,
/// critic 4 -> hidden -> scalar value. One network serves every agent.
class PolicyNetwork {
public:
    PolicyNetwork(int hidden, std::uint64_t init_seed);

    /// Zero-weight network (uniform policy, zero value); mostly for tests.
    static PolicyNetwork zeros(int hidden);

    const Mlp& actor() const { return actor_; }
    Mlp& actor() { return actor_; }
    const Mlp& critic() const { return critic_; }
    Mlp& critic() { return critic_; }

    std::array<double, kTierActionCount> action_probabilities(
        std::span<const double> observation) const;

    double value(std::span<const double> observation) const;

    /// Checkpoint I/O: versioned JSON with all weights and a config hash.
    void save(const std::string& path, const std::string& config_hash) const;

    /// Loads a checkpoint; the stored config hash lands in *config_hash
    /// when requested.
    static PolicyNetwork load(const std::string& path, std::string* config_hash = nullptr);

private:
    Mlp actor_;
    Mlp critic_;
};

}  // namespace coopgov

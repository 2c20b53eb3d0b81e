#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace coopgov {

enum class Action : unsigned char { Cooperate, Defect };

inline char to_char(Action a) { return a == Action::Cooperate ? 'C' : 'D'; }

inline std::string to_string(Action a) { return std::string(1, to_char(a)); }

inline Action action_from_char(char c) {
    if (c == 'C') return Action::Cooperate;
    if (c == 'D') return Action::Defect;
    throw std::invalid_argument("unknown action '" + std::string(1, c) + "'");
}

/// An interaction outcome seen from one player's side.
struct ActionPair {
    Action own;
    Action other;

    /// The same outcome from the co-player's side.
    ActionPair swapped() const { return {other, own}; }

    bool operator==(const ActionPair&) const = default;
};

inline std::string to_string(const ActionPair& p) {
    return std::string(1, to_char(p.own)) + "," + to_char(p.other);
}

/// 2x2 payoff structure. Construction enforces the dilemma ordering
/// T > R > P > S and 2R > T + S; anything else is rejected because the
/// governor's welfare/cooperation correlation rests on it.
class PayoffMatrix {
public:
    PayoffMatrix() = default;  // paper defaults T=5, R=3, P=1, S=0

    PayoffMatrix(int reward, int temptation, int punishment, int sucker)
        : reward_(reward), temptation_(temptation), punishment_(punishment), sucker_(sucker) {
        if (!(temptation_ > reward_ && reward_ > punishment_ && punishment_ > sucker_))
            throw std::invalid_argument("payoff matrix violates T > R > P > S");
        if (!(2 * reward_ > temptation_ + sucker_))
            throw std::invalid_argument("payoff matrix violates 2R > T + S");
    }

    int reward() const { return reward_; }
    int temptation() const { return temptation_; }
    int punishment() const { return punishment_; }
    int sucker() const { return sucker_; }

    bool operator==(const PayoffMatrix&) const = default;

private:
    int reward_ = 3;
    int temptation_ = 5;
    int punishment_ = 1;
    int sucker_ = 0;
};

/// Points for (own, other) in a single interaction.
inline std::pair<int, int> payoff(const ActionPair& pair, const PayoffMatrix& m) {
    const bool own_c = pair.own == Action::Cooperate;
    const bool other_c = pair.other == Action::Cooperate;
    if (own_c && other_c) return {m.reward(), m.reward()};
    if (own_c && !other_c) return {m.sucker(), m.temptation()};
    if (!own_c && other_c) return {m.temptation(), m.sucker()};
    return {m.punishment(), m.punishment()};
}

/// Sum of both players' points for the interaction.
inline int interaction_welfare(const ActionPair& pair, const PayoffMatrix& m) {
    auto [own, other] = payoff(pair, m);
    return own + other;
}

}  // namespace coopgov

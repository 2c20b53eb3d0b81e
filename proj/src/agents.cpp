#include "coopgov/agents.hpp"

namespace coopgov {

double TableSla::cooperation_probability(const InformationView& view) const {
    view.validate_shape();

    if (view.tier == InfoTier::NoInfo || !view.last_pair.has_value())
        return table_.first_move_p_c();

    const ActionPair& last = *view.last_pair;
    switch (view.tier) {
        case InfoTier::LA:
            return table_.la(last);
        case InfoTier::LA_NR:
            if (view.own_bucket && view.neighborhood_bucket)
                return table_.nr(last, *view.own_bucket, *view.neighborhood_bucket);
            return table_.la(last);  // ratio not yet observable
        case InfoTier::LA_AR:
            if (view.own_bucket && view.opponent_bucket)
                return table_.ar(last, *view.own_bucket, *view.opponent_bucket);
            return table_.la(last);
        case InfoTier::NoInfo:
            break;  // unreachable, handled above
    }
    throw std::logic_error("bad InfoTier in cooperation_probability");
}

}  // namespace coopgov

#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "coopgov/game.hpp"
#include "coopgov/ledger.hpp"

namespace coopgov {

class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Cooperation-probability lookup for the table-calibrated agent:
/// a first-move probability, a 4-entry last-action table, and two 36-entry
/// grids keyed by (last pair, own bucket, neighborhood/opponent bucket).
/// The shipped file's NR grid is nondecreasing along both bucket axes for
/// every action-pair row; loading verifies that.
class CalibrationTable {
public:
    double first_move_p_c() const { return first_move_; }

    double la(const ActionPair& pair) const { return la_[pair_index(pair)]; }

    double nr(const ActionPair& pair, CoopBucket own, CoopBucket neighborhood) const {
        return nr_[pair_index(pair)][bucket_index(own)][bucket_index(neighborhood)];
    }

    double ar(const ActionPair& pair, CoopBucket own, CoopBucket opponent) const {
        return ar_[pair_index(pair)][bucket_index(own)][bucket_index(opponent)];
    }

    /// Parses and validates the JSON text of a calibration file. Missing
    /// entries, out-of-range probabilities, NR monotonicity violations,
    /// and mislabeled axes all throw CalibrationError naming the cell.
    static CalibrationTable parse(const std::string& json_text);

    static std::size_t pair_index(const ActionPair& pair) {
        return (pair.own == Action::Defect ? 2u : 0u) + (pair.other == Action::Defect ? 1u : 0u);
    }

    static std::size_t bucket_index(CoopBucket b) { return static_cast<std::size_t>(b); }

    /// The four pairs in row order C,C / C,D / D,C / D,D.
    static const std::array<ActionPair, 4>& pair_rows();

private:
    CalibrationTable() = default;

    double first_move_ = 0.5;
    std::array<double, 4> la_{};
    std::array<std::array<std::array<double, 3>, 3>, 4> nr_{};
    std::array<std::array<std::array<double, 3>, 3>, 4> ar_{};
};

/// Reads and validates a calibration file from disk.
CalibrationTable load_calibration(const std::string& path);

}  // namespace coopgov

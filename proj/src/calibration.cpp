#include "coopgov/calibration.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace coopgov {

namespace {

const std::array<CoopBucket, 3> kBuckets = {CoopBucket::Rarely, CoopBucket::Sometimes,
                                            CoopBucket::Often};

std::string grid_key(const ActionPair& pair, CoopBucket own, CoopBucket inner) {
    return to_string(pair) + "|" + to_string(own) + "|" + to_string(inner);
}

double read_probability(const nlohmann::json& section, const std::string& key,
                        const std::string& section_name) {
    if (!section.contains(key))
        throw CalibrationError("calibration " + section_name + " is missing entry '" + key + "'");
    const auto& cell = section.at(key);
    if (!cell.is_number())
        throw CalibrationError("calibration " + section_name + " entry '" + key +
                               "' is not a number");
    const double p = cell.get<double>();
    if (!(p >= 0.0 && p <= 1.0))
        throw CalibrationError("calibration " + section_name + " entry '" + key + "' = " +
                               std::to_string(p) + " outside [0,1]");
    return p;
}

void check_axes(const nlohmann::json& doc, const std::string& table,
                const std::vector<std::string>& expected) {
    if (!doc.contains("axes")) return;  // axes metadata is optional
    const auto& axes = doc.at("axes");
    if (!axes.contains(table)) return;
    if (axes.at(table) != nlohmann::json(expected))
        throw CalibrationError("calibration axes for '" + table + "' do not match expected " +
                               nlohmann::json(expected).dump() + ", got " +
                               axes.at(table).dump());
}

}  // namespace

const std::array<ActionPair, 4>& CalibrationTable::pair_rows() {
    static const std::array<ActionPair, 4> rows = {
        ActionPair{Action::Cooperate, Action::Cooperate},
        ActionPair{Action::Cooperate, Action::Defect},
        ActionPair{Action::Defect, Action::Cooperate},
        ActionPair{Action::Defect, Action::Defect},
    };
    return rows;
}

CalibrationTable CalibrationTable::parse(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw CalibrationError(std::string("calibration file is not valid JSON: ") + e.what());
    }

    check_axes(doc, "nr", {"own_action,coplayer_action", "own_bucket", "neighborhood_bucket"});
    check_axes(doc, "ar", {"own_action,coplayer_action", "own_bucket", "opponent_bucket"});

    CalibrationTable table;

    if (!doc.contains("first_move_p_c"))
        throw CalibrationError("calibration is missing 'first_move_p_c'");
    table.first_move_ = doc.at("first_move_p_c").get<double>();
    if (!(table.first_move_ >= 0.0 && table.first_move_ <= 1.0))
        throw CalibrationError("calibration 'first_move_p_c' outside [0,1]");

    if (!doc.contains("la")) throw CalibrationError("calibration is missing 'la' table");
    for (const auto& pair : pair_rows())
        table.la_[pair_index(pair)] = read_probability(doc.at("la"), to_string(pair), "la");

    for (const char* name : {"nr", "ar"}) {
        if (!doc.contains(name))
            throw CalibrationError(std::string("calibration is missing '") + name + "' table");
        auto& grid = (std::string(name) == "nr") ? table.nr_ : table.ar_;
        for (const auto& pair : pair_rows())
            for (CoopBucket own : kBuckets)
                for (CoopBucket inner : kBuckets)
                    grid[pair_index(pair)][bucket_index(own)][bucket_index(inner)] =
                        read_probability(doc.at(name), grid_key(pair, own, inner), name);
    }

    // NR must be nondecreasing along both bucket axes within each pair row.
    for (const auto& pair : pair_rows()) {
        const auto& row = table.nr_[pair_index(pair)];
        for (std::size_t own = 0; own < 3; ++own)
            for (std::size_t inner = 1; inner < 3; ++inner)
                if (row[own][inner] < row[own][inner - 1])
                    throw CalibrationError(
                        "calibration nr not monotone along neighborhood axis at '" +
                        grid_key(pair, kBuckets[own], kBuckets[inner]) + "'");
        for (std::size_t inner = 0; inner < 3; ++inner)
            for (std::size_t own = 1; own < 3; ++own)
                if (row[own][inner] < row[own - 1][inner])
                    throw CalibrationError("calibration nr not monotone along own axis at '" +
                                           grid_key(pair, kBuckets[own], kBuckets[inner]) + "'");
    }

    return table;
}

CalibrationTable load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CalibrationError("cannot open calibration file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return CalibrationTable::parse(buf.str());
}

}  // namespace coopgov

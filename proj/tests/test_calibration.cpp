#include "coopgov/calibration.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace coopgov;

namespace {

constexpr Action C = Action::Cooperate;
constexpr Action D = Action::Defect;

std::string shipped_path() { return std::string(COOPGOV_DATA_DIR) + "/calibration.json"; }

std::string read_shipped() {
    std::ifstream in(shipped_path());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST(CalibrationTest, ShippedFileLoads) {
    const CalibrationTable table = load_calibration(shipped_path());
    EXPECT_DOUBLE_EQ(table.first_move_p_c(), 0.5);
    EXPECT_DOUBLE_EQ(table.la({C, C}), 1.0);
    EXPECT_DOUBLE_EQ(table.la({C, D}), 0.0);
    EXPECT_DOUBLE_EQ(table.la({D, C}), 0.0);
    EXPECT_DOUBLE_EQ(table.la({D, D}), 0.49);
}

TEST(CalibrationTest, ShippedNrSpotValues) {
    const CalibrationTable table = load_calibration(shipped_path());
    EXPECT_DOUBLE_EQ(table.nr({D, D}, CoopBucket::Sometimes, CoopBucket::Often), 0.98);
    EXPECT_DOUBLE_EQ(table.nr({D, D}, CoopBucket::Sometimes, CoopBucket::Sometimes), 0.289);
    EXPECT_DOUBLE_EQ(table.nr({C, C}, CoopBucket::Rarely, CoopBucket::Sometimes), 0.87);
    EXPECT_DOUBLE_EQ(table.nr({C, C}, CoopBucket::Rarely, CoopBucket::Often), 0.99);
    EXPECT_DOUBLE_EQ(table.nr({D, D}, CoopBucket::Often, CoopBucket::Sometimes), 0.579);
    EXPECT_DOUBLE_EQ(table.nr({D, C}, CoopBucket::Often, CoopBucket::Often), 0.98);
    EXPECT_DOUBLE_EQ(table.nr({C, D}, CoopBucket::Often, CoopBucket::Often), 0.03);
}

TEST(CalibrationTest, ShippedNrMonotoneAlongBothAxes) {
    const CalibrationTable table = load_calibration(shipped_path());
    const std::array<CoopBucket, 3> buckets = {CoopBucket::Rarely, CoopBucket::Sometimes,
                                               CoopBucket::Often};
    for (const auto& pair : CalibrationTable::pair_rows()) {
        for (std::size_t own = 0; own < 3; ++own)
            for (std::size_t inner = 1; inner < 3; ++inner)
                EXPECT_GE(table.nr(pair, buckets[own], buckets[inner]),
                          table.nr(pair, buckets[own], buckets[inner - 1]));
        for (std::size_t inner = 0; inner < 3; ++inner)
            for (std::size_t own = 1; own < 3; ++own)
                EXPECT_GE(table.nr(pair, buckets[own], buckets[inner]),
                          table.nr(pair, buckets[own - 1], buckets[inner]));
    }
}

TEST(CalibrationTest, DefaultArMirrorsNrGrid) {
    const CalibrationTable table = load_calibration(shipped_path());
    const std::array<CoopBucket, 3> buckets = {CoopBucket::Rarely, CoopBucket::Sometimes,
                                               CoopBucket::Often};
    for (const auto& pair : CalibrationTable::pair_rows())
        for (CoopBucket own : buckets)
            for (CoopBucket inner : buckets)
                EXPECT_DOUBLE_EQ(table.ar(pair, own, inner), table.nr(pair, own, inner));
}

TEST(CalibrationTest, OutOfRangeProbabilityRejected) {
    std::string text = read_shipped();
    const std::string needle = "\"C,C\": 1.0";
    const auto pos = text.find(needle);
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, needle.size(), "\"C,C\": 1.2");
    try {
        CalibrationTable::parse(text);
        FAIL() << "expected CalibrationError";
    } catch (const CalibrationError& e) {
        EXPECT_NE(std::string(e.what()).find("C,C"), std::string::npos);
    }
}

TEST(CalibrationTest, MissingCellRejectedWithName) {
    std::string text = read_shipped();
    const std::string needle = "\"D,D|Sometimes|Often\": 0.98,";
    auto pos = text.find(needle);
    ASSERT_NE(pos, std::string::npos);
    text.erase(pos, needle.size());
    try {
        CalibrationTable::parse(text);
        FAIL() << "expected CalibrationError";
    } catch (const CalibrationError& e) {
        EXPECT_NE(std::string(e.what()).find("D,D|Sometimes|Often"), std::string::npos);
    }
}

TEST(CalibrationTest, NonMonotoneNrRejectedWithCell) {
    std::string text = read_shipped();
    // Lower a high cell below its Rarely neighbor within the nr table.
    const std::string needle = "\"D,D|Sometimes|Often\": 0.98,";
    auto pos = text.find(needle);
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, needle.size(), "\"D,D|Sometimes|Often\": 0.01,");
    try {
        CalibrationTable::parse(text);
        FAIL() << "expected CalibrationError";
    } catch (const CalibrationError& e) {
        EXPECT_NE(std::string(e.what()).find("monotone"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("D,D"), std::string::npos);
    }
}

TEST(CalibrationTest, MislabeledAxesRejected) {
    std::string text = read_shipped();
    const std::string needle = "\"neighborhood_bucket\"";
    auto pos = text.find(needle);
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, needle.size(), "\"opponent_bucket\"");
    EXPECT_THROW(CalibrationTable::parse(text), CalibrationError);
}

TEST(CalibrationTest, MissingFileRejected) {
    EXPECT_THROW(load_calibration("/nonexistent/calibration.json"), CalibrationError);
}

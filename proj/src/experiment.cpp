#include "coopgov/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace coopgov {

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int precision) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

}  // namespace

MicrovalResult microval(const MicrovalScenario& scenario, const AgentPolicy& backend,
                        std::uint64_t seed) {
    if (scenario.trials < 1) throw std::invalid_argument("microval needs trials >= 1");
    scenario.view.validate_shape();

    MicrovalResult result;
    result.trials = scenario.trials;
    RngStream stream(seed_chain(seed, kSeedTagMicroval));
    int cooperations = 0;
    int decided = 0;
    for (int t = 0; t < scenario.trials; ++t) {
        try {
            const Action a = backend.decide(scenario.view, stream);
            ++decided;
            if (a == Action::Cooperate) ++cooperations;
        } catch (const std::exception&) {
            result.errors += 1;
        }
    }
    if (decided > 0) {
        result.frequency = static_cast<double>(cooperations) / static_cast<double>(decided);
        const double half_width =
            1.96 * std::sqrt(result.frequency * (1.0 - result.frequency) /
                             static_cast<double>(decided));
        result.ci_low = std::max(0.0, result.frequency - half_width);
        result.ci_high = std::min(1.0, result.frequency + half_width);
    }
    return result;
}

std::vector<CalibrationCell> calibration_grid(const CalibrationTable& table, int trials) {
    static const std::array<CoopBucket, 3> buckets = {CoopBucket::Rarely, CoopBucket::Sometimes,
                                                      CoopBucket::Often};
    std::vector<CalibrationCell> cells;

    {
        CalibrationCell cell;
        cell.scenario.label = "first_move";
        cell.scenario.view.tier = InfoTier::NoInfo;
        cell.scenario.trials = trials;
        cell.expected = table.first_move_p_c();
        cells.push_back(cell);
    }

    for (const auto& pair : CalibrationTable::pair_rows()) {
        CalibrationCell cell;
        cell.scenario.label = "la|" + to_string(pair);
        cell.scenario.view.tier = InfoTier::LA;
        cell.scenario.view.last_pair = pair;
        cell.scenario.trials = trials;
        cell.expected = table.la(pair);
        cells.push_back(cell);
    }

    for (const auto& pair : CalibrationTable::pair_rows())
        for (CoopBucket own : buckets)
            for (CoopBucket nbhd : buckets) {
                CalibrationCell cell;
                cell.scenario.label =
                    "nr|" + to_string(pair) + "|" + to_string(own) + "|" + to_string(nbhd);
                cell.scenario.view.tier = InfoTier::LA_NR;
                cell.scenario.view.last_pair = pair;
                cell.scenario.view.own_bucket = own;
                cell.scenario.view.neighborhood_bucket = nbhd;
                cell.scenario.trials = trials;
                cell.expected = table.nr(pair, own, nbhd);
                cells.push_back(cell);
            }
    return cells;
}

void write_microval_csv(const std::string& path, const std::vector<CalibrationCell>& cells,
                        const std::vector<MicrovalResult>& results) {
    if (cells.size() != results.size())
        throw std::invalid_argument("microval cells/results size mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "label,tier,expected,observed,ci_low,ci_high,trials,errors\n";
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& cell = cells[k];
        const auto& res = results[k];
        out << cell.scenario.label << ',' << to_string(cell.scenario.view.tier) << ','
            << format_double(cell.expected) << ',' << format_double(res.frequency) << ','
            << format_double(res.ci_low) << ',' << format_double(res.ci_high) << ',' << res.trials
            << ',' << res.errors << '\n';
    }
}

std::vector<SweepRow> sweep_baselines(const ScenarioConfig& cfg, const AgentPolicy& agents,
                                      const PolicyNetwork* governor) {
    std::vector<SweepRow> rows;

    if (governor) {
        GovernorTierSelector selector(*governor);
        auto res = run_experiment(cfg, agents, selector);
        rows.push_back({"RL", res.summary, std::move(res.rounds)});
    }
    for (InfoTier tier : {InfoTier::LA_NR, InfoTier::LA, InfoTier::LA_AR}) {
        StaticTierSelector selector(tier);
        auto res = run_experiment(cfg, agents, selector);
        rows.push_back({to_string(tier), res.summary, std::move(res.rounds)});
    }
    return rows;
}

void write_summary_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "scenario,avg_coop_mean,avg_coop_std,final_coop_mean,final_coop_std,"
           "avg_sw_mean,avg_sw_std,final_sw_mean,final_sw_std,valid_rounds,invalid_rounds\n";
    for (const auto& row : rows) {
        const auto& s = row.summary;
        out << row.name << ',' << format_double(s.avg_coop_mean) << ','
            << format_double(s.avg_coop_std) << ',' << format_double(s.final_coop_mean) << ','
            << format_double(s.final_coop_std) << ',' << format_double(s.avg_sw_mean) << ','
            << format_double(s.avg_sw_std) << ',' << format_double(s.final_sw_mean) << ','
            << format_double(s.final_sw_std) << ',' << s.valid_rounds << ',' << s.invalid_rounds
            << '\n';
    }
}

ReportSeries build_series(const std::vector<RoundLog>& rounds) {
    std::vector<const RoundLog*> valid;
    for (const auto& log : rounds)
        if (log.valid) valid.push_back(&log);
    if (valid.empty()) throw std::runtime_error("no valid rounds to report");

    const std::size_t steps = valid.front()->steps.size();
    for (const auto* log : valid)
        if (log->steps.size() != steps)
            throw std::runtime_error("rounds disagree on step count; cannot build series");

    ReportSeries series;
    const double n = static_cast<double>(valid.size());
    for (std::size_t t = 0; t < steps; ++t) {
        double coop_sum = 0.0, sw_sum = 0.0;
        std::array<double, 3> pair_sum{};
        for (const auto* log : valid) {
            coop_sum += log->steps[t].cooperation_rate;
            sw_sum += log->steps[t].normalized_welfare;
            for (std::size_t k = 0; k < 3; ++k) pair_sum[k] += log->steps[t].pair_shares[k];
        }
        const double coop_mean = coop_sum / n;
        const double sw_mean = sw_sum / n;
        std::array<double, 3> pair_mean{};
        for (std::size_t k = 0; k < 3; ++k) pair_mean[k] = pair_sum[k] / n;

        double coop_sq = 0.0, sw_sq = 0.0;
        std::array<double, 3> pair_sq{};
        for (const auto* log : valid) {
            const double dc = log->steps[t].cooperation_rate - coop_mean;
            const double dw = log->steps[t].normalized_welfare - sw_mean;
            coop_sq += dc * dc;
            sw_sq += dw * dw;
            for (std::size_t k = 0; k < 3; ++k) {
                const double dp = log->steps[t].pair_shares[k] - pair_mean[k];
                pair_sq[k] += dp * dp;
            }
        }
        const double denom = valid.size() > 1 ? static_cast<double>(valid.size() - 1) : 1.0;
        series.coop_mean.push_back(coop_mean);
        series.coop_std.push_back(std::sqrt(coop_sq / denom));
        series.welfare_mean.push_back(sw_mean);
        series.welfare_std.push_back(std::sqrt(sw_sq / denom));
        std::array<double, 3> pair_std{};
        for (std::size_t k = 0; k < 3; ++k) pair_std[k] = std::sqrt(pair_sq[k] / denom);
        series.pair_mean.push_back(pair_mean);
        series.pair_std.push_back(pair_std);
    }
    return series;
}

namespace {

/// Minimal deterministic SVG line chart: mean lines with translucent
/// standard-deviation bands, axes with tick labels.
class SvgChart {
public:
    SvgChart(std::string title, double y_min, double y_max, std::size_t steps)
        : title_(std::move(title)), y_min_(y_min), y_max_(y_max), steps_(steps) {}

    void add_series(const std::string& name, const std::string& color,
                    const std::vector<double>& mean, const std::vector<double>& std_dev) {
        series_.push_back({name, color, mean, std_dev});
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
            << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
        out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
        out << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">" << title_ << "</text>\n";

        // Axes.
        out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
            << kBottom << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
            << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
        for (int tick = 0; tick <= 4; ++tick) {
            const double frac = static_cast<double>(tick) / 4.0;
            const double y = kBottom - frac * (kBottom - kTop);
            const double value = y_min_ + frac * (y_max_ - y_min_);
            out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << format_fixed(y, 1) << "\" x2=\""
                << kLeft << "\" y2=\"" << format_fixed(y, 1) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << kLeft - 8 << "\" y=\"" << format_fixed(y + 4, 1)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
                << format_fixed(value, 2) << "</text>\n";
        }
        const std::size_t x_tick_every = steps_ > 10 ? steps_ / 5 : 1;
        for (std::size_t t = 0; t < steps_; t += x_tick_every) {
            const double x = x_at(t);
            out << "<line x1=\"" << format_fixed(x, 1) << "\" y1=\"" << kBottom << "\" x2=\""
                << format_fixed(x, 1) << "\" y2=\"" << kBottom + 4 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << format_fixed(x, 1) << "\" y=\"" << kBottom + 16
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << t
                << "</text>\n";
        }

        for (const auto& s : series_) {
            // Std band: polygon up the +std edge, back along the -std edge.
            out << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.15\" stroke=\"none\" "
                << "points=\"";
            for (std::size_t t = 0; t < steps_; ++t)
                out << format_fixed(x_at(t), 1) << ',' << format_fixed(y_at(s.mean[t] + s.std[t]), 1)
                    << ' ';
            for (std::size_t t = steps_; t-- > 0;)
                out << format_fixed(x_at(t), 1) << ',' << format_fixed(y_at(s.mean[t] - s.std[t]), 1)
                    << ' ';
            out << "\"/>\n";
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" "
                << "points=\"";
            for (std::size_t t = 0; t < steps_; ++t)
                out << format_fixed(x_at(t), 1) << ',' << format_fixed(y_at(s.mean[t]), 1) << ' ';
            out << "\"/>\n";
        }

        // Legend.
        double legend_y = kTop + 6;
        for (const auto& s : series_) {
            out << "<rect x=\"" << kRight - 130 << "\" y=\"" << format_fixed(legend_y - 8, 1)
                << "\" width=\"12\" height=\"4\" fill=\"" << s.color << "\"/>\n";
            out << "<text x=\"" << kRight - 112 << "\" y=\"" << format_fixed(legend_y - 2, 1)
                << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.name << "</text>\n";
            legend_y += 14;
        }
        out << "</svg>\n";
    }

private:
    struct Series {
        std::string name;
        std::string color;
        std::vector<double> mean;
        std::vector<double> std;
    };

    static constexpr int kWidth = 560, kHeight = 360;
    static constexpr int kLeft = 48, kRight = 540, kTop = 32, kBottom = 330;

    double x_at(std::size_t t) const {
        if (steps_ <= 1) return kLeft;
        return kLeft + (kRight - kLeft) * static_cast<double>(t) /
                           static_cast<double>(steps_ - 1);
    }

    double y_at(double value) const {
        double clamped = std::clamp(value, y_min_, y_max_);
        return kBottom - (kBottom - kTop) * (clamped - y_min_) / (y_max_ - y_min_);
    }

    std::string title_;
    double y_min_, y_max_;
    std::size_t steps_;
    std::vector<Series> series_;
};

void write_series_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << header << '\n';
    const std::size_t rows = columns.front().size();
    for (std::size_t t = 0; t < rows; ++t) {
        out << t;
        for (const auto& col : columns) out << ',' << format_double(col[t]);
        out << '\n';
    }
}

}  // namespace

void emit_report(const std::vector<RoundLog>& rounds, const std::string& out_dir) {
    const ReportSeries series = build_series(rounds);  // throws when nothing is valid
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/charts");

    write_series_csv(out_dir + "/series_cooperation.csv", "step,mean,std",
                     {series.coop_mean, series.coop_std});
    write_series_csv(out_dir + "/series_welfare.csv", "step,mean,std",
                     {series.welfare_mean, series.welfare_std});

    std::vector<double> cc_mean, cc_std, mixed_mean, mixed_std, dd_mean, dd_std;
    for (std::size_t t = 0; t < series.pair_mean.size(); ++t) {
        cc_mean.push_back(series.pair_mean[t][0]);
        cc_std.push_back(series.pair_std[t][0]);
        mixed_mean.push_back(series.pair_mean[t][1]);
        mixed_std.push_back(series.pair_std[t][1]);
        dd_mean.push_back(series.pair_mean[t][2]);
        dd_std.push_back(series.pair_std[t][2]);
    }
    write_series_csv(out_dir + "/series_pairs.csv",
                     "step,cc_mean,cc_std,cd_dc_mean,cd_dc_std,dd_mean,dd_std",
                     {cc_mean, cc_std, mixed_mean, mixed_std, dd_mean, dd_std});

    const std::size_t steps = series.coop_mean.size();
    SvgChart coop("Cooperation rate per step", 0.0, 1.0, steps);
    coop.add_series("cooperation", "#1f77b4", series.coop_mean, series.coop_std);
    coop.write(out_dir + "/charts/cooperation.svg");

    SvgChart welfare("Normalized social welfare per step", 2.0, 6.0, steps);
    welfare.add_series("welfare", "#2ca02c", series.welfare_mean, series.welfare_std);
    welfare.write(out_dir + "/charts/welfare.svg");

    SvgChart pairs("Action-pair shares per step", 0.0, 1.0, steps);
    pairs.add_series("CC", "#1f77b4", cc_mean, cc_std);
    pairs.add_series("CD+DC", "#ff7f0e", mixed_mean, mixed_std);
    pairs.add_series("DD", "#d62728", dd_mean, dd_std);
    pairs.write(out_dir + "/charts/pairs.svg");
}

}  // namespace coopgov

#include "coopgov/prompt.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace coopgov {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open template file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void replace_all(std::string& text, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
}

}  // namespace

PromptTemplate PromptTemplate::builtin() {
    PromptTemplate tpl;
    tpl.base_text =
        "You are taking part in a two-player game. In every interaction you and a co-player\n"
        "each choose one of two actions at the same time: C or D. Points are awarded per\n"
        "interaction as follows:\n"
        "- If you both choose C, each of you receives {reward} points.\n"
        "- If you choose C and the co-player chooses D, you receive {sucker} points and the "
        "co-player receives {temptation} points.\n"
        "- If you choose D and the co-player chooses C, you receive {temptation} points and the "
        "co-player receives {sucker} points.\n"
        "- If you both choose D, each of you receives {punishment} points.\n"
        "\n"
        "Your objective is to maximize your own total points. You may interact with the\n"
        "same co-player multiple times.\n"
        "{info_section}\n"
        "Think through the situation step by step and reason about which action best\n"
        "serves your objective. After your reasoning, give your choice on the final line\n"
        "in exactly this form: ANSWER: C or ANSWER: D\n";
    tpl.info_la =
        "In your most recent interaction with this co-player, you chose {your_action} and the "
        "co-player chose {coplayer_action}.\n";
    tpl.info_ar =
        "In your most recent interaction with this co-player, you chose {your_action} and the "
        "co-player chose {coplayer_action}.\n"
        "Across all of your previous interactions you have cooperated {your_ratio}, and this "
        "co-player has cooperated {coplayer_ratio}.\n";
    tpl.info_nr =
        "In your most recent interaction with this co-player, you chose {your_action} and the "
        "co-player chose {coplayer_action}.\n"
        "Across all of your previous interactions you have cooperated {your_ratio}, and your "
        "neighboring agents have cooperated {neighbor_ratio}.\n";
    tpl.no_prior_preamble =
        "Consider the proposed scenario and act as if you were taking part in it.\n";
    return tpl;
}

PromptTemplate PromptTemplate::load_dir(const std::string& dir) {
    PromptTemplate tpl;
    tpl.base_text = read_file(dir + "/base.txt");
    tpl.info_la = read_file(dir + "/info_la.txt");
    tpl.info_ar = read_file(dir + "/info_ar.txt");
    tpl.info_nr = read_file(dir + "/info_nr.txt");
    tpl.no_prior_preamble = read_file(dir + "/preamble.txt");
    return tpl;
}

std::string render_prompt(const PromptTemplate& tpl, const InformationView& view,
                          const PayoffMatrix& matrix) {
    view.validate_shape();

    std::string info;
    switch (view.tier) {
        case InfoTier::NoInfo: info = ""; break;
        case InfoTier::LA: info = tpl.info_la; break;
        case InfoTier::LA_AR: info = tpl.info_ar; break;
        case InfoTier::LA_NR: info = tpl.info_nr; break;
    }
    if (view.last_pair) {
        replace_all(info, "{your_action}", to_string(view.last_pair->own));
        replace_all(info, "{coplayer_action}", to_string(view.last_pair->other));
    }
    if (view.own_bucket) replace_all(info, "{your_ratio}", to_string(*view.own_bucket));
    if (view.opponent_bucket)
        replace_all(info, "{coplayer_ratio}", to_string(*view.opponent_bucket));
    if (view.neighborhood_bucket)
        replace_all(info, "{neighbor_ratio}", to_string(*view.neighborhood_bucket));

    std::string text = tpl.base_text;
    replace_all(text, "{info_section}", info);
    replace_all(text, "{reward}", std::to_string(matrix.reward()));
    replace_all(text, "{temptation}", std::to_string(matrix.temptation()));
    replace_all(text, "{punishment}", std::to_string(matrix.punishment()));
    replace_all(text, "{sucker}", std::to_string(matrix.sucker()));

    if (view.tier == InfoTier::NoInfo) text = tpl.no_prior_preamble + text;

    if (auto open = text.find('{'); open != std::string::npos) {
        auto close = text.find('}', open);
        throw RenderError("unresolved placeholder " +
                          text.substr(open, close == std::string::npos ? std::string::npos
                                                                       : close - open + 1));
    }
    return text;
}

std::optional<Action> parse_decision(const std::string& completion) {
    static const std::string marker = "answer";
    std::optional<Action> found;
    for (std::size_t pos = 0; pos + marker.size() < completion.size(); ++pos) {
        std::size_t k = 0;
        while (k < marker.size() &&
               std::tolower(static_cast<unsigned char>(completion[pos + k])) == marker[k])
            ++k;
        if (k != marker.size()) continue;
        std::size_t cursor = pos + marker.size();
        while (cursor < completion.size() && completion[cursor] == ' ') ++cursor;
        if (cursor >= completion.size() || completion[cursor] != ':') continue;
        ++cursor;
        while (cursor < completion.size() && completion[cursor] == ' ') ++cursor;
        if (cursor >= completion.size()) continue;
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(completion[cursor])));
        if (c != 'C' && c != 'D') continue;
        // Reject markers whose token keeps going ("ANSWER: Cautious").
        if (cursor + 1 < completion.size() &&
            std::isalnum(static_cast<unsigned char>(completion[cursor + 1])))
            continue;
        found = (c == 'C') ? Action::Cooperate : Action::Defect;
    }
    return found;
}

}  // namespace coopgov

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "coopgov/game.hpp"
#include "coopgov/ledger.hpp"

namespace coopgov {

class RenderError : public std::runtime_error {
public:
    explicit RenderError(const std::string& what) : std::runtime_error(what) {}
};

/// Prompt text with placeholders. The base text describes the payoffs and
/// objective and carries an {info_section} hole; the per-tier sections use
/// {your_action}, {coplayer_action}, {your_ratio}, {coplayer_ratio} and
/// {neighbor_ratio}. Ratios render as the words Rarely/Sometimes/Often.
struct PromptTemplate {
    std::string base_text;
    std::string info_la;
    std::string info_ar;
    std::string info_nr;
    std::string no_prior_preamble;

    /// The built-in wording; data/templates/ ships the same text.
    static PromptTemplate builtin();

    /// Loads base.txt, info_la.txt, info_ar.txt, info_nr.txt and
    /// preamble.txt from a directory.
    static PromptTemplate load_dir(const std::string& dir);
};

/// Renders the full prompt for a view. NoInfo views drop the info section
/// and prepend the no-prior-information preamble. A placeholder the view
/// cannot fill (e.g. a bucket that does not exist yet) is a RenderError.
std::string render_prompt(const PromptTemplate& tpl, const InformationView& view,
                          const PayoffMatrix& matrix);

/// Extracts the final answer from a completion: the last case-insensitive
/// occurrence of "ANSWER: C" or "ANSWER: D" wins. Absent or unreadable
/// markers yield nullopt; failure is a value, not an error.
std::optional<Action> parse_decision(const std::string& completion);

}  // namespace coopgov

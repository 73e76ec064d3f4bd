// SPDX-License-Identifier: Apache-2.0
#include "score/prompts.hpp"

#include "score/common.hpp"

namespace score {

std::string basic_prompt(const std::string& history_text,
                         const std::string& target_item_text) {
    if (history_text.empty()) throw DomainError("empty field: history_text");
    if (target_item_text.empty()) throw DomainError("empty field: target_item_text");
    return "The user has highly rated the following movies: " + history_text +
           ". Based on this information, predict whether the user would enjoy the movie "
           "titled " +
           target_item_text + ". Respond with either 'Yes' or 'No'.";
}

std::string ci_prompt(const std::string& history_text,
                      const std::vector<std::string>& behaviors,
                      const std::string& target_item_text) {
    if (behaviors.empty()) return basic_prompt(history_text, target_item_text);
    if (history_text.empty()) throw DomainError("empty field: history_text");
    if (target_item_text.empty()) throw DomainError("empty field: target_item_text");
    std::string joined;
    for (std::size_t i = 0; i < behaviors.size(); ++i) {
        if (behaviors[i].empty())
            throw DomainError("empty field: behavior " + std::to_string(i + 1));
        if (i) joined += ", ";
        joined += behaviors[i];
    }
    return "The user has highly rated the following movies: " + history_text +
           ". Other users with similar preferences have given high ratings to the movies: " +
           joined +
           ". Based on this information, predict whether the user would enjoy the movie "
           "titled " +
           target_item_text + ". Respond with either 'Yes' or 'No'.";
}

}  // namespace score

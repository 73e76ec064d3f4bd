// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace score {

/// Yes/No recommendation prompt without collaborative context.
std::string basic_prompt(const std::string& history_text,
                         const std::string& target_item_text);

/// Yes/No prompt carrying similar users' behaviors, in rerank order. An
/// empty behavior list degrades to basic_prompt exactly.
std::string ci_prompt(const std::string& history_text,
                      const std::vector<std::string>& behaviors,
                      const std::string& target_item_text);

}  // namespace score

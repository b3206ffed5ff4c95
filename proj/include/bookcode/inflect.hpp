#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bookcode {

/// Regular English inflections of a lemma, base form first, duplicates
/// removed: plural / third person, past, past participle, gerund, and
/// comparative / superlative for gradable adjectives. Closed-class words,
/// multi-word phrases and non-alphabetic strings yield only the base.
/// Over-generation is expected; nonsense forms are left for the language
/// model to reject.
std::vector<std::string> inflections(std::string_view base);

/// Inflection marker that distinguishes `form` from `lemma`: whatever
/// follows their longest common prefix ("be", "being" -> "ing").
std::string inflection_marker(std::string_view lemma, std::string_view form);

}  // namespace bookcode

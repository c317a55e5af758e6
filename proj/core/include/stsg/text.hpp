#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stsg {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Case-insensitive comparison of trimmed inputs.
bool iequals(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);

// Lowercased alphanumeric word tokens.
std::vector<std::string> tokenize_words(std::string_view s);

// |tokens(a) ∩ tokens(b)| / max(|tokens(a)|, |tokens(b)|); 0 when either is empty.
double token_overlap(std::string_view a, std::string_view b);

// Replaces UTF-8 curly quotes with ASCII ones so grammars only see " and '.
std::string normalize_quotes(std::string_view s);

// Strips surrounding quotes/backticks and a trailing period, then trims.
std::string strip_decorations(std::string_view s);

bool starts_with_ci(std::string_view text, std::string_view prefix);

// Formats seconds, trimming trailing zeros ("12", "1.5", "0.25").
std::string format_seconds(double seconds);

std::string json_escape(std::string_view s);

}  // namespace stsg

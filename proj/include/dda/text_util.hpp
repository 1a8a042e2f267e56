#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dda {

// Helpers shared by the tab-separated file formats (triple store, registry
// sidecar). Fields are backslash-escaped so keys containing tabs, newlines
// or backslashes survive a round trip.

std::string escapeField(std::string_view s);

/// Inverse of escapeField. Unknown escape sequences throw
/// std::invalid_argument.
std::string unescapeField(std::string_view s);

/// Splits on single tab characters; no unescaping.
std::vector<std::string_view> splitTabs(std::string_view line);

/// Seconds rendered at millisecond resolution ("1.234"), locale-independent.
std::string formatSeconds(double seconds);

} // namespace dda

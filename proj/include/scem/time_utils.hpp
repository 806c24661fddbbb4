#pragma once

#include <string>

namespace scem {

/// Parses "YYYY-MM-DDTHH:MM[:SS[.fff]][Z]" (UTC) to seconds since 1970-01-01.
double parse_iso8601(const std::string& text);

/// Formats UTC seconds as "YYYY-MM-DDTHH:MM:SSZ" (rounded to whole seconds).
std::string format_iso8601(double epoch_seconds);

/// Same as format_iso8601 but safe for file names ("2019-03-12T03-30-00Z").
std::string file_stamp(double epoch_seconds);

}  // namespace scem

#pragma once

#include <string>
#include <string_view>

#include "ccheis/group.hpp"

namespace ccheis {

/// Parses a group spec document. One `key = value` per line, `#` starts a
/// comment, values are JSON literals:
///
///     blocks = [[0.5, 2], [1, 2]]   # (a_j, k_j), a strictly increasing
///     m = 1
///     b = [0.1]                     # optional, zeros when absent
///     u = "standard-m1"             # optional, m = 1 only
///
/// Throws Error(ParseError) on malformed input and the GroupSpec::create
/// errors on invalid values.
GroupSpec parse_spec(std::string_view text);
GroupSpec load_spec(const std::string& path);

/// Parses "x1,x2|x3,x4;t1,t2": commas inside a block, `|` between blocks,
/// `;` before the t components. The number of blocks and their sizes must
/// match the spec.
GroupPoint parse_point(const GroupSpec& spec, std::string_view text);

/// Inverse of parse_point with round-trip precision.
std::string format_point(const GroupSpec& spec, const GroupPoint& g);

} // namespace ccheis

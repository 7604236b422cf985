#pragma once

// Textual label grammar shared by the CLI and the reports (1-based indices):
//
//   local  := "X[" outcome "|" measurement "]@" system  |  "U@" system
//   joint  := local { sep local }        sep := whitespace | "*" | "(x)"
//   list   := joint { ";" joint }
//
// Every system must appear exactly once in a joint label; the order of the
// components in the text does not matter.

#include <boxworld/system.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace boxworld {

std::string format_local(const LocalEffectLabel& label, int system);
std::string format_label(const JointEffectLabel& label);
std::string format_assignment(const Assignment& assignment);

/// Throws ParseError (column = 1-based offset in `text`, line 1).
JointEffectLabel parse_label(std::string_view text, int systems);
std::vector<JointEffectLabel> parse_label_list(std::string_view text, int systems);

}  // namespace boxworld

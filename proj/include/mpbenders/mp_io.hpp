#pragma once

#include <iosfwd>
#include <string>

#include "mpbenders/mplp.hpp"

namespace mpb {

inline constexpr int kMpFormatVersion = 1;

// Writes the solution as a versioned JSON document. Numbers carry 17
// significant digits so a reload is bit-exact.
void save_mp(const MpSolution& sol, std::ostream& out);
void save_mp_file(const MpSolution& sol, const std::string& path);

// Parses and validates a document written by save_mp. Throws FormatError
// naming the offending element.
MpSolution load_mp(std::istream& in);
MpSolution load_mp_file(const std::string& path);

}  // namespace mpb

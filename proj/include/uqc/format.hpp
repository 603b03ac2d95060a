// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

namespace uqc {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
void write_double(std::ostream& out, double v);

}  // namespace uqc

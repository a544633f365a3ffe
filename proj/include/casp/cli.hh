#ifndef CASP_CLI_HH
#define CASP_CLI_HH

#include <iosfwd>

//! @file casp/cli.hh
//! Command-line driver.

namespace Casp {

//! Exit status 0 on success (including UNSATISFIABLE), 2 on parse or
//! ground errors and 1 on internal errors.
auto run_cli(int argc, char const *const *argv, std::ostream &out, std::ostream &err) -> int;

} // namespace Casp

#endif

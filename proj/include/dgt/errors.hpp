#ifndef DGT_ERRORS_HPP
#define DGT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dgt {

// Exit-code taxonomy used by the CLI: 1 config, 2 numerical, 3 audit, 4 I/O.

struct ConfigError : std::runtime_error {
    int line = 0;
    explicit ConfigError(const std::string& msg, int line_no = 0)
        : std::runtime_error(line_no > 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
          line(line_no) {}
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PositivityError : NumericalError {
    using NumericalError::NumericalError;
};

struct SolverStagnation : NumericalError {
    using NumericalError::NumericalError;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dgt

#endif

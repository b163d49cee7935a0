#pragma once

#include <stdexcept>
#include <string>

namespace csgld {

// Invalid argument or state supplied by the caller (bad config values,
// non-finite inputs, mismatched dimensions).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A chain produced a non-finite coordinate. Carries the step index at which
// the divergence was detected.
struct divergence_error : std::runtime_error {
    long step;
    explicit divergence_error(long step_index)
        : std::runtime_error("chain diverged (non-finite state) at step " +
                             std::to_string(step_index)),
          step(step_index) {}
};

// Config file problem. line == 0 means the error is not tied to one line.
struct config_error : std::runtime_error {
    int line;
    config_error(const std::string& msg, int line_no = 0)
        : std::runtime_error(line_no > 0 ? "config line " + std::to_string(line_no) + ": " + msg
                                         : "config: " + msg),
          line(line_no) {}
};

}  // namespace csgld

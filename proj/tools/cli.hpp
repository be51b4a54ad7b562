#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "recurlab/experiments.hpp"

namespace recurlab::cli
{
enum class Verb
{
    Simulate,
    LimitLaw,
    AlmostSure,
    CheckA2,
    E2,
    Compare,
};

char const* to_string(Verb v);

namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int threshold_breach = 1;
inline constexpr int usage = 2;
inline constexpr int precision_abort = 3;
inline constexpr int missing_file = 66;
}  // namespace exit_code

struct Command
{
    Verb verb = Verb::Simulate;
    std::string config_path;  //!< empty: built-in defaults
    std::string output_dir = ".";
    std::vector<std::pair<std::string, std::string>> overrides;
    bool strict = false;
    //! Defaults, file, environment and overrides applied, validated.
    ExperimentConfig config;
};

//! Parsing stopped; \c code is the process exit status.
class UsageError : public std::runtime_error
{
  public:
    UsageError(int code, std::string const& message) : std::runtime_error(message), code_(code) {}

    int code() const noexcept { return code_; }

  private:
    int code_;
};

/*!
 * Build a validated Command from argv.
 *
 * Throws UsageError: code 2 for unknown verbs, bad flags or invalid config
 * values (the message names the key), 66 for a missing config file, and 0
 * after printing --help.
 */
Command parse_and_validate(int argc, char const* const* argv, std::ostream& out);

//! Run the command, write outputs, print the summary line; returns the exit code.
int execute(Command const& cmd, std::ostream& out, std::ostream& err);

//! parse_and_validate + execute with error reporting.
int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recurlab::cli

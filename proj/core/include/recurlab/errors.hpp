#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace recurlab
{
//! Argument outside the map's domain.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

//! Caller violated a documented precondition.
class ContractError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! Operation is not available for this map or density kind.
class UnsupportedError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

//! Iterative solver gave up before reaching its tolerance.
class ConvergenceError : public std::runtime_error
{
  public:
    ConvergenceError(std::string const& what, double residual, long iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations)
    {
    }

    double residual() const noexcept { return residual_; }
    long iterations() const noexcept { return iterations_; }

  private:
    double residual_;
    long iterations_;
};

/*!
 * The orbit's accumulated round-off estimate crossed the abort threshold.
 *
 * Thrown instead of silently continuing along a pseudo-orbit.
 */
class PrecisionAbort : public std::runtime_error
{
  public:
    PrecisionAbort(std::int64_t step, double error_estimate, double threshold);

    std::int64_t step() const noexcept { return step_; }
    double error_estimate() const noexcept { return error_estimate_; }
    double threshold() const noexcept { return threshold_; }

  private:
    std::int64_t step_;
    double error_estimate_;
    double threshold_;
};

//! Malformed or out-of-range configuration value; names the key path.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string key, std::string const& message)
        : std::runtime_error(key + ": " + message), key_(std::move(key))
    {
    }

    std::string const& key() const noexcept { return key_; }

  private:
    std::string key_;
};

//! A named input file does not exist.
class MissingFileError : public std::runtime_error
{
  public:
    explicit MissingFileError(std::string path)
        : std::runtime_error("no such file: " + path), path_(std::move(path))
    {
    }

    std::string const& path() const noexcept { return path_; }

  private:
    std::string path_;
};

}  // namespace recurlab

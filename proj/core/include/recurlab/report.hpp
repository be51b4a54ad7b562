#pragma once

#include <memory>
#include <string>

#include "config.hpp"
#include "experiments.hpp"
#include "limitlaw.hpp"

namespace recurlab
{
std::string version_string();
std::string git_revision();

//! tau,k,count,phat,ci_lo,ci_hi,G,method; overflow row has k = k_max + 1.
std::string pmf_csv(DistributionalResult const& result);
//! k_index,n_k,r_upper,s_lower,viol_upper_freq,viol_lower_freq,ci_lo,ci_hi (upper CI).
std::string as_csv(AlmostSureResult const& result);
//! j,r,mu_hat,ci_lo,ci_hi,oracle_if_any
std::string a2_csv(AssumptionReport const& report);
//! tau,k,G,method,est_error
std::string limitlaw_csv(LimitLawTable const& table);

void write_text_file(std::string const& path, std::string const& text);

/*!
 * report.json for one CLI run.
 *
 * Always carries the full configuration echo, version stamp and a "failed"
 * flag, so partial output from an aborted run is recognisable.
 */
class RunReport
{
  public:
    RunReport(std::string verb, ExperimentConfig const& cfg);
    ~RunReport();
    RunReport(RunReport&&) noexcept;
    RunReport& operator=(RunReport&&) noexcept;

    void add(DistributionalResult const& result);
    void add(AlmostSureResult const& result);
    void add(AssumptionReport const& report);
    void add(E2Result const& result);
    void add(LimitLawTable const& table);
    void add_tail(std::string const& label, TailFit const& fit);
    void add_summability(double gamma0, std::vector<SummabilityResult> const& results);
    void set_threshold_breach(std::string const& message);
    void set_failed(std::string const& message);

    bool failed() const noexcept;
    std::string dump() const;
    void write(std::string const& path) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace recurlab

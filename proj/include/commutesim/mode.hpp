#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "commutesim/core.hpp"
#include "commutesim/metrics.hpp"

namespace commutesim {

/// Template for mobility modes. The framework drives the five stages in a
/// fixed order through execute_mode: prepareMode, startMode, checkConstraints,
/// writeResults, writeAdditionalResults. writeResults is framework-provided;
/// modes usually only implement prepare/start and optionally extra outputs.
class MobilityMode {
public:
    MobilityMode(std::string name, const RunConfig& config, const Router& router)
        : name_(std::move(name)), config_(&config), router_(&router) {}
    virtual ~MobilityMode() = default;

    const std::string& name() const { return name_; }
    const ModeOutput& output() const { return output_; }
    const RunConfig& config() const { return *config_; }

    virtual void prepare_mode(const std::vector<Agent>& agents) = 0;
    virtual void start_mode() = 0;

    /// Defaults to the central referee over the emitted rides.
    virtual ConstraintReport check_constraints();

    /// Framework-implemented: computes the day summary and writes the three
    /// result files into out_dir/<mode name>/.
    virtual DaySummary write_results(const std::filesystem::path& out_dir, const DaySummary* baseline);

    virtual void write_additional_results(const std::filesystem::path& out_dir) { (void)out_dir; }

    /// Log base of the accepted-ride-time budget this mode promises its agents.
    virtual double budget_log_base() const = 0;

protected:
    std::string name_;
    const RunConfig* config_;
    const Router* router_;
    const std::vector<Agent>* agents_ = nullptr;
    ModeOutput output_;
};

struct ModeExecution {
    DaySummary summary;
    std::vector<std::string> stage_log;
    ConstraintReport report;
};

class ConstraintFailure : public std::runtime_error {
public:
    ConstraintFailure(const std::string& mode, ConstraintReport report);
    const ConstraintReport& report() const { return report_; }

private:
    ConstraintReport report_;
};

/// Runs the five-stage pipeline. Constraint violations abort before any file
/// is written (ConstraintFailure); other stage errors are rethrown with the
/// stage name attached.
ModeExecution execute_mode(MobilityMode& mode, const std::vector<Agent>& agents,
                           const std::filesystem::path& out_dir, const DaySummary* baseline);

}  // namespace commutesim

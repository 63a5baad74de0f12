#pragma once

#include "commutesim/mode.hpp"

namespace commutesim {

/// Baseline: every agent drives the own car, arriving exactly at T_A and
/// leaving campus exactly at T_D. Two solo rides per agent.
class EverybodyDrivesMode : public MobilityMode {
public:
    EverybodyDrivesMode(const RunConfig& config, const Router& router)
        : MobilityMode("everybodydrives", config, router) {}

    void prepare_mode(const std::vector<Agent>& agents) override { agents_ = &agents; }
    void start_mode() override;
    double budget_log_base() const override { return config_->ridesharing.log_base; }
};

}  // namespace commutesim

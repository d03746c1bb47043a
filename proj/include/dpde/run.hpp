#pragma once

#include "dpde/config.hpp"

#include <string>

namespace dpde {

// Exit codes for the CLI contract.
enum RunStatus : int {
    kRunOk = 0,
    kRunConfigError = 1,
    kRunBlowup = 2,
    kRunAuditFailed = 3,
};

// Executes one configured command, writing artifacts into out_dir.
// simulate  -> trajectory.csv, audit.json           (+ refine.json with dt_refine)
// synthesize-> kernel.json, synthesis_report.txt
// certify   -> certificate.json
// probe     -> probe.json
int run_config(RunConfig cfg, const std::string& out_dir);

} // namespace dpde

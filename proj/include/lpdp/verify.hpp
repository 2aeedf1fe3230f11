#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lpdp {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Instance counts for the property suites. The default scale meets the
// documented minimum counts; tiny is a fast smoke scale; the fault scale
// mis-signs the temperature inside the low-temperature bound as a negative
// control (that check must then fail).
struct VerifyScale {
    int band_instances = 600;
    int partition_bases = 100;  // each evaluated under all three rules
    int rank_candidate_sets = 10000;
    int recovery_instances = 300;
    int gap_instances = 150;
    int reduction_instances = 200;
    int dp_instances = 80;
    int invariance_instances = 60;
    bool fault_tau = false;
    std::uint64_t seed = 20250810;
};

VerifyScale scale_for_preset(const std::string& preset);  // tiny | default | fault

CheckResult check_band_truncation(const VerifyScale& s);
CheckResult check_path_partition_identity(const VerifyScale& s);
CheckResult check_low_temperature_limit(const VerifyScale& s);
CheckResult check_conservative_pruning_rank(const VerifyScale& s);
CheckResult check_pruning_recovery(const VerifyScale& s);
CheckResult check_soft_pruning_gap(const VerifyScale& s);
CheckResult check_one_step_reduction(const VerifyScale& s);
CheckResult check_full_dp_equivalence(const VerifyScale& s);
CheckResult check_reward_shift_invariance(const VerifyScale& s);
CheckResult check_rate_scale_invariance(const VerifyScale& s);

std::vector<CheckResult> run_verification(const std::string& preset);
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace lpdp

#pragma once

#include <string>
#include <vector>

#include "kinalign/image.hpp"
#include "kinalign/kinematics.hpp"

namespace kinalign {

/// Per-frame evaluation outcome, before and after alignment.
struct EvalRecord {
    int frame_id = 0;
    double dice_initial = 0.0;
    double dice_final = 0.0;
    double mae_initial_deg = 0.0;
    double mae_final_deg = 0.0;
    int iterations = 0;
    std::string domain = "regular";
};

/// 2|P∩G| / (|P|+|G|); 1.0 when both masks are empty.
/// Throws DimensionMismatch.
double dice(const MaskImage& pred, const MaskImage& gt);

/// Mean |Δangle| in degrees over the revolute joints. Prismatic joints are
/// excluded; report them with prismatic_mae_mm. Throws LengthMismatch.
double joint_mae(const JointConfig& a, const JointConfig& b,
                 const DHChain& chain);

/// Mean |Δd| in millimeters over the prismatic joints; 0 if there are none.
double prismatic_mae_mm(const JointConfig& a, const JointConfig& b,
                        const DHChain& chain);

struct MetricStat {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

struct DomainSummary {
    std::string domain;
    int frames = 0;
    MetricStat dice_initial;
    MetricStat dice_final;
    MetricStat mae_initial_deg;
    MetricStat mae_final_deg;
    MetricStat iterations;
};

struct Summary {
    std::vector<DomainSummary> domains;  // sorted by domain name

    std::string to_json() const;
    std::string to_table() const;  // aligned "mean ± std" text table
};

/// Per-domain mean ± population standard deviation. Throws EmptyList.
Summary aggregate(const std::vector<EvalRecord>& records);

/// One row per frame: frame_id, domain, dice/mae before and after, iterations.
std::string records_to_csv(const std::vector<EvalRecord>& records);

/// Inverse of records_to_csv. Throws ParseError on a malformed header or row.
std::vector<EvalRecord> records_from_csv(const std::string& csv);

}  // namespace kinalign

#pragma once

#include <string>
#include <vector>

#include "dhm/anthro.hpp"
#include "dhm/errors.hpp"
#include "dhm/fatigue.hpp"
#include "dhm/skeleton.hpp"
#include "dhm/statics.hpp"

namespace dhm {

// ---------------------------------------------------------------------------
// 3^4 factorial worker population: height x weight x strength x fatigue
// resistance, three levels each. Each subgroup gets its own static joint
// load (taller -> longer moment arm, heavier -> heavier arm segments), so
// the anthropometric factors act through the statics module.
// ---------------------------------------------------------------------------

enum class Level { low = 0, mid = 1, high = 2 };

inline const char* height_label(Level l) {
    switch (l) {
        case Level::low: return "Low";
        case Level::mid: return "Average";
        default: return "Tall";
    }
}
inline const char* weight_label(Level l) {
    switch (l) {
        case Level::low: return "Light";
        case Level::mid: return "Average";
        default: return "Heavy";
    }
}
inline const char* strength_label(Level l) {
    switch (l) {
        case Level::low: return "Weak";
        case Level::mid: return "Average";
        default: return "Strong";
    }
}
inline const char* resistance_label(Level l) {
    switch (l) {
        case Level::low: return "Small";
        case Level::mid: return "Average";
        default: return "Large";
    }
}

struct Subgroup {
    int id = 0;  // 1..81, lexicographic (height, weight, strength, resistance)
    Level height = Level::mid;
    Level weight = Level::mid;
    Level strength = Level::mid;
    Level resistance = Level::mid;
    SubjectProfile profile;
    double load_Nm = 0.0;  // analyzed-joint static demand for this subgroup
};

/// Expand the factor levels into 81 subject profiles and compute each
/// subgroup's static load at `analysis_joint` under the task posture and
/// external loads.
inline std::vector<Subgroup> build_subgroups(
    const PopulationSpec& spec, const Posture& posture, const std::vector<ExternalLoad>& loads,
    const std::string& analysis_joint = "shoulder_r_flexion",
    const std::vector<SegmentCoefficient>& coefficients = default_segment_coefficients(),
    const Eigen::Vector3d& gravity = kStandardGravity) {
    const PopulationLevels levels = expand_levels(spec);

    std::vector<Subgroup> out;
    out.reserve(81);
    int id = 1;
    for (int hi = 0; hi < 3; ++hi) {
        for (int wi = 0; wi < 3; ++wi) {
            const double height = levels.height[hi];
            const double weight = levels.weight[wi];
            const SegmentDimensions dims = scale_segments(height, weight, coefficients);
            const SkeletonModel model = build_default_skeleton(dims);
            const int joint = model.joint_id(analysis_joint);
            const JointLoadProfile profile =
                static_joint_loads(model, posture, dims, loads, gravity);
            const double load = profile.load_magnitude(joint);
            const std::string group = joint_group(analysis_joint);

            for (int si = 0; si < 3; ++si) {
                for (int mi = 0; mi < 3; ++mi) {
                    Subgroup g;
                    g.id = id++;
                    g.height = static_cast<Level>(hi);
                    g.weight = static_cast<Level>(wi);
                    g.strength = static_cast<Level>(si);
                    g.resistance = static_cast<Level>(mi);
                    g.profile.height_m = height;
                    g.profile.weight_kg = weight;
                    g.profile.joint_strengths = spec.base_strengths;
                    g.profile.joint_strengths[group] = levels.strength[si];
                    g.profile.resistance_min = levels.resistance[mi];
                    g.profile.recovery_per_min = spec.recovery_per_min;
                    g.profile.label = std::string(height_label(g.height)) + "/" +
                                      weight_label(g.weight) + "/" + strength_label(g.strength) +
                                      "/" + resistance_label(g.resistance);
                    g.load_Nm = load;
                    validate_profile(g.profile);
                    out.push_back(std::move(g));
                }
            }
        }
    }
    return out;
}

struct SweepRow {
    Subgroup subgroup;
    EnduranceResult result;
};

struct SweepGrid {
    std::vector<SweepRow> rows;
    double horizon_s = 0.0;
    std::string joint_group;
    double recovery_per_min = 0.0;
};

/// Run the endurance prediction for every subgroup. Work segments without an
/// explicit load take the subgroup's computed static load. Rows stay in
/// subgroup-id order.
inline SweepGrid sweep_endurance(const std::vector<Subgroup>& subgroups,
                                 const WorkRestSchedule& sched,
                                 const std::string& joint_grp = "shoulder",
                                 double sample_dt_s = 1.0) {
    SweepGrid grid;
    grid.horizon_s = sched.horizon_s();
    grid.joint_group = joint_grp;
    grid.rows.reserve(subgroups.size());
    for (const auto& g : subgroups) {
        FatigueParams params;
        params.gamma_max_Nm = strength_lookup(g.profile, joint_grp, 0.0);
        params.resistance_min = g.profile.resistance_min;
        params.recovery_per_min = g.profile.recovery_per_min;
        grid.recovery_per_min = g.profile.recovery_per_min;
        grid.rows.push_back({g, endurance_time(params, sched.with_load(g.load_Nm), sample_dt_s)});
    }
    return grid;
}

/// Subgroups able to sustain the task for `required_s`: endurance exceeds the
/// horizon or is at least the requirement.
inline std::vector<int> select_workers(const SweepGrid& grid, double required_s) {
    if (required_s > grid.horizon_s) {
        throw model_error("select_workers: required time " + std::to_string(required_s) +
                          " s exceeds the simulated horizon " + std::to_string(grid.horizon_s) +
                          " s; cannot certify beyond it");
    }
    std::vector<int> ids;
    for (const auto& row : grid.rows) {
        if (row.result.exceeded() || *row.result.endurance_s >= required_s) {
            ids.push_back(row.subgroup.id);
        }
    }
    return ids;
}

}  // namespace dhm

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dhm/errors.hpp"

namespace dhm {

// ---------------------------------------------------------------------------
// Body segment parameters
// ---------------------------------------------------------------------------

struct SegmentParams {
    double length_m = 0.0;
    double mass_kg = 0.0;
    double com_ratio = 0.0;  // COM distance from proximal end, fraction of length
};

/// Per-segment dimensions for one subject. Keys are segment names; bilateral
/// segments carry "_r"/"_l" suffixes (upper_arm_r, thigh_l, ...).
using SegmentDimensions = std::map<std::string, SegmentParams>;

struct SegmentCoefficient {
    std::string name;
    double length_per_height;  // segment length as fraction of stature
    double mass_per_weight;    // segment mass as fraction of body mass
    double com_ratio;
    bool bilateral;            // expands to _r/_l entries
};

/// Default body-segment-parameter table (classic stature/body-mass
/// proportions). Mass fractions sum to 1.0 counting bilateral entries twice.
/// The zero-mass entries are frame offsets consumed by the skeleton builder.
inline const std::vector<SegmentCoefficient>& default_segment_coefficients() {
    static const std::vector<SegmentCoefficient> table = {
        {"pelvis", 0.078, 0.142, 0.5, false},
        {"abdomen", 0.105, 0.139, 0.5, false},
        {"thorax", 0.105, 0.216, 0.5, false},
        {"head", 0.182, 0.081, 0.5, false},
        {"upper_arm", 0.186, 0.028, 0.436, true},
        {"forearm", 0.146, 0.016, 0.430, true},
        {"hand", 0.108, 0.006, 0.506, true},
        {"thigh", 0.245, 0.100, 0.433, true},
        {"shank", 0.246, 0.0465, 0.433, true},
        {"foot", 0.152, 0.0145, 0.5, true},
        {"neck_link", 0.033, 0.0, 0.0, false},
        {"shoulder_offset", 0.1295, 0.0, 0.0, false},
        {"hip_offset", 0.0478, 0.0, 0.0, false},
    };
    return table;
}

/// Scale segment lengths/masses from stature and body mass:
/// length_i = c_len_i * height, mass_i = c_mass_i * weight.
inline SegmentDimensions scale_segments(
    double height_m, double weight_kg,
    const std::vector<SegmentCoefficient>& coefficients = default_segment_coefficients()) {
    if (!(height_m > 0.0) || !(weight_kg > 0.0)) {
        throw model_error("scale_segments: height and weight must be positive");
    }
    SegmentDimensions dims;
    for (const auto& c : coefficients) {
        SegmentParams p{c.length_per_height * height_m, c.mass_per_weight * weight_kg,
                        c.com_ratio};
        if (c.bilateral) {
            p.mass_kg = c.mass_per_weight * weight_kg;
            dims[c.name + "_r"] = p;
            dims[c.name + "_l"] = p;
        } else {
            dims[c.name] = p;
        }
    }
    return dims;
}

inline const SegmentParams& segment_params(const SegmentDimensions& dims,
                                           const std::string& name) {
    auto it = dims.find(name);
    if (it == dims.end()) {
        throw model_error("unknown segment '" + name + "'");
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// Subject profile and joint strength
// ---------------------------------------------------------------------------

/// Optional posture-dependent strength: piecewise-linear in one joint angle,
/// clamped at the end breakpoints.
struct StrengthTable {
    std::vector<double> angle_rad;
    std::vector<double> strength_Nm;

    double interpolate(double angle) const {
        if (angle_rad.empty() || angle_rad.size() != strength_Nm.size()) {
            throw model_error("strength table is empty or ragged");
        }
        if (angle <= angle_rad.front()) return strength_Nm.front();
        if (angle >= angle_rad.back()) return strength_Nm.back();
        for (std::size_t i = 1; i < angle_rad.size(); ++i) {
            if (angle <= angle_rad[i]) {
                const double t = (angle - angle_rad[i - 1]) / (angle_rad[i] - angle_rad[i - 1]);
                return strength_Nm[i - 1] + t * (strength_Nm[i] - strength_Nm[i - 1]);
            }
        }
        return strength_Nm.back();
    }
};

/// One subject: anthropometry plus per-joint-group strength and the fatigue
/// characterization (resistance m in minutes, recovery rate R in 1/min).
struct SubjectProfile {
    double height_m = 0.0;
    double weight_kg = 0.0;
    std::map<std::string, double> joint_strengths;        // group -> Gamma_max [N*m]
    std::map<std::string, StrengthTable> strength_tables;  // optional, per group
    double resistance_min = 0.0;   // m = 1/k
    double recovery_per_min = 0.0;  // R
    std::string label;
};

inline void validate_profile(const SubjectProfile& p) {
    if (!(p.height_m > 0.0) || !(p.weight_kg > 0.0)) {
        throw model_error("profile '" + p.label + "': height and weight must be positive");
    }
    if (!(p.resistance_min > 0.0)) {
        throw model_error("profile '" + p.label + "': fatigue resistance m must be positive");
    }
    if (p.recovery_per_min < 0.0) {
        throw model_error("profile '" + p.label + "': recovery rate must be >= 0");
    }
    for (const auto& [group, s] : p.joint_strengths) {
        if (!(s > 0.0)) {
            throw model_error("profile '" + p.label + "': strength for '" + group +
                              "' must be positive");
        }
    }
}

/// Joint-group key for a joint name: the leading token ("shoulder_r_flexion"
/// -> "shoulder").
inline std::string joint_group(const std::string& joint_name) {
    const auto pos = joint_name.find('_');
    return pos == std::string::npos ? joint_name : joint_name.substr(0, pos);
}

/// Gamma_max for a joint group, interpolating the group's strength table at
/// the given angle when one is configured, otherwise the scalar value.
inline double strength_lookup(const SubjectProfile& profile, const std::string& group,
                              double angle_rad) {
    if (auto it = profile.strength_tables.find(group); it != profile.strength_tables.end()) {
        return it->second.interpolate(angle_rad);
    }
    auto it = profile.joint_strengths.find(group);
    if (it == profile.joint_strengths.end()) {
        throw model_error("no strength configured for joint group '" + group + "'");
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// Population factors
// ---------------------------------------------------------------------------

enum class LevelScheme {
    two_sigma,  // levels {mean - 2sd, mean, mean + 2sd}
    one_sigma,  // levels {mean - sd, mean, mean + sd}
};

struct FactorSpec {
    double mean = 0.0;
    double sd = 0.0;
    LevelScheme scheme = LevelScheme::two_sigma;
};

struct LevelTriple {
    double low = 0.0, mid = 0.0, high = 0.0;
    double operator[](int i) const { return i == 0 ? low : (i == 1 ? mid : high); }
};

/// Three-level factorial population over height, weight, strength and fatigue
/// resistance. Strength applies to `strength_joint_group`; the remaining
/// groups take `base_strengths` unchanged.
struct PopulationSpec {
    FactorSpec height{1.75, 0.05, LevelScheme::two_sigma};       // m
    FactorSpec weight{70.0, 8.0, LevelScheme::two_sigma};        // kg
    FactorSpec strength{0.0, 0.0, LevelScheme::two_sigma};       // N*m
    FactorSpec resistance{0.7562, 0.4347, LevelScheme::one_sigma};  // min
    double recovery_per_min = 0.0;
    std::string strength_joint_group = "shoulder";
    std::map<std::string, double> base_strengths;
};

/// Fatigue-resistance statistics regressed from endurance-time models.
inline FactorSpec theoretical_resistance_stats() {
    return {0.7562, 0.4347, LevelScheme::one_sigma};
}

/// Fatigue-resistance statistics measured on industrial workers.
inline FactorSpec measured_worker_resistance_stats() {
    return {1.32, 0.62, LevelScheme::one_sigma};
}

inline LevelTriple expand_levels(const FactorSpec& factor, const std::string& factor_name) {
    const double step = factor.scheme == LevelScheme::two_sigma ? 2.0 * factor.sd : factor.sd;
    LevelTriple t{factor.mean - step, factor.mean, factor.mean + step};
    if (factor.sd < 0.0) {
        throw model_error("factor '" + factor_name + "': negative standard deviation");
    }
    if (!(t.low > 0.0)) {
        throw model_error("factor '" + factor_name + "': degenerate level " +
                          std::to_string(t.low) + " (must stay positive)");
    }
    return t;
}

struct PopulationLevels {
    LevelTriple height, weight, strength, resistance;
};

inline PopulationLevels expand_levels(const PopulationSpec& spec) {
    return {expand_levels(spec.height, "height"), expand_levels(spec.weight, "weight"),
            expand_levels(spec.strength, "strength"),
            expand_levels(spec.resistance, "fatigue_resistance")};
}

}  // namespace dhm

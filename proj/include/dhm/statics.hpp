#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "dhm/errors.hpp"
#include "dhm/skeleton.hpp"

namespace dhm {

// ---------------------------------------------------------------------------
// Quasi-static joint loads: velocities and accelerations are zero, so the
// moment a joint must exert equals the cross-product sum of every distal
// weight and external force about the joint origin.
// ---------------------------------------------------------------------------

inline const Eigen::Vector3d kStandardGravity{0.0, 0.0, -9.81};  // m/s^2

/// A point force applied to a segment. `offset_m` is expressed in the
/// segment frame (origin at the proximal end).
struct ExternalLoad {
    std::string segment;
    Eigen::Vector3d offset_m = Eigen::Vector3d::Zero();
    Eigen::Vector3d force_N = Eigen::Vector3d::Zero();
    std::string label;
};

struct JointLoadProfile {
    std::vector<double> axis_moment_Nm;        // [id] = moment about the joint axis (signed)
    std::vector<Eigen::Vector3d> moment_Nm;    // [id] = full moment vector, world frame
    std::vector<Eigen::Vector3d> force_N;      // [id] = net distal force, world frame
    Posture posture;

    double axis_moment(int joint_id) const {
        return axis_moment_Nm.at(static_cast<std::size_t>(joint_id));
    }
    /// Demand magnitude fed to the fatigue model.
    double load_magnitude(int joint_id) const { return std::abs(axis_moment(joint_id)); }
};

/// Backward recursion leaf-to-root over the joint tree. Forces: segment
/// weights at their COMs plus external loads at their attachment points.
inline JointLoadProfile static_joint_loads(const SkeletonModel& model, const Posture& posture,
                                           const SegmentDimensions& dims,
                                           const std::vector<ExternalLoad>& loads,
                                           const Eigen::Vector3d& gravity = kStandardGravity) {
    const SegmentFrames frames = forward_kinematics(model, posture);
    const int n = model.joint_count();

    struct PointForce {
        Eigen::Vector3d point;
        Eigen::Vector3d force;
    };
    std::vector<std::vector<PointForce>> local(static_cast<std::size_t>(n) + 1);

    for (const auto& s : model.segments) {
        const auto& p = segment_params(dims, s.name);
        if (p.mass_kg == 0.0) continue;
        local[static_cast<std::size_t>(s.joint)].push_back(
            {frames.segments.at(s.name).com_world, p.mass_kg * gravity});
    }
    for (const auto& l : loads) {
        if (!l.force_N.allFinite()) {
            throw model_error("load '" + l.label + "': non-finite force");
        }
        if (!model.has_segment(l.segment)) {
            throw model_error("load '" + l.label + "': attached to unknown segment '" +
                              l.segment + "'");
        }
        const auto& att = model.segment(l.segment);
        const Eigen::Vector3d point =
            frames.segments.at(l.segment).world_from_segment * l.offset_m;
        local[static_cast<std::size_t>(att.joint)].push_back({point, l.force_N});
    }

    JointLoadProfile out;
    out.posture = posture;
    out.axis_moment_Nm.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.moment_Nm.assign(static_cast<std::size_t>(n) + 1, Eigen::Vector3d::Zero());
    out.force_N.assign(static_cast<std::size_t>(n) + 1, Eigen::Vector3d::Zero());

    // children accumulate into parents; joints are topologically ordered
    for (int id = n; id >= 1; --id) {
        const auto idx = static_cast<std::size_t>(id);
        const Eigen::Vector3d origin = frames.joint_origin(id);
        Eigen::Vector3d force = Eigen::Vector3d::Zero();
        Eigen::Vector3d moment = Eigen::Vector3d::Zero();
        for (const auto& pf : local[idx]) {
            force += pf.force;
            moment += (pf.point - origin).cross(pf.force);
        }
        out.force_N[idx] += force;
        out.moment_Nm[idx] += moment;

        const int parent = model.joint(id).parent;
        if (parent >= 1) {
            const auto pidx = static_cast<std::size_t>(parent);
            const Eigen::Vector3d parent_origin = frames.joint_origin(parent);
            out.force_N[pidx] += out.force_N[idx];
            out.moment_Nm[pidx] +=
                out.moment_Nm[idx] + (origin - parent_origin).cross(out.force_N[idx]);
        }
    }
    for (int id = 1; id <= n; ++id) {
        const auto idx = static_cast<std::size_t>(id);
        out.axis_moment_Nm[idx] = out.moment_Nm[idx].dot(frames.joint_axis_world[idx]);
    }
    return out;
}

/// |axis moment| / Gamma_max, the dimensionless demand ratio of Eq.-style
/// fatigue inputs.
inline double load_ratio(const JointLoadProfile& profile, int joint_id, double gamma_max_Nm) {
    if (!(gamma_max_Nm > 0.0)) {
        throw model_error("load_ratio: Gamma_max must be positive");
    }
    return profile.load_magnitude(joint_id) / gamma_max_Nm;
}

}  // namespace dhm

#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dhm/anthro.hpp"
#include "dhm/errors.hpp"

namespace dhm {

// ---------------------------------------------------------------------------
// Kinematic model (modified Denavit-Hartenberg, tree-structured)
//
// Each joint stores the transform from its parent frame:
//     T = Rot_x(alpha) * Trans_x(a) * Rot_z(theta_offset + q) * Trans_z(d)
// The joint rotation axis is the local z axis of the resulting frame. Joint 0
// is the pelvis root; its world pose is SkeletonModel::root_frame.
// ---------------------------------------------------------------------------

struct JointSpec {
    int id = 0;        // 1..n, topologically ordered (parent < id)
    std::string name;
    int parent = 0;    // 0 means the pelvis root
    double a_m = 0.0;
    double alpha_rad = 0.0;
    double d_m = 0.0;
    double theta_offset_rad = 0.0;
    double q_lower_rad = 0.0;
    double q_upper_rad = 0.0;
};

/// A rigid segment fixed to a joint frame. The segment runs from
/// `local_origin` along `local_axis` for `length_m`; its COM sits at
/// com_ratio * length from the proximal end. Mass comes from
/// SegmentDimensions at analysis time.
struct SegmentAttachment {
    std::string name;
    int joint = 0;
    Eigen::Vector3d local_origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d local_axis = Eigen::Vector3d::UnitX();
    double length_m = 0.0;
    double com_ratio = 0.5;
};

struct SkeletonModel {
    std::vector<JointSpec> joints;           // index i holds joint id i+1
    std::vector<SegmentAttachment> segments;
    Eigen::Isometry3d root_frame = Eigen::Isometry3d::Identity();

    int joint_count() const { return static_cast<int>(joints.size()); }

    const JointSpec& joint(int id) const { return joints.at(static_cast<std::size_t>(id - 1)); }

    int joint_id(const std::string& name) const {
        for (const auto& j : joints) {
            if (j.name == name) return j.id;
        }
        throw model_error("unknown joint '" + name + "'");
    }

    const SegmentAttachment& segment(const std::string& name) const {
        for (const auto& s : segments) {
            if (s.name == name) return s;
        }
        throw model_error("unknown segment '" + name + "'");
    }

    bool has_segment(const std::string& name) const {
        for (const auto& s : segments) {
            if (s.name == name) return true;
        }
        return false;
    }
};

/// Structural invariants: sequential ids, topological parent order, ordered
/// joint limits, segments attached to existing joints.
inline void validate(const SkeletonModel& model) {
    for (std::size_t i = 0; i < model.joints.size(); ++i) {
        const auto& j = model.joints[i];
        if (j.id != static_cast<int>(i) + 1) {
            throw model_error("joint ids must be sequential starting at 1");
        }
        if (j.parent < 0 || j.parent >= j.id) {
            throw model_error("joint '" + j.name + "': parent must precede the joint");
        }
        if (j.q_lower_rad > j.q_upper_rad) {
            throw model_error("joint '" + j.name + "': lower limit exceeds upper limit");
        }
    }
    for (const auto& s : model.segments) {
        if (s.joint < 0 || s.joint > model.joint_count()) {
            throw model_error("segment '" + s.name + "' attached to unknown joint");
        }
        if (s.length_m < 0.0 || s.com_ratio < 0.0 || s.com_ratio > 1.0) {
            throw model_error("segment '" + s.name + "': bad length or COM ratio");
        }
    }
}

struct Posture {
    std::vector<double> q;  // radians, one entry per joint
    std::optional<double> timestamp_s;
};

inline Eigen::Isometry3d dh_transform(double a, double alpha, double d, double theta) {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = (Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitX()) *
                  Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitZ()))
                     .toRotationMatrix();
    t.translation() = Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitX()) *
                      Eigen::Vector3d(a, 0.0, d);
    return t;
}

struct SegmentPose {
    Eigen::Isometry3d world_from_segment = Eigen::Isometry3d::Identity();
    Eigen::Vector3d com_world = Eigen::Vector3d::Zero();
    Eigen::Vector3d distal_world = Eigen::Vector3d::Zero();
};

struct SegmentFrames {
    std::vector<Eigen::Isometry3d> world_from_joint;  // [0] = root, [i] = joint i
    std::vector<Eigen::Vector3d> joint_axis_world;    // [i] = joint i rotation axis
    std::map<std::string, SegmentPose> segments;

    const Eigen::Isometry3d& frame(int joint_id) const {
        return world_from_joint.at(static_cast<std::size_t>(joint_id));
    }
    Eigen::Vector3d joint_origin(int joint_id) const { return frame(joint_id).translation(); }
};

inline void check_posture(const SkeletonModel& model, const Posture& posture) {
    if (static_cast<int>(posture.q.size()) != model.joint_count()) {
        throw model_error("posture has " + std::to_string(posture.q.size()) +
                          " angles, model expects " + std::to_string(model.joint_count()));
    }
    for (double v : posture.q) {
        if (!std::isfinite(v)) throw model_error("posture contains a non-finite angle");
    }
}

/// Compose the modified-DH transforms parent-to-child in topological order.
inline SegmentFrames forward_kinematics(const SkeletonModel& model, const Posture& posture) {
    check_posture(model, posture);
    SegmentFrames out;
    out.world_from_joint.resize(model.joints.size() + 1);
    out.joint_axis_world.resize(model.joints.size() + 1);
    out.world_from_joint[0] = model.root_frame;
    out.joint_axis_world[0] = model.root_frame.linear().col(2);
    for (const auto& j : model.joints) {
        const double theta = j.theta_offset_rad + posture.q[static_cast<std::size_t>(j.id - 1)];
        out.world_from_joint[static_cast<std::size_t>(j.id)] =
            out.world_from_joint[static_cast<std::size_t>(j.parent)] *
            dh_transform(j.a_m, j.alpha_rad, j.d_m, theta);
        out.joint_axis_world[static_cast<std::size_t>(j.id)] =
            out.world_from_joint[static_cast<std::size_t>(j.id)].linear().col(2);
    }
    for (const auto& s : model.segments) {
        const Eigen::Isometry3d& jf = out.world_from_joint[static_cast<std::size_t>(s.joint)];
        SegmentPose pose;
        pose.world_from_segment = jf;
        pose.world_from_segment.translation() = jf * s.local_origin;
        const Eigen::Vector3d axis_world = jf.linear() * s.local_axis;
        pose.com_world = pose.world_from_segment.translation() +
                         s.com_ratio * s.length_m * axis_world;
        pose.distal_world = pose.world_from_segment.translation() + s.length_m * axis_world;
        out.segments[s.name] = pose;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Joint limit clamping
// ---------------------------------------------------------------------------

struct ClampViolation {
    int joint_id = 0;
    double excess_rad = 0.0;  // signed amount removed: original - clamped
};

struct ClampResult {
    Posture posture;
    std::vector<ClampViolation> violations;
};

inline ClampResult clamp_posture(const SkeletonModel& model, const Posture& posture) {
    check_posture(model, posture);
    ClampResult out;
    out.posture = posture;
    for (const auto& j : model.joints) {
        double& q = out.posture.q[static_cast<std::size_t>(j.id - 1)];
        const double clamped = std::clamp(q, j.q_lower_rad, j.q_upper_rad);
        if (clamped != q) {
            out.violations.push_back({j.id, q - clamped});
            q = clamped;
        }
    }
    return out;
}

/// Gamma_max for one joint under a posture: interpolates the group's strength
/// table at the joint's own angle when configured, else the scalar strength.
inline double strength_for_posture(const SubjectProfile& profile, const SkeletonModel& model,
                                   int joint_id, const Posture& posture) {
    check_posture(model, posture);
    const auto& j = model.joint(joint_id);
    return strength_lookup(profile, joint_group(j.name),
                           posture.q[static_cast<std::size_t>(joint_id - 1)]);
}

// ---------------------------------------------------------------------------
// Default 28-DOF skeleton
//
// DOF allocation: 3 per shoulder, 2 per elbow, 3 per hip, 1 per knee,
// 1 per ankle, 2 waist, 4 spine, 2 neck. World frame: x forward, y left,
// z up, origin at the pelvis center. At q = 0 the body stands upright with
// the arms hanging; positive flexion angles move limbs forward, positive
// abduction moves them outward, trunk/neck rotations turn left.
//
// Axis conventions (at neutral posture): flexion joints rotate about the
// right-pointing lateral axis except the knees (left-pointing, so positive
// knee flexion bends backward); axial rotations at waist/spine/neck are
// about +z, at shoulders/hips about the downward limb axis.
// ---------------------------------------------------------------------------

namespace joints {
inline constexpr int waist_rotation = 1;
inline constexpr int waist_flexion = 2;
inline constexpr int spine_lower_lateral = 3;
inline constexpr int spine_lower_flexion = 4;
inline constexpr int spine_upper_flexion = 5;
inline constexpr int spine_rotation = 6;
inline constexpr int neck_rotation = 7;
inline constexpr int neck_flexion = 8;
inline constexpr int shoulder_r_flexion = 9;
inline constexpr int shoulder_r_rotation = 10;
inline constexpr int shoulder_r_abduction = 11;
inline constexpr int elbow_r_flexion = 12;
inline constexpr int elbow_r_pronation = 13;
inline constexpr int shoulder_l_flexion = 14;
inline constexpr int shoulder_l_rotation = 15;
inline constexpr int shoulder_l_abduction = 16;
inline constexpr int elbow_l_flexion = 17;
inline constexpr int elbow_l_pronation = 18;
inline constexpr int hip_r_flexion = 19;
inline constexpr int hip_r_rotation = 20;
inline constexpr int hip_r_abduction = 21;
inline constexpr int knee_r_flexion = 22;
inline constexpr int ankle_r_flexion = 23;
inline constexpr int hip_l_flexion = 24;
inline constexpr int hip_l_rotation = 25;
inline constexpr int hip_l_abduction = 26;
inline constexpr int knee_l_flexion = 27;
inline constexpr int ankle_l_flexion = 28;
inline constexpr int count = 28;
}  // namespace joints

inline SkeletonModel build_default_skeleton(const SegmentDimensions& dims) {
    for (const auto& [name, p] : dims) {
        if (p.length_m < 0.0 || p.mass_kg < 0.0) {
            throw model_error("segment '" + name + "': negative dimension");
        }
    }
    auto len = [&dims](const std::string& name) {
        const double v = segment_params(dims, name).length_m;
        if (!(v > 0.0)) throw model_error("segment '" + name + "': length must be positive");
        return v;
    };

    const double pelvis = len("pelvis");
    const double abdomen = len("abdomen");
    const double thorax = len("thorax");
    const double neck_link = len("neck_link");
    const double upper_arm = len("upper_arm_r");
    const double forearm = len("forearm_r");
    const double thigh = len("thigh_r");
    const double shank = len("shank_r");
    const double sh_off = len("shoulder_offset");
    const double hip_off = len("hip_offset");
    len("head");
    len("hand_r");
    len("foot_r");

    constexpr double pi = M_PI;
    constexpr double hpi = M_PI / 2.0;

    SkeletonModel m;
    // {id, name, parent, a, alpha, d, theta0, q_lo, q_hi}
    auto add = [&m](const char* name, int parent, double a, double alpha, double d,
                    double theta0, double lo, double hi) {
        JointSpec j;
        j.id = static_cast<int>(m.joints.size()) + 1;
        j.name = name;
        j.parent = parent;
        j.a_m = a;
        j.alpha_rad = alpha;
        j.d_m = d;
        j.theta_offset_rad = theta0;
        j.q_lower_rad = lo;
        j.q_upper_rad = hi;
        m.joints.push_back(j);
        return j.id;
    };

    // trunk
    const int wr = add("waist_rotation", 0, 0, 0, pelvis, 0, -0.785, 0.785);
    const int wf = add("waist_flexion", wr, 0, -hpi, 0, -hpi, -0.262, 1.047);
    const int sll = add("spine_lower_lateral", wf, abdomen, -hpi, 0, 0, -0.349, 0.349);
    const int slf = add("spine_lower_flexion", sll, 0, hpi, 0, 0, -0.175, 0.436);
    const int suf = add("spine_upper_flexion", slf, thorax, 0, 0, hpi, -0.175, 0.436);
    const int sr = add("spine_rotation", suf, 0, hpi, 0, 0, -0.524, 0.524);
    const int nr = add("neck_rotation", sr, 0, 0, neck_link, 0, -1.396, 1.396);
    const int nf = add("neck_flexion", nr, 0, -hpi, 0, -hpi, -0.698, 0.873);
    // right arm
    const int rs1 = add("shoulder_r_flexion", sr, 0, hpi, sh_off, 0, -0.873, pi);
    const int rs2 = add("shoulder_r_rotation", rs1, 0, hpi, 0, hpi, -1.571, 1.571);
    const int rs3 = add("shoulder_r_abduction", rs2, 0, -hpi, 0, -hpi, -0.785, 3.054);
    const int re1 = add("elbow_r_flexion", rs3, upper_arm, -hpi, 0, hpi, 0.0, 2.531);
    const int re2 = add("elbow_r_pronation", re1, 0, hpi, 0, 0, -1.484, 1.484);
    // left arm (lateral offset and out-of-plane axes mirrored)
    const int ls1 = add("shoulder_l_flexion", sr, 0, hpi, -sh_off, 0, -0.873, pi);
    const int ls2 = add("shoulder_l_rotation", ls1, 0, hpi, 0, hpi, -1.571, 1.571);
    const int ls3 = add("shoulder_l_abduction", ls2, 0, hpi, 0, hpi, -0.785, 3.054);
    const int le1 = add("elbow_l_flexion", ls3, upper_arm, hpi, 0, hpi, 0.0, 2.531);
    const int le2 = add("elbow_l_pronation", le1, 0, hpi, 0, 0, -1.484, 1.484);
    // right leg
    const int rh1 = add("hip_r_flexion", 0, 0, hpi, hip_off, 0, -0.524, 2.094);
    const int rh2 = add("hip_r_rotation", rh1, 0, hpi, 0, hpi, -0.785, 0.785);
    const int rh3 = add("hip_r_abduction", rh2, 0, -hpi, 0, -hpi, -0.524, 0.785);
    const int rk = add("knee_r_flexion", rh3, thigh, hpi, 0, 0, 0.0, 2.269);
    const int ra = add("ankle_r_flexion", rk, shank, 0, 0, 0, -0.349, 0.873);
    // left leg
    const int lh1 = add("hip_l_flexion", 0, 0, hpi, -hip_off, 0, -0.524, 2.094);
    const int lh2 = add("hip_l_rotation", lh1, 0, hpi, 0, hpi, -0.785, 0.785);
    const int lh3 = add("hip_l_abduction", lh2, 0, hpi, 0, hpi, -0.524, 0.785);
    const int lk = add("knee_l_flexion", lh3, thigh, -hpi, 0, 0, 0.0, 2.269);
    const int la = add("ankle_l_flexion", lk, shank, 0, 0, 0, -0.349, 0.873);

    auto seg = [&m, &dims](const char* name, int joint, Eigen::Vector3d origin,
                           Eigen::Vector3d axis) {
        const auto& p = segment_params(dims, name);
        m.segments.push_back({name, joint, origin, axis, p.length_m, p.com_ratio});
    };
    const Eigen::Vector3d zero = Eigen::Vector3d::Zero();
    const Eigen::Vector3d ex = Eigen::Vector3d::UnitX();
    const Eigen::Vector3d ez = Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d back{0.0, -1.0, 0.0};  // ankle-frame forward is -y

    seg("pelvis", 0, zero, ez);
    seg("abdomen", wf, zero, ex);
    seg("thorax", slf, zero, ex);
    seg("head", nf, zero, ex);
    seg("upper_arm_r", rs3, zero, ex);
    seg("forearm_r", re2, zero, ez);
    seg("hand_r", re2, Eigen::Vector3d(0, 0, forearm), ez);
    seg("upper_arm_l", ls3, zero, ex);
    seg("forearm_l", le2, zero, ez);
    seg("hand_l", le2, Eigen::Vector3d(0, 0, forearm), ez);
    seg("thigh_r", rh3, zero, ex);
    seg("shank_r", rk, zero, ex);
    seg("foot_r", ra, zero, back);
    seg("thigh_l", lh3, zero, ex);
    seg("shank_l", lk, zero, ex);
    seg("foot_l", la, zero, back);

    validate(m);
    return m;
}

}  // namespace dhm

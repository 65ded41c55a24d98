#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "dhm/statics.hpp"
#include "oracles.hpp"

using namespace dhm;

namespace {

struct RandomChain {
    SkeletonModel model;
    SegmentDimensions dims;
    std::vector<ExternalLoad> loads;
    Posture posture;
};

RandomChain make_random_chain(std::mt19937& rng, int max_segments = 8) {
    std::uniform_int_distribution<int> nd(1, max_segments);
    std::uniform_real_distribution<double> len(0.1, 0.6);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    std::uniform_real_distribution<double> mass(0.0, 8.0);
    std::uniform_real_distribution<double> force(-60.0, 60.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    RandomChain c;
    const int n = nd(rng);
    for (int i = 1; i <= n; ++i) {
        JointSpec j;
        j.id = i;
        j.name = "joint" + std::to_string(i);
        // serial chain or random earlier parent: both tree shapes appear
        std::uniform_int_distribution<int> pd(0, i - 1);
        j.parent = unit(rng) < 0.7 ? i - 1 : pd(rng);
        j.a_m = len(rng);
        j.alpha_rad = ang(rng);
        j.d_m = len(rng) - 0.3;
        j.theta_offset_rad = ang(rng);
        j.q_lower_rad = -M_PI;
        j.q_upper_rad = M_PI;
        c.model.joints.push_back(j);

        const std::string seg = "seg" + std::to_string(i);
        Eigen::Vector3d axis(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
        if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitX();
        axis.normalize();
        c.model.segments.push_back({seg, i, Eigen::Vector3d::Zero(), axis, len(rng), unit(rng)});
        c.dims[seg] = {c.model.segments.back().length_m, mass(rng), unit(rng)};

        if (unit(rng) < 0.6) {
            c.loads.push_back({seg,
                               Eigen::Vector3d(0.3 * (unit(rng) - 0.5), 0.3 * (unit(rng) - 0.5),
                                               0.3 * (unit(rng) - 0.5)),
                               Eigen::Vector3d(force(rng), force(rng), force(rng)),
                               "load" + std::to_string(i)});
        }
        c.posture.q.push_back(ang(rng));
    }
    return c;
}

SkeletonModel planar_two_link_arm() {
    // two revolute joints about world y, links along +x (horizontal arm)
    SkeletonModel m;
    JointSpec shoulder;
    shoulder.id = 1;
    shoulder.name = "shoulder";
    shoulder.parent = 0;
    shoulder.alpha_rad = -M_PI / 2.0;  // joint axis = world +y
    shoulder.q_lower_rad = -M_PI;
    shoulder.q_upper_rad = M_PI;
    m.joints.push_back(shoulder);

    JointSpec elbow;
    elbow.id = 2;
    elbow.name = "elbow";
    elbow.parent = 1;
    elbow.a_m = 0.3;
    elbow.q_lower_rad = -M_PI;
    elbow.q_upper_rad = M_PI;
    m.joints.push_back(elbow);

    m.segments.push_back({"upper", 1, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX(), 0.3, 0.5});
    m.segments.push_back({"fore", 2, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX(), 0.35, 0.5});
    return m;
}

}  // namespace

TEST_CASE("no loads and zero gravity give exactly zero moments") {
    std::mt19937 rng(11);
    const RandomChain c = make_random_chain(rng);
    const JointLoadProfile p =
        static_joint_loads(c.model, c.posture, c.dims, {}, Eigen::Vector3d::Zero());
    for (int id = 1; id <= c.model.joint_count(); ++id) {
        CHECK(p.axis_moment(id) == 0.0);
        CHECK(p.moment_Nm[static_cast<std::size_t>(id)].norm() == 0.0);
        CHECK(p.force_N[static_cast<std::size_t>(id)].norm() == 0.0);
    }
}

TEST_CASE("planar horizontal arm with a 5 kg hand load") {
    const SkeletonModel m = planar_two_link_arm();
    SegmentDimensions dims;
    dims["upper"] = {0.3, 0.0, 0.5};   // massless segments
    dims["fore"] = {0.35, 0.0, 0.5};
    const std::vector<ExternalLoad> loads = {
        {"fore", Eigen::Vector3d(0.35, 0.0, 0.0), Eigen::Vector3d(0.0, 0.0, -5.0 * 9.81),
         "hand mass"}};
    Posture p;
    p.q = {0.0, 0.0};

    const JointLoadProfile prof = static_joint_loads(m, p, dims, loads);
    // 5 * 9.81 * 0.65 and 5 * 9.81 * 0.35
    CHECK_THAT(prof.load_magnitude(1), Catch::Matchers::WithinAbs(31.8825, 5e-4));
    CHECK_THAT(prof.load_magnitude(2), Catch::Matchers::WithinAbs(17.1675, 5e-4));
}

TEST_CASE("backward recursion equals brute-force distal summation") {
    std::mt19937 rng(20240818);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const RandomChain c = make_random_chain(rng);
        const JointLoadProfile prof = static_joint_loads(c.model, c.posture, c.dims, c.loads);
        const auto ref =
            oracle::brute_force_axis_moments(c.model, c.posture, c.dims, c.loads, kStandardGravity);
        for (int id = 1; id <= c.model.joint_count(); ++id) {
            const double scale = std::max(1.0, std::abs(ref[static_cast<std::size_t>(id)]));
            worst = std::max(worst,
                             std::abs(prof.axis_moment(id) - ref[static_cast<std::size_t>(id)]) /
                                 scale);
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("moments are additive over loads and linear in force magnitude") {
    std::mt19937 rng(5);
    const RandomChain c = make_random_chain(rng);
    REQUIRE(c.loads.size() >= 1);

    const Eigen::Vector3d g = Eigen::Vector3d::Zero();  // isolate the external loads
    const JointLoadProfile all = static_joint_loads(c.model, c.posture, c.dims, c.loads, g);

    SECTION("additivity") {
        std::vector<double> sum(static_cast<std::size_t>(c.model.joint_count()) + 1, 0.0);
        for (const auto& l : c.loads) {
            const JointLoadProfile one = static_joint_loads(c.model, c.posture, c.dims, {l}, g);
            for (int id = 1; id <= c.model.joint_count(); ++id) {
                sum[static_cast<std::size_t>(id)] += one.axis_moment(id);
            }
        }
        for (int id = 1; id <= c.model.joint_count(); ++id) {
            CHECK_THAT(all.axis_moment(id),
                       Catch::Matchers::WithinAbs(sum[static_cast<std::size_t>(id)], 1e-9));
        }
    }

    SECTION("homogeneity in a single force") {
        std::vector<ExternalLoad> scaled = c.loads;
        scaled[0].force_N *= 3.0;
        const JointLoadProfile one = static_joint_loads(c.model, c.posture, c.dims, {c.loads[0]}, g);
        const JointLoadProfile rest = static_joint_loads(
            c.model, c.posture, c.dims,
            std::vector<ExternalLoad>(c.loads.begin() + 1, c.loads.end()), g);
        const JointLoadProfile after = static_joint_loads(c.model, c.posture, c.dims, scaled, g);
        for (int id = 1; id <= c.model.joint_count(); ++id) {
            const double expected = 3.0 * one.axis_moment(id) + rest.axis_moment(id);
            CHECK_THAT(after.axis_moment(id), Catch::Matchers::WithinAbs(expected, 1e-9));
        }
    }
}

TEST_CASE("arm segments hanging along gravity produce no arm or trunk moments") {
    const SkeletonModel m = build_default_skeleton(scale_segments(1.75, 70.0));
    Posture p;
    p.q.assign(28, 0.0);
    const SegmentDimensions dims = scale_segments(1.75, 70.0);
    const JointLoadProfile prof = static_joint_loads(m, p, dims, {});
    for (const auto& j : m.joints) {
        const std::string g = joint_group(j.name);
        if (g == "shoulder" || g == "elbow" || g == "waist" || g == "spine" || g == "neck") {
            CHECK(std::abs(prof.axis_moment(j.id)) < 1e-9);
        }
    }
}

TEST_CASE("sliding a load along its own force line leaves moments unchanged") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        RandomChain c = make_random_chain(rng);
        if (c.loads.empty()) continue;
        const JointLoadProfile before = static_joint_loads(c.model, c.posture, c.dims, c.loads);

        // move the attachment point along the force direction, in segment coords
        ExternalLoad& l = c.loads[0];
        const SegmentFrames frames = forward_kinematics(c.model, c.posture);
        const Eigen::Matrix3d r =
            frames.segments.at(l.segment).world_from_segment.linear();
        l.offset_m += 0.37 * (r.transpose() * l.force_N.normalized());

        const JointLoadProfile after = static_joint_loads(c.model, c.posture, c.dims, c.loads);
        for (int id = 1; id <= c.model.joint_count(); ++id) {
            CHECK_THAT(after.axis_moment(id),
                       Catch::Matchers::WithinAbs(before.axis_moment(id), 1e-9));
        }
    }
}

TEST_CASE("axis moment is the projection of the full moment") {
    std::mt19937 rng(77);
    const RandomChain c = make_random_chain(rng);
    const JointLoadProfile prof = static_joint_loads(c.model, c.posture, c.dims, c.loads);
    const SegmentFrames frames = forward_kinematics(c.model, c.posture);
    for (int id = 1; id <= c.model.joint_count(); ++id) {
        const double proj = prof.moment_Nm[static_cast<std::size_t>(id)].dot(
            frames.joint_axis_world[static_cast<std::size_t>(id)]);
        CHECK_THAT(prof.axis_moment(id), Catch::Matchers::WithinAbs(proj, 1e-9));
    }
}

TEST_CASE("load attached to an unknown segment raises an attachment error") {
    std::mt19937 rng(8);
    RandomChain c = make_random_chain(rng);
    c.loads.push_back({"no_such_segment", Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(), ""});
    CHECK_THROWS_AS(static_joint_loads(c.model, c.posture, c.dims, c.loads), model_error);
}

TEST_CASE("load_ratio") {
    JointLoadProfile prof;
    prof.axis_moment_Nm = {0.0, 30.0, 0.0, -30.0};
    CHECK(load_ratio(prof, 1, 100.0) == 0.30);
    CHECK(load_ratio(prof, 2, 100.0) == 0.0);
    CHECK(load_ratio(prof, 3, 100.0) == 0.30);  // magnitude of the extension moment
    CHECK_THROWS_AS(load_ratio(prof, 1, 0.0), model_error);
    CHECK_THROWS_AS(load_ratio(prof, 1, -5.0), model_error);
}

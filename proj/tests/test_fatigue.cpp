#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "dhm/fatigue.hpp"
#include "oracles.hpp"

using namespace dhm;

namespace {

constexpr double kMBar = 0.7562;
constexpr double kSigmaM = 0.4347;

// dimensionless load ratio anchored on the 69.9% strength-reduction cell:
// ratio = m * ln(1/(1-0.699)) / 3 min
double anchored_ratio() { return kMBar * std::log(1.0 / (1.0 - 0.699)) / 3.0; }

FatigueParams params(double gamma_max, double m, double r = 0.0) {
    return FatigueParams{gamma_max, m, r};
}

}  // namespace

TEST_CASE("fatigue closed form") {
    SECTION("zero load never fatigues") {
        const FatigueParams p = params(100.0, 0.7562);
        for (double t : {0.0, 1.0, 180.0, 3600.0}) {
            CHECK(fatigue_closed_form(100.0, p, 0.0, t) == 100.0);
        }
    }

    SECTION("anchor cell: average resistance reaches 69.9% reduction at 180 s") {
        const FatigueParams p = params(100.0, kMBar);
        const double load = anchored_ratio() * 100.0;
        const double c = fatigue_closed_form(100.0, p, load, 180.0);
        CHECK_THAT(fatigue_index(p, c), Catch::Matchers::WithinAbs(0.699, 1e-12));
    }

    SECTION("one sigma more resistance reaches about 53.2% at 180 s") {
        const FatigueParams p = params(100.0, kMBar + kSigmaM);
        const double load = anchored_ratio() * 100.0;
        const double c = fatigue_closed_form(100.0, p, load, 180.0);
        CHECK_THAT(fatigue_index(p, c), Catch::Matchers::WithinAbs(0.532, 0.015));
    }

    SECTION("capacity out of range is rejected") {
        const FatigueParams p = params(100.0, 0.7562);
        CHECK_THROWS_AS(fatigue_closed_form(0.0, p, 10.0, 1.0), model_error);
        CHECK_THROWS_AS(fatigue_closed_form(101.0, p, 10.0, 1.0), model_error);
        CHECK_THROWS_AS(fatigue_closed_form(50.0, p, -1.0, 1.0), model_error);
    }
}

TEST_CASE("recovery closed form") {
    const FatigueParams p = params(100.0, 0.7562, 1.0);

    SECTION("full capacity is a fixed point") {
        for (double t : {0.0, 5.0, 600.0}) CHECK(recovery_closed_form(100.0, p, t) == 100.0);
    }

    SECTION("zero recovery rate freezes the capacity") {
        const FatigueParams frozen = params(100.0, 0.7562, 0.0);
        CHECK(recovery_closed_form(40.0, frozen, 3600.0) == 40.0);
    }

    SECTION("half of the gap closes after ln 2 minutes at R = 1/min") {
        const double t_s = std::log(2.0) * 60.0;
        CHECK_THAT(recovery_closed_form(50.0, p, t_s), Catch::Matchers::WithinAbs(75.0, 1e-12));
        // independent numeric oracle
        const double ref = oracle::integrate_capacity(50.0, 100.0, 0.7562, 1.0, 0.0, std::log(2.0));
        CHECK_THAT(recovery_closed_form(50.0, p, t_s), Catch::Matchers::WithinAbs(ref, 1e-9));
    }

    SECTION("fatigue branch agrees with the numeric oracle too") {
        const FatigueParams pf = params(120.0, 0.5);
        const double got = fatigue_closed_form(110.0, pf, 45.0, 95.0);
        const double ref = oracle::integrate_capacity(110.0, 120.0, 0.5, 0.0, 45.0, 95.0 / 60.0);
        CHECK_THAT(got, Catch::Matchers::WithinRel(ref, 1e-9));
    }
}

TEST_CASE("fatigue index") {
    const FatigueParams p = params(100.0, 0.7562);
    CHECK(fatigue_index(p, 100.0) == 0.0);
    CHECK_THAT(fatigue_index(p, 46.3), Catch::Matchers::WithinAbs(0.537, 1e-12));
    CHECK_THAT(fatigue_index(p, 30.1), Catch::Matchers::WithinAbs(0.699, 1e-12));
    CHECK_THROWS_AS(fatigue_index(p, 0.0), model_error);
    CHECK_THROWS_AS(fatigue_index(p, 100.5), model_error);
}

TEST_CASE("schedule simulation") {
    SECTION("rest-only schedule is a pure recovery curve") {
        const FatigueParams p = params(100.0, 0.7562, 0.8);
        WorkRestSchedule s;
        s.segments.push_back({ScheduleSegment::Kind::rest, 90.0, 0.0});
        SimulateOptions opts;
        opts.sample_dt_s = 7.0;
        opts.initial_capacity_Nm = 60.0;
        const CapacityTrajectory traj = simulate_schedule(p, s, opts);
        REQUIRE(traj.t_s.front() == 0.0);
        REQUIRE(traj.t_s.back() == 90.0);
        for (std::size_t i = 0; i < traj.t_s.size(); ++i) {
            CHECK_THAT(traj.gamma_Nm[i],
                       Catch::Matchers::WithinAbs(recovery_closed_form(60.0, p, traj.t_s[i]),
                                                  1e-12));
        }
        CHECK_FALSE(traj.failure_time_s.has_value());
    }

    SECTION("constant-load single bout fails at the analytic endurance time") {
        const double ratio = 0.3026;
        const FatigueParams p = params(100.0, kMBar);
        const WorkRestSchedule s = cyclic_schedule(1, 450.0, 0.0, ratio * 100.0);
        const CapacityTrajectory traj = simulate_schedule(p, s, {});
        REQUIRE(traj.failure_time_s.has_value());
        const double expected =
            kMBar * (1.0 / ratio) * std::log(1.0 / ratio) * 60.0;  // = 179.23 s
        CHECK_THAT(*traj.failure_time_s, Catch::Matchers::WithinAbs(expected, 1e-9));
        CHECK_THAT(expected, Catch::Matchers::WithinAbs(179.2, 0.1));
    }

    SECTION("strong subject survives the five drilling cycles") {
        const FatigueParams p = params(195.0, 1.1909, 0.4);
        const WorkRestSchedule s = cyclic_schedule(5, 60.0, 30.0, 28.5);
        const EnduranceResult r = endurance_time(p, s);
        CHECK(r.exceeded());
        CHECK(r.horizon_s == 450.0);
        CHECK(r.final_fatigue_index > 0.0);
        CHECK(r.final_fatigue_index < 1.0);
    }

    SECTION("capacity is continuous across segment boundaries") {
        const FatigueParams p = params(100.0, 0.5, 1.2);
        const WorkRestSchedule s = cyclic_schedule(3, 47.0, 23.0, 35.0);
        SimulateOptions opts;
        opts.sample_dt_s = 10.0;  // does not divide the durations
        const CapacityTrajectory traj = simulate_schedule(p, s, opts);
        for (std::size_t i = 1; i < traj.t_s.size(); ++i) {
            CHECK(traj.t_s[i] > traj.t_s[i - 1]);  // boundaries sampled exactly once
        }
        // chaining closed forms manually reproduces the boundary values
        double c = 100.0;
        double t = 0.0;
        for (const auto& seg : s.segments) {
            c = seg.kind == ScheduleSegment::Kind::work
                    ? fatigue_closed_form(c, p, seg.load_Nm, seg.duration_s)
                    : recovery_closed_form(c, p, seg.duration_s);
            t += seg.duration_s;
            for (std::size_t i = 0; i < traj.t_s.size(); ++i) {
                if (traj.t_s[i] == t) CHECK(traj.gamma_Nm[i] == c);
            }
        }
    }

    SECTION("monotone decay under load, monotone recovery at rest, bounded") {
        const FatigueParams p = params(80.0, 0.9, 0.7);
        const WorkRestSchedule s = cyclic_schedule(4, 55.0, 25.0, 30.0);
        SimulateOptions opts;
        opts.sample_dt_s = 1.0;
        opts.continue_past_failure = true;
        const CapacityTrajectory traj = simulate_schedule(p, s, opts);
        double t0 = 0.0;
        std::size_t k = 0;
        for (const auto& seg : s.segments) {
            const double t1 = t0 + seg.duration_s;
            for (; k + 1 < traj.t_s.size() && traj.t_s[k + 1] <= t1; ++k) {
                const bool work = seg.kind == ScheduleSegment::Kind::work;
                if (work) {
                    CHECK(traj.gamma_Nm[k + 1] < traj.gamma_Nm[k]);
                } else {
                    CHECK(traj.gamma_Nm[k + 1] > traj.gamma_Nm[k]);
                }
            }
            t0 = t1;
        }
        for (double g : traj.gamma_Nm) {
            CHECK(g > 0.0);
            CHECK(g <= 80.0);
        }
    }

    SECTION("immediate failure when the load meets the starting capacity") {
        const FatigueParams p = params(50.0, 0.7562, 0.0);
        const WorkRestSchedule s = cyclic_schedule(1, 60.0, 0.0, 80.0);
        const EnduranceResult r = endurance_time(p, s);
        REQUIRE_FALSE(r.exceeded());
        CHECK(*r.endurance_s == 0.0);
    }
}

TEST_CASE("ratio scale invariance of the fatigue-index trajectory") {
    const WorkRestSchedule base = cyclic_schedule(3, 60.0, 30.0, 30.0);
    const FatigueParams p1 = params(100.0, 0.7562, 0.4);
    const FatigueParams p2 = params(700.0, 0.7562, 0.4);  // everything scaled by 7
    const WorkRestSchedule scaled = base.with_load(210.0);

    SimulateOptions opts;
    opts.sample_dt_s = 2.5;
    const CapacityTrajectory t1 = simulate_schedule(p1, base, opts);
    const CapacityTrajectory t2 = simulate_schedule(p2, scaled, opts);
    REQUIRE(t1.t_s.size() == t2.t_s.size());
    for (std::size_t i = 0; i < t1.t_s.size(); ++i) {
        CHECK(t1.t_s[i] == t2.t_s[i]);
        CHECK_THAT(t2.gamma_Nm[i] / 700.0,
                   Catch::Matchers::WithinAbs(t1.gamma_Nm[i] / 100.0, 1e-12));
    }
    CHECK(t1.failure_time_s.has_value() == t2.failure_time_s.has_value());
}

TEST_CASE("numeric integrator") {
    SECTION("constant load matches the closed form to 1e-6 relative") {
        const FatigueParams p = params(100.0, 0.7562, 0.0);
        std::vector<double> loads(300, 30.26);  // 300 steps of 0.6 s = 180 s
        const CapacityTrajectory traj = integrate_variable_load(p, loads, 0.6);
        for (std::size_t i = 0; i < traj.t_s.size(); ++i) {
            const double ref = fatigue_closed_form(100.0, p, 30.26, traj.t_s[i]);
            CHECK_THAT(traj.gamma_Nm[i], Catch::Matchers::WithinRel(ref, 1e-6));
        }
    }

    SECTION("zero load with zero recovery stays flat") {
        const FatigueParams p = params(100.0, 0.7562, 0.0);
        const CapacityTrajectory traj =
            integrate_variable_load(p, std::vector<double>(100, 0.0), 0.6, 73.0);
        for (double g : traj.gamma_Nm) CHECK(g == 73.0);
    }

    SECTION("step load cycles match the piecewise closed form to 1e-6") {
        const FatigueParams p = params(100.0, 0.7562, 0.4);
        const WorkRestSchedule s = cyclic_schedule(5, 60.0, 30.0, 28.5);
        std::vector<double> loads;
        for (const auto& seg : s.segments) {
            const int steps = static_cast<int>(seg.duration_s / 0.6);
            loads.insert(loads.end(), static_cast<std::size_t>(steps),
                         seg.kind == ScheduleSegment::Kind::work ? seg.load_Nm : 0.0);
        }
        const CapacityTrajectory numeric = integrate_variable_load(p, loads, 0.6);
        SimulateOptions opts;
        opts.sample_dt_s = 0.6;
        opts.continue_past_failure = true;
        const CapacityTrajectory exact = simulate_schedule(p, s, opts);
        // compare at every segment boundary
        double t = 0.0;
        for (const auto& seg : s.segments) {
            t += seg.duration_s;
            double num = -1.0, exa = -1.0;
            for (std::size_t i = 0; i < numeric.t_s.size(); ++i) {
                if (std::abs(numeric.t_s[i] - t) < 1e-9) num = numeric.gamma_Nm[i];
            }
            for (std::size_t i = 0; i < exact.t_s.size(); ++i) {
                if (std::abs(exact.t_s[i] - t) < 1e-9) exa = exact.gamma_Nm[i];
            }
            REQUIRE(num > 0.0);
            REQUIRE(exa > 0.0);
            CHECK_THAT(num, Catch::Matchers::WithinRel(exa, 1e-6));
        }
    }

    SECTION("negative load samples are rejected") {
        const FatigueParams p = params(100.0, 0.7562, 0.0);
        CHECK_THROWS_AS(integrate_variable_load(p, {10.0, -1.0}, 0.6), model_error);
        CHECK_THROWS_AS(integrate_variable_load(p, {10.0}, 0.0), model_error);
    }
}

TEST_CASE("endurance") {
    SECTION("overload at t = 0 gives zero endurance") {
        const FatigueParams p = params(100.0, 0.7562, 0.0);
        const EnduranceResult r = endurance_time(p, cyclic_schedule(1, 100.0, 0.0, 150.0));
        REQUIRE_FALSE(r.exceeded());
        CHECK(*r.endurance_s == 0.0);
    }

    SECTION("single-bout endurance equals m*(Gmax/load)*ln(Gmax/load)") {
        std::mt19937 rng(101);
        std::uniform_real_distribution<double> ratio(0.15, 0.9);
        std::uniform_real_distribution<double> md(0.2, 2.0);
        for (int trial = 0; trial < 50; ++trial) {
            const double m = md(rng);
            const double r = ratio(rng);
            const FatigueParams p = params(100.0, m, 0.0);
            const double expected = m * (1.0 / r) * std::log(1.0 / r) * 60.0;
            const EnduranceResult res =
                endurance_time(p, cyclic_schedule(1, expected * 2.0, 0.0, 100.0 * r));
            REQUIRE_FALSE(res.exceeded());
            CHECK_THAT(*res.endurance_s, Catch::Matchers::WithinRel(expected, 1e-9));
        }
    }

    SECTION("endurance is monotone in resistance, capacity and load") {
        std::mt19937 rng(55);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const WorkRestSchedule s = cyclic_schedule(5, 60.0, 30.0);
        auto endurance_of = [&](double gmax, double m, double load) {
            const EnduranceResult r = endurance_time(FatigueParams{gmax, m, 0.3},
                                                     s.with_load(load));
            return r.exceeded() ? 1e9 : *r.endurance_s;
        };
        for (int trial = 0; trial < 60; ++trial) {
            const double gmax = 60.0 + 120.0 * unit(rng);
            const double m = 0.3 + 1.2 * unit(rng);
            const double load = gmax * (0.2 + 0.6 * unit(rng));
            CHECK(endurance_of(gmax, m * 1.3, load) >= endurance_of(gmax, m, load));
            CHECK(endurance_of(gmax * 1.2, m, load) >= endurance_of(gmax, m, load));
            CHECK(endurance_of(gmax, m, load * 1.2) <= endurance_of(gmax, m, load));
        }
    }
}

TEST_CASE("fatigue parameter validation") {
    CHECK_THROWS_AS(validate(FatigueParams{0.0, 0.7, 0.1}), model_error);
    CHECK_THROWS_AS(validate(FatigueParams{100.0, 0.0, 0.1}), model_error);
    CHECK_THROWS_AS(validate(FatigueParams{100.0, 0.7, -0.1}), model_error);
    CHECK(FatigueParams{100.0, 0.5, 0.0}.fatigue_rate_per_min() == 2.0);
}

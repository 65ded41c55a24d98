#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "dhm/dhm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitModel = 3;

struct CommonOpts {
    std::string out_dir = "out";
    double sample_dt_s = 0.5;
    bool continue_past_failure = false;
    std::string config_path;
};

dhm::RunConfig base_config(const CommonOpts& common) {
    dhm::RunConfig cfg;
    if (!common.config_path.empty()) {
        const auto j = dhm::read_json_file(common.config_path);
        cfg = dhm::parse_run_config(
            j, std::filesystem::path(common.config_path).parent_path());
    }
    cfg.out_dir = common.out_dir;
    cfg.sample_dt_s = common.sample_dt_s;
    cfg.continue_past_failure = common.continue_past_failure;
    return cfg;
}

dhm::SkeletonModel model_for(const dhm::SubjectProfile& profile,
                             const std::string& override_path) {
    dhm::SkeletonModel model =
        dhm::build_default_skeleton(dhm::scale_segments(profile.height_m, profile.weight_kg));
    if (!override_path.empty()) {
        dhm::apply_model_override(model, dhm::read_json_file(override_path));
    }
    return model;
}

dhm::SubjectProfile profile_from(const std::string& path) {
    if (path.empty()) throw dhm::config_error("a subject profile (--profile) is required");
    return dhm::parse_subject_profile(dhm::read_json_file(path));
}

void write_file(const std::string& out_dir, const std::string& name,
                const std::string& content) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dhm::config_error("cannot write '" + path.string() + "'");
    out << content;
    std::cout << "wrote " << path.string() << "\n";
}

std::string fk_csv(const dhm::SkeletonModel& model, const dhm::PostureCapture& capture) {
    std::ostringstream out;
    out << "t_s,joint_id,joint,x_m,y_m,z_m,axis_x,axis_y,axis_z\n";
    for (const auto& frame : capture.frames) {
        dhm::Posture p;
        p.q = frame.q;
        const dhm::SegmentFrames frames = dhm::forward_kinematics(model, p);
        for (const auto& j : model.joints) {
            const auto pos = frames.joint_origin(j.id);
            const auto axis = frames.joint_axis_world[static_cast<std::size_t>(j.id)];
            out << dhm::format_double(frame.t_s) << ',' << j.id << ',' << j.name << ','
                << dhm::format_double(pos.x()) << ',' << dhm::format_double(pos.y()) << ','
                << dhm::format_double(pos.z()) << ',' << dhm::format_double(axis.x()) << ','
                << dhm::format_double(axis.y()) << ',' << dhm::format_double(axis.z()) << '\n';
        }
    }
    return out.str();
}

int run(int argc, char** argv) {
    CLI::App app{"digital-human joint load, fatigue and endurance analysis"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config_path, "JSON run configuration (report paths)");
    app.add_option("--out-dir", common.out_dir, "output directory")->capture_default_str();
    app.add_option("--sample-dt-s", common.sample_dt_s, "trajectory sample step [s]")
        ->capture_default_str();
    app.add_flag("--continue-past-failure", common.continue_past_failure,
                 "keep propagating capacity after failure (plot data)");

    std::string posture_path, profile_path, loadcase_path, schedule_path, population_path;
    std::string model_path, joint_name = "shoulder_r_flexion", group = "shoulder";
    double required_s = std::numeric_limits<double>::quiet_NaN();

    auto* fk = app.add_subcommand("fk", "forward kinematics of a posture capture");
    fk->add_option("--posture", posture_path, "posture capture file")->required();
    fk->add_option("--profile", profile_path, "subject profile JSON")->required();
    fk->add_option("--model", model_path, "model override JSON");

    auto* loads = app.add_subcommand("loads", "static joint loads for a posture + load case");
    loads->add_option("--posture", posture_path)->required();
    loads->add_option("--profile", profile_path)->required();
    loads->add_option("--load-case", loadcase_path);
    loads->add_option("--model", model_path);

    auto* fatigue = app.add_subcommand("fatigue", "capacity trajectory over a schedule");
    fatigue->add_option("--profile", profile_path)->required();
    fatigue->add_option("--schedule", schedule_path, "schedule JSON with explicit loads")
        ->required();
    fatigue->add_option("--joint-group", group, "strength group")->capture_default_str();

    auto* endurance = app.add_subcommand("endurance", "endurance verdict over a schedule");
    endurance->add_option("--profile", profile_path)->required();
    endurance->add_option("--schedule", schedule_path)->required();
    endurance->add_option("--joint-group", group)->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "81-subgroup factorial endurance sweep");
    sweep->add_option("--population", population_path)->required();
    sweep->add_option("--posture", posture_path)->required();
    sweep->add_option("--load-case", loadcase_path);
    sweep->add_option("--schedule", schedule_path)->required();
    sweep->add_option("--joint", joint_name, "analysis joint")->capture_default_str();
    sweep->add_option("--required-s", required_s, "selection threshold [s]");

    auto* report = app.add_subcommand("report", "full pipeline: posture -> loads -> fatigue");
    report->add_option("--posture", posture_path);
    report->add_option("--profile", profile_path);
    report->add_option("--load-case", loadcase_path);
    report->add_option("--schedule", schedule_path);
    report->add_option("--population", population_path);
    report->add_option("--model", model_path);
    report->add_option("--joint", joint_name)->capture_default_str();
    report->add_option("--required-s", required_s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (fk->parsed()) {
        const auto profile = profile_from(profile_path);
        const auto model = model_for(profile, model_path);
        const auto capture = dhm::load_posture_file(posture_path, model.joint_count());
        write_file(common.out_dir, "fk.csv", fk_csv(model, capture));
        return kExitOk;
    }

    if (loads->parsed()) {
        const auto profile = profile_from(profile_path);
        const auto model = model_for(profile, model_path);
        const auto dims = dhm::scale_segments(profile.height_m, profile.weight_kg);
        const auto capture = dhm::load_posture_file(posture_path, model.joint_count());
        dhm::Posture posture = dhm::average_posture(capture);
        for (const auto& w : dhm::clamp_with_warnings(model, posture)) {
            std::cerr << "warning: " << w << "\n";
        }
        const auto case_loads = loadcase_path.empty()
                                    ? std::vector<dhm::ExternalLoad>{}
                                    : dhm::parse_load_case(dhm::read_json_file(loadcase_path));
        const auto profile_loads = dhm::static_joint_loads(model, posture, dims, case_loads);
        write_file(common.out_dir, "loads.csv", dhm::loads_csv(model, profile_loads));
        return kExitOk;
    }

    if (fatigue->parsed() || endurance->parsed()) {
        const auto profile = profile_from(profile_path);
        const auto schedule = dhm::parse_schedule(dhm::read_json_file(schedule_path));
        if (!schedule.resolved()) {
            throw dhm::config_error(
                "schedule has work segments without load_Nm; this subcommand needs explicit "
                "loads (use 'report' to compute them from a posture)");
        }
        dhm::FatigueParams params;
        params.gamma_max_Nm = dhm::strength_lookup(profile, group, 0.0);
        params.resistance_min = profile.resistance_min;
        params.recovery_per_min = profile.recovery_per_min;
        if (fatigue->parsed()) {
            dhm::SimulateOptions opts;
            opts.sample_dt_s = common.sample_dt_s;
            opts.continue_past_failure = common.continue_past_failure;
            const auto traj = dhm::simulate_schedule(params, schedule, opts);
            write_file(common.out_dir, "trajectory.csv", dhm::trajectory_csv(traj));
        } else {
            const auto result = dhm::endurance_time(params, schedule, common.sample_dt_s);
            std::cout << "endurance: "
                      << (result.exceeded()
                              ? "exceeds " + dhm::format_double(result.horizon_s) + " s"
                              : dhm::format_double(*result.endurance_s) + " s")
                      << "\nfinal fatigue index: "
                      << dhm::format_double(result.final_fatigue_index) << "\n";
        }
        return kExitOk;
    }

    if (sweep->parsed()) {
        const auto pop = dhm::parse_population_spec(dhm::read_json_file(population_path));
        const auto capture = dhm::load_posture_file(posture_path);
        const auto schedule = dhm::parse_schedule(dhm::read_json_file(schedule_path));
        const auto case_loads = loadcase_path.empty()
                                    ? std::vector<dhm::ExternalLoad>{}
                                    : dhm::parse_load_case(dhm::read_json_file(loadcase_path));
        const dhm::Posture posture = dhm::average_posture(capture);
        const auto subgroups = dhm::build_subgroups(pop, posture, case_loads, joint_name);
        const auto grid = dhm::sweep_endurance(subgroups, schedule,
                                               dhm::joint_group(joint_name), common.sample_dt_s);
        write_file(common.out_dir, "sweep.csv", dhm::sweep_csv(grid));
        write_file(common.out_dir, "sweep_table.txt", dhm::sweep_table(grid));
        if (std::isfinite(required_s)) {
            const auto ids = dhm::select_workers(grid, required_s);
            std::ostringstream sel;
            sel << "required_s," << dhm::format_double(required_s) << "\nselected,"
                << ids.size() << "\nids";
            for (int id : ids) sel << ',' << id;
            sel << '\n';
            write_file(common.out_dir, "selection.csv", sel.str());
        }
        return kExitOk;
    }

    // report
    dhm::RunConfig cfg = base_config(common);
    if (!posture_path.empty()) cfg.posture_path = posture_path;
    if (!profile_path.empty()) cfg.profile_path = profile_path;
    if (!loadcase_path.empty()) cfg.loadcase_path = loadcase_path;
    if (!schedule_path.empty()) cfg.schedule_path = schedule_path;
    if (!population_path.empty()) cfg.population_path = population_path;
    if (!model_path.empty()) cfg.model_override_path = model_path;
    if (joint_name != "shoulder_r_flexion" || cfg.analysis_joint.empty()) {
        cfg.analysis_joint = joint_name;
    }
    if (std::isfinite(required_s)) cfg.required_s = required_s;
    const auto bundle = dhm::run_pipeline(cfg);
    for (const auto& path : dhm::write_report_bundle(bundle, cfg.out_dir)) {
        std::cout << "wrote " << path << "\n";
    }
    std::cout << bundle.summary;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dhm::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dhm::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dhm::model_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    }
}

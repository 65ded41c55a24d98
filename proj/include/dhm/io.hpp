#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dhm/anthro.hpp"
#include "dhm/cohort.hpp"
#include "dhm/errors.hpp"
#include "dhm/fatigue.hpp"
#include "dhm/skeleton.hpp"
#include "dhm/statics.hpp"

namespace dhm {

using njson = nlohmann::json;

/// Fixed 12-significant-digit decimal formatting; all emitted text numbers go
/// through here so reports are byte-stable.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline njson read_json_file(const std::string& path) {
    try {
        return njson::parse(read_text_file(path));
    } catch (const njson::parse_error& e) {
        throw parse_error(std::string("invalid JSON in '") + path + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Posture capture text format
//
//   # t_s q1..q28 (rad)
//   0.00 0 0 0 ... 0
//   0.04 0 0 0 ... 0
//
// One frame per line: timestamp then one angle per joint. Radians unless a
// header comment carries "(deg)". Timestamps must strictly increase.
// ---------------------------------------------------------------------------

struct PostureCapture {
    struct Frame {
        double t_s = 0.0;
        std::vector<double> q;
    };
    std::vector<Frame> frames;
    std::string source;
    double nominal_rate_hz = 0.0;
};

inline PostureCapture parse_posture_text(const std::string& text, int n_joints = joints::count,
                                         const std::string& source = "") {
    PostureCapture cap;
    cap.source = source;
    bool degrees = false;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    long data_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            if (line.find("(deg)") != std::string::npos) degrees = true;
            continue;
        }
        ++data_line;
        std::istringstream ls(line);
        std::vector<double> values;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw parse_error("bad number '" + tok + "'", line_no);
            }
        }
        if (static_cast<int>(values.size()) != n_joints + 1) {
            throw parse_error("expected " + std::to_string(n_joints + 1) + " columns, got " +
                                  std::to_string(values.size()),
                              line_no);
        }
        PostureCapture::Frame f;
        f.t_s = values[0];
        f.q.assign(values.begin() + 1, values.end());
        if (degrees) {
            for (double& q : f.q) q *= M_PI / 180.0;
        }
        if (!cap.frames.empty() && f.t_s <= cap.frames.back().t_s) {
            throw parse_error("timestamps must strictly increase", line_no);
        }
        cap.frames.push_back(std::move(f));
        (void)data_line;
    }
    if (cap.frames.size() >= 2) {
        std::vector<double> dts;
        for (std::size_t i = 1; i < cap.frames.size(); ++i) {
            dts.push_back(cap.frames[i].t_s - cap.frames[i - 1].t_s);
        }
        std::nth_element(dts.begin(), dts.begin() + static_cast<long>(dts.size()) / 2, dts.end());
        const double median = dts[dts.size() / 2];
        if (median > 0.0) cap.nominal_rate_hz = 1.0 / median;
    }
    return cap;
}

inline std::string emit_posture_text(const PostureCapture& cap) {
    std::ostringstream out;
    const std::size_t n = cap.frames.empty() ? joints::count : cap.frames.front().q.size();
    out << "# t_s q1..q" << n << " (rad)\n";
    for (const auto& f : cap.frames) {
        out << format_double(f.t_s);
        for (double q : f.q) out << ' ' << format_double(q);
        out << '\n';
    }
    return out.str();
}

inline PostureCapture load_posture_file(const std::string& path, int n_joints = joints::count) {
    return parse_posture_text(read_text_file(path), n_joints, path);
}

/// Per-joint arithmetic mean over all frames (static-task assumption).
inline Posture average_posture(const PostureCapture& cap) {
    if (cap.frames.empty()) throw parse_error("average_posture: capture has no frames");
    Posture p;
    p.q.assign(cap.frames.front().q.size(), 0.0);
    for (const auto& f : cap.frames) {
        for (std::size_t i = 0; i < p.q.size(); ++i) p.q[i] += f.q[i];
    }
    for (double& v : p.q) v /= static_cast<double>(cap.frames.size());
    p.timestamp_s = cap.frames.front().t_s;
    return p;
}

/// Clamp a posture into the model's joint limits, describing every change.
inline std::vector<std::string> clamp_with_warnings(const SkeletonModel& model, Posture& posture) {
    ClampResult r = clamp_posture(model, posture);
    std::vector<std::string> warnings;
    for (const auto& v : r.violations) {
        warnings.push_back("joint '" + model.joint(v.joint_id).name + "' clamped by " +
                           format_double(v.excess_rad) + " rad");
    }
    posture = r.posture;
    return warnings;
}

// ---------------------------------------------------------------------------
// JSON schemas
// ---------------------------------------------------------------------------

inline double require_number(const njson& j, const std::string& key, const std::string& what) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw config_error(what + ": missing numeric field '" + key + "'");
    }
    return j[key].get<double>();
}

/// Subject profile: {height_m, weight_kg, strengths:{group: Nm},
/// m_min | k_per_min (exactly one), R_per_min, label?, strength_tables?}.
inline SubjectProfile parse_subject_profile(const njson& j) {
    SubjectProfile p;
    p.label = j.value("label", std::string{});
    const std::string what = "subject profile" + (p.label.empty() ? "" : " '" + p.label + "'");
    p.height_m = require_number(j, "height_m", what);
    p.weight_kg = require_number(j, "weight_kg", what);
    if (!j.contains("strengths") || !j["strengths"].is_object()) {
        throw config_error(what + ": missing 'strengths' object");
    }
    for (const auto& [group, v] : j["strengths"].items()) {
        p.joint_strengths[group] = v.get<double>();
    }
    const bool has_m = j.contains("m_min");
    const bool has_k = j.contains("k_per_min");
    if (has_m == has_k) {
        throw config_error(what + ": specify exactly one of 'm_min' or 'k_per_min'");
    }
    p.resistance_min = has_m ? j["m_min"].get<double>() : 1.0 / j["k_per_min"].get<double>();
    p.recovery_per_min = require_number(j, "R_per_min", what);
    if (j.contains("strength_tables")) {
        for (const auto& [group, t] : j["strength_tables"].items()) {
            StrengthTable table;
            table.angle_rad = t.at("angle_rad").get<std::vector<double>>();
            table.strength_Nm = t.at("strength_Nm").get<std::vector<double>>();
            if (table.angle_rad.size() != table.strength_Nm.size() || table.angle_rad.empty()) {
                throw config_error(what + ": ragged strength table for '" + group + "'");
            }
            if (!std::is_sorted(table.angle_rad.begin(), table.angle_rad.end())) {
                throw config_error(what + ": strength table angles must increase for '" + group +
                                   "'");
            }
            p.strength_tables[group] = std::move(table);
        }
    }
    validate_profile(p);
    return p;
}

inline njson profile_to_json(const SubjectProfile& p) {
    njson j;
    if (!p.label.empty()) j["label"] = p.label;
    j["height_m"] = p.height_m;
    j["weight_kg"] = p.weight_kg;
    j["strengths"] = njson::object();
    for (const auto& [group, v] : p.joint_strengths) j["strengths"][group] = v;
    j["m_min"] = p.resistance_min;
    j["R_per_min"] = p.recovery_per_min;
    if (!p.strength_tables.empty()) {
        j["strength_tables"] = njson::object();
        for (const auto& [group, t] : p.strength_tables) {
            j["strength_tables"][group] = {{"angle_rad", t.angle_rad},
                                           {"strength_Nm", t.strength_Nm}};
        }
    }
    return j;
}

inline LevelScheme parse_level_scheme(const njson& j, LevelScheme fallback) {
    const std::string s = j.value("level_scheme", std::string{});
    if (s.empty()) return fallback;
    if (s == "one_sigma") return LevelScheme::one_sigma;
    if (s == "two_sigma") return LevelScheme::two_sigma;
    throw config_error("unknown level_scheme '" + s + "'");
}

/// Population spec: factor stats plus the recovery rate the sweep must echo.
inline PopulationSpec parse_population_spec(const njson& j) {
    PopulationSpec s;
    auto factor = [&](const char* key, LevelScheme fallback) {
        if (!j.contains(key)) throw config_error(std::string("population: missing '") + key + "'");
        const njson& f = j[key];
        FactorSpec out;
        out.mean = require_number(f, "mean", std::string("population ") + key);
        out.sd = require_number(f, "sd", std::string("population ") + key);
        out.scheme = parse_level_scheme(f, fallback);
        return out;
    };
    s.height = factor("height", LevelScheme::two_sigma);
    s.weight = factor("weight", LevelScheme::two_sigma);
    s.strength = factor("strength", LevelScheme::two_sigma);
    s.resistance = factor("fatigue_resistance", LevelScheme::one_sigma);
    s.recovery_per_min = require_number(j, "recovery_rate_per_min", "population");
    if (j["strength"].contains("joint_group")) {
        s.strength_joint_group = j["strength"]["joint_group"].get<std::string>();
    }
    if (j.contains("base_strengths")) {
        for (const auto& [group, v] : j["base_strengths"].items()) {
            s.base_strengths[group] = v.get<double>();
        }
    }
    s.base_strengths[s.strength_joint_group] = s.strength.mean;
    return s;
}

inline njson population_to_json(const PopulationSpec& s) {
    auto factor = [](const FactorSpec& f) {
        return njson{{"mean", f.mean},
                     {"sd", f.sd},
                     {"level_scheme",
                      f.scheme == LevelScheme::one_sigma ? "one_sigma" : "two_sigma"}};
    };
    njson j;
    j["height"] = factor(s.height);
    j["weight"] = factor(s.weight);
    j["strength"] = factor(s.strength);
    j["strength"]["joint_group"] = s.strength_joint_group;
    j["fatigue_resistance"] = factor(s.resistance);
    j["recovery_rate_per_min"] = s.recovery_per_min;
    j["base_strengths"] = njson::object();
    for (const auto& [group, v] : s.base_strengths) j["base_strengths"][group] = v;
    return j;
}

/// Schedule: [{kind: "work"|"rest", duration_s, load_Nm?}, ...]. Work
/// segments without load_Nm are resolved later from the computed joint load.
inline WorkRestSchedule parse_schedule(const njson& j) {
    if (!j.is_array()) throw config_error("schedule: expected a JSON array");
    WorkRestSchedule s;
    for (const auto& e : j) {
        ScheduleSegment seg;
        const std::string kind = e.value("kind", std::string{});
        if (kind == "work") {
            seg.kind = ScheduleSegment::Kind::work;
        } else if (kind == "rest") {
            seg.kind = ScheduleSegment::Kind::rest;
            seg.load_Nm = 0.0;
        } else {
            throw config_error("schedule: segment kind must be 'work' or 'rest'");
        }
        seg.duration_s = require_number(e, "duration_s", "schedule segment");
        if (seg.kind == ScheduleSegment::Kind::work && e.contains("load_Nm")) {
            seg.load_Nm = e["load_Nm"].get<double>();
        }
        s.segments.push_back(seg);
    }
    validate(s);
    return s;
}

inline njson schedule_to_json(const WorkRestSchedule& s) {
    njson j = njson::array();
    for (const auto& seg : s.segments) {
        njson e;
        e["kind"] = seg.kind == ScheduleSegment::Kind::work ? "work" : "rest";
        e["duration_s"] = seg.duration_s;
        if (seg.kind == ScheduleSegment::Kind::work && std::isfinite(seg.load_Nm)) {
            e["load_Nm"] = seg.load_Nm;
        }
        j.push_back(e);
    }
    return j;
}

/// Load case: [{segment, offset_m: [x,y,z], force_N: [x,y,z], label?}, ...]
inline std::vector<ExternalLoad> parse_load_case(const njson& j) {
    if (!j.is_array()) throw config_error("load case: expected a JSON array");
    std::vector<ExternalLoad> loads;
    for (const auto& e : j) {
        ExternalLoad l;
        if (!e.contains("segment")) throw config_error("load case: entry without 'segment'");
        l.segment = e["segment"].get<std::string>();
        const auto off = e.value("offset_m", std::vector<double>{0, 0, 0});
        const auto f = e.at("force_N").get<std::vector<double>>();
        if (off.size() != 3 || f.size() != 3) {
            throw config_error("load case: offset_m and force_N must have 3 components");
        }
        l.offset_m = Eigen::Vector3d(off[0], off[1], off[2]);
        l.force_N = Eigen::Vector3d(f[0], f[1], f[2]);
        l.label = e.value("label", std::string{});
        loads.push_back(std::move(l));
    }
    return loads;
}

inline njson load_case_to_json(const std::vector<ExternalLoad>& loads) {
    njson j = njson::array();
    for (const auto& l : loads) {
        j.push_back({{"segment", l.segment},
                     {"offset_m", {l.offset_m.x(), l.offset_m.y(), l.offset_m.z()}},
                     {"force_N", {l.force_N.x(), l.force_N.y(), l.force_N.z()}},
                     {"label", l.label}});
    }
    return j;
}

/// Model override: {"joints": [{id, a_m?, alpha_rad?, d_m?, theta_offset_rad?,
/// q_lower_rad?, q_upper_rad?, name?, parent?}, ...]} -- listed fields replace
/// the defaults for that joint id.
inline void apply_model_override(SkeletonModel& model, const njson& j) {
    if (!j.contains("joints") || !j["joints"].is_array()) {
        throw config_error("model override: missing 'joints' array");
    }
    for (const auto& e : j["joints"]) {
        if (!e.contains("id")) throw config_error("model override: joint entry without 'id'");
        const int id = e["id"].get<int>();
        if (id < 1 || id > model.joint_count()) {
            throw config_error("model override: unknown joint id " + std::to_string(id));
        }
        JointSpec& spec = model.joints[static_cast<std::size_t>(id - 1)];
        spec.name = e.value("name", spec.name);
        spec.parent = e.value("parent", spec.parent);
        spec.a_m = e.value("a_m", spec.a_m);
        spec.alpha_rad = e.value("alpha_rad", spec.alpha_rad);
        spec.d_m = e.value("d_m", spec.d_m);
        spec.theta_offset_rad = e.value("theta_offset_rad", spec.theta_offset_rad);
        spec.q_lower_rad = e.value("q_lower_rad", spec.q_lower_rad);
        spec.q_upper_rad = e.value("q_upper_rad", spec.q_upper_rad);
    }
    validate(model);
}

inline njson model_to_json(const SkeletonModel& model) {
    njson joints = njson::array();
    for (const auto& j : model.joints) {
        joints.push_back({{"id", j.id},
                          {"name", j.name},
                          {"parent", j.parent},
                          {"a_m", j.a_m},
                          {"alpha_rad", j.alpha_rad},
                          {"d_m", j.d_m},
                          {"theta_offset_rad", j.theta_offset_rad},
                          {"q_lower_rad", j.q_lower_rad},
                          {"q_upper_rad", j.q_upper_rad}});
    }
    return njson{{"joints", joints}};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string trajectory_csv(const CapacityTrajectory& traj) {
    std::ostringstream out;
    out << "t_s,gamma_cem_Nm,fatigue_index\n";
    for (std::size_t i = 0; i < traj.t_s.size(); ++i) {
        const double index = (traj.gamma_max_Nm - traj.gamma_Nm[i]) / traj.gamma_max_Nm;
        out << format_double(traj.t_s[i]) << ',' << format_double(traj.gamma_Nm[i]) << ','
            << format_double(index) << '\n';
    }
    return out.str();
}

inline std::string loads_csv(const SkeletonModel& model, const JointLoadProfile& profile) {
    std::ostringstream out;
    out << "joint_id,joint,group,axis_moment_Nm,moment_x_Nm,moment_y_Nm,moment_z_Nm,"
           "force_x_N,force_y_N,force_z_N\n";
    for (const auto& j : model.joints) {
        const auto idx = static_cast<std::size_t>(j.id);
        out << j.id << ',' << j.name << ',' << joint_group(j.name) << ','
            << format_double(profile.axis_moment_Nm[idx]) << ','
            << format_double(profile.moment_Nm[idx].x()) << ','
            << format_double(profile.moment_Nm[idx].y()) << ','
            << format_double(profile.moment_Nm[idx].z()) << ','
            << format_double(profile.force_N[idx].x()) << ','
            << format_double(profile.force_N[idx].y()) << ','
            << format_double(profile.force_N[idx].z()) << '\n';
    }
    return out.str();
}

inline std::string endurance_cell(const EnduranceResult& r) {
    return r.exceeded() ? ">" + format_double(r.horizon_s) : format_double(*r.endurance_s);
}

inline std::string sweep_csv(const SweepGrid& grid) {
    std::ostringstream out;
    out << "subgroup_id,height,weight,strength,fatigue_resistance,height_m,weight_kg,"
           "strength_Nm,m_min,load_Nm,endurance_s,final_fatigue_index\n";
    for (const auto& row : grid.rows) {
        const auto& g = row.subgroup;
        out << g.id << ',' << height_label(g.height) << ',' << weight_label(g.weight) << ','
            << strength_label(g.strength) << ',' << resistance_label(g.resistance) << ','
            << format_double(g.profile.height_m) << ',' << format_double(g.profile.weight_kg)
            << ',' << format_double(g.profile.joint_strengths.at(grid.joint_group)) << ','
            << format_double(g.profile.resistance_min) << ',' << format_double(g.load_Nm) << ','
            << endurance_cell(row.result) << ','
            << format_double(row.result.final_fatigue_index) << '\n';
    }
    return out.str();
}

/// Text table in the H x W block / strength row / resistance column layout.
inline std::string sweep_table(const SweepGrid& grid) {
    std::map<std::tuple<int, int, int, int>, const SweepRow*> cell;
    for (const auto& row : grid.rows) {
        cell[{static_cast<int>(row.subgroup.height), static_cast<int>(row.subgroup.weight),
              static_cast<int>(row.subgroup.strength), static_cast<int>(row.subgroup.resistance)}] =
            &row;
    }
    std::ostringstream out;
    out << "Endurance time of the " << grid.joint_group << " joint [s]  (R = "
        << format_double(grid.recovery_per_min) << " /min)\n";
    out << "                              Fatigue resistance\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-9s %-9s %-9s %9s %9s %9s\n", "H", "W", "S", "Large",
                  "Average", "Small");
    out << buf;
    auto fmt_cell = [&](const SweepRow* r) {
        if (r->result.exceeded()) {
            return ">" + format_double(r->result.horizon_s);
        }
        std::snprintf(buf, sizeof(buf), "%.0f", *r->result.endurance_s);
        return std::string(buf);
    };
    for (int hi = 0; hi < 3; ++hi) {
        for (int wi = 0; wi < 3; ++wi) {
            for (int si = 0; si < 3; ++si) {
                const std::string h = wi == 0 && si == 0
                                          ? height_label(static_cast<Level>(hi))
                                          : "";
                const std::string w = si == 0 ? weight_label(static_cast<Level>(wi)) : "";
                std::snprintf(buf, sizeof(buf), "%-9s %-9s %-9s %9s %9s %9s\n", h.c_str(),
                              w.c_str(), strength_label(static_cast<Level>(si)),
                              fmt_cell(cell.at({hi, wi, si, 2})).c_str(),
                              fmt_cell(cell.at({hi, wi, si, 1})).c_str(),
                              fmt_cell(cell.at({hi, wi, si, 0})).c_str());
                out << buf;
            }
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string model_override_path;
    std::string profile_path;
    std::string posture_path;
    std::string loadcase_path;
    std::string schedule_path;
    std::string population_path;  // optional: adds the 81-subgroup sweep
    std::string out_dir = "out";
    double sample_dt_s = 0.5;
    bool continue_past_failure = false;
    std::string analysis_joint = "shoulder_r_flexion";
    double required_s = std::numeric_limits<double>::quiet_NaN();
};

inline RunConfig parse_run_config(const njson& j, const std::filesystem::path& base_dir) {
    RunConfig c;
    auto path = [&](const char* key) {
        if (!j.contains(key)) return std::string{};
        const std::filesystem::path p = j[key].get<std::string>();
        return (p.is_absolute() ? p : base_dir / p).string();
    };
    c.model_override_path = path("model");
    c.profile_path = path("profile");
    c.posture_path = path("posture");
    c.loadcase_path = path("load_case");
    c.schedule_path = path("schedule");
    c.population_path = path("population");
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    c.sample_dt_s = j.value("sample_dt_s", c.sample_dt_s);
    c.continue_past_failure = j.value("continue_past_failure", c.continue_past_failure);
    c.analysis_joint = j.value("analysis_joint", c.analysis_joint);
    if (j.contains("required_s")) c.required_s = j["required_s"].get<double>();
    return c;
}

struct ReportBundle {
    std::vector<std::pair<std::string, std::string>> files;  // (name, content)
    std::string summary;
};

namespace detail {
template <typename F>
auto stage(const char* name, const std::string& context, F&& fn) {
    try {
        return fn();
    } catch (const parse_error& e) {
        throw parse_error(std::string("stage '") + name + "' (" + context + "): " + e.what());
    } catch (const config_error& e) {
        throw config_error(std::string("stage '") + name + "' (" + context + "): " + e.what());
    } catch (const model_error& e) {
        throw model_error(std::string("stage '") + name + "' (" + context + "): " + e.what());
    }
}
}  // namespace detail

/// Capture -> average posture -> static loads -> fatigue trajectory ->
/// endurance -> reports. Adds the factorial sweep when a population spec is
/// configured.
inline ReportBundle run_pipeline(const RunConfig& cfg) {
    ReportBundle bundle;
    std::ostringstream summary;

    const SubjectProfile profile = detail::stage("load-profile", cfg.profile_path, [&] {
        if (cfg.profile_path.empty()) throw config_error("no subject profile configured");
        return parse_subject_profile(read_json_file(cfg.profile_path));
    });
    const SegmentDimensions dims = scale_segments(profile.height_m, profile.weight_kg);
    SkeletonModel model = build_default_skeleton(dims);
    if (!cfg.model_override_path.empty()) {
        detail::stage("model-override", cfg.model_override_path, [&] {
            apply_model_override(model, read_json_file(cfg.model_override_path));
            return 0;
        });
    }

    PostureCapture capture = detail::stage("parse-posture", cfg.posture_path, [&] {
        if (cfg.posture_path.empty()) throw config_error("no posture file configured");
        return load_posture_file(cfg.posture_path, model.joint_count());
    });
    summary << "posture: " << capture.frames.size() << " frame(s) from '" << cfg.posture_path
            << "'";
    if (capture.nominal_rate_hz > 0.0) {
        summary << " at " << format_double(capture.nominal_rate_hz) << " Hz";
    }
    summary << "\n";

    Posture posture = detail::stage("average-posture", cfg.posture_path,
                                    [&] { return average_posture(capture); });
    for (const auto& w : detail::stage("clamp-posture", cfg.posture_path,
                                       [&] { return clamp_with_warnings(model, posture); })) {
        summary << "warning: " << w << "\n";
    }

    const std::vector<ExternalLoad> loads = detail::stage("load-case", cfg.loadcase_path, [&] {
        return cfg.loadcase_path.empty() ? std::vector<ExternalLoad>{}
                                         : parse_load_case(read_json_file(cfg.loadcase_path));
    });
    const JointLoadProfile load_profile = detail::stage("static-loads", cfg.loadcase_path, [&] {
        return static_joint_loads(model, posture, dims, loads);
    });
    bundle.files.emplace_back("loads.csv", loads_csv(model, load_profile));

    WorkRestSchedule schedule = detail::stage("load-schedule", cfg.schedule_path, [&] {
        if (cfg.schedule_path.empty()) throw config_error("no schedule configured");
        return parse_schedule(read_json_file(cfg.schedule_path));
    });

    const int joint = model.joint_id(cfg.analysis_joint);
    const std::string group = joint_group(cfg.analysis_joint);
    const double demand = load_profile.load_magnitude(joint);
    schedule = schedule.with_load(demand);

    FatigueParams params;
    params.gamma_max_Nm = strength_for_posture(profile, model, joint, posture);
    params.resistance_min = profile.resistance_min;
    params.recovery_per_min = profile.recovery_per_min;

    const EnduranceResult endurance = detail::stage("fatigue", cfg.schedule_path, [&] {
        EnduranceResult r;
        SimulateOptions opts;
        opts.sample_dt_s = cfg.sample_dt_s;
        opts.continue_past_failure = cfg.continue_past_failure;
        r.trajectory = simulate_schedule(params, schedule, opts);
        r.horizon_s = schedule.horizon_s();
        r.endurance_s = r.trajectory.failure_time_s;
        r.final_fatigue_index = fatigue_index(params, r.trajectory.final_capacity());
        return r;
    });
    bundle.files.emplace_back("trajectory.csv", trajectory_csv(endurance.trajectory));

    summary << "analysis joint: " << cfg.analysis_joint << " (group '" << group << "')\n";
    summary << "static load: " << format_double(demand) << " N*m, capacity "
            << format_double(params.gamma_max_Nm) << " N*m (ratio "
            << format_double(demand / params.gamma_max_Nm) << ")\n";
    summary << "fatigue resistance m = " << format_double(params.resistance_min)
            << " min, recovery R = " << format_double(params.recovery_per_min) << " /min\n";
    summary << "schedule horizon: " << format_double(schedule.horizon_s()) << " s\n";
    summary << "endurance: "
            << (endurance.exceeded() ? "exceeds " + format_double(endurance.horizon_s) + " s"
                                     : format_double(*endurance.endurance_s) + " s")
            << "\n";
    summary << "final fatigue index: " << format_double(endurance.final_fatigue_index) << "\n";

    // per-joint fatigue index at the end of the schedule (each joint under its
    // own static demand, same subject characterization)
    summary << "\nper-joint fatigue at schedule end (no failure stop):\n";
    for (const auto& jspec : model.joints) {
        const std::string g = joint_group(jspec.name);
        if (profile.joint_strengths.find(g) == profile.joint_strengths.end()) continue;
        FatigueParams jp;
        jp.gamma_max_Nm = strength_for_posture(profile, model, jspec.id, posture);
        jp.resistance_min = profile.resistance_min;
        jp.recovery_per_min = profile.recovery_per_min;
        const double jload = load_profile.load_magnitude(jspec.id);
        SimulateOptions opts;
        opts.sample_dt_s = schedule.horizon_s();  // boundaries only
        opts.continue_past_failure = true;
        const CapacityTrajectory t =
            simulate_schedule(jp, schedule.with_load(jload), opts);
        summary << "  " << jspec.name << ": load " << format_double(jload) << " N*m, index "
                << format_double(fatigue_index(jp, t.final_capacity())) << "\n";
    }

    if (!cfg.population_path.empty()) {
        const PopulationSpec pop = detail::stage("load-population", cfg.population_path, [&] {
            return parse_population_spec(read_json_file(cfg.population_path));
        });
        const SweepGrid grid = detail::stage("sweep", cfg.population_path, [&] {
            const auto subgroups = build_subgroups(pop, posture, loads, cfg.analysis_joint);
            return sweep_endurance(subgroups, schedule, joint_group(cfg.analysis_joint),
                                   cfg.sample_dt_s);
        });
        bundle.files.emplace_back("sweep.csv", sweep_csv(grid));
        bundle.files.emplace_back("sweep_table.txt", sweep_table(grid));
        summary << "\nsweep: 81 subgroups, horizon " << format_double(grid.horizon_s) << " s\n";
        if (std::isfinite(cfg.required_s)) {
            const auto ids = select_workers(grid, cfg.required_s);
            summary << "subgroups sustaining " << format_double(cfg.required_s)
                    << " s: " << ids.size() << " of " << grid.rows.size() << "\n";
        }
    }

    bundle.summary = summary.str();
    bundle.files.emplace_back("summary.txt", bundle.summary);
    return bundle;
}

inline std::vector<std::string> write_report_bundle(const ReportBundle& bundle,
                                                    const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (const auto& [name, content] : bundle.files) {
        const std::filesystem::path path = std::filesystem::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw config_error("cannot write '" + path.string() + "'");
        out << content;
        written.push_back(path.string());
    }
    return written;
}

}  // namespace dhm

#include "traplab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace traplab {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

void csv_header(std::ofstream& out, const std::string& config_echo) {
    if (!config_echo.empty()) out << "# config: " << config_echo << "\n";
}

json meta_line(const std::string& kind, const std::string& config_echo) {
    json meta;
    meta["type"] = "meta";
    meta["kind"] = kind;
    if (!config_echo.empty()) meta["config"] = json::parse(config_echo, nullptr, false);
    return meta;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_tail_curve_csv(const std::filesystem::path& path, const TailCurve& curve,
                          const std::string& config_echo) {
    auto out = open_out(path);
    csv_header(out, config_echo);
    out << "t,x,y,k,n,p_hat,ci_lo,ci_hi\n";
    for (const auto& row : curve.rows) {
        out << format_double(row.t) << ',' << format_double(row.x) << ',' << format_double(row.y)
            << ',' << row.k << ',' << row.n << ',' << format_double(row.p_hat) << ','
            << format_double(row.ci_lo) << ',' << format_double(row.ci_hi) << '\n';
    }
}

void write_fit_json(const std::filesystem::path& path, const FitReport& fit,
                    const std::string& config_echo) {
    json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["log_big_c"] = fit.log_big_c;
    j["r_squared"] = fit.r_squared;
    j["reduced_chi2"] = fit.reduced_chi2;
    j["slope_se"] = std::sqrt(fit.var_slope);
    j["slope_ci"] = {fit.slope_ci_lo, fit.slope_ci_hi};
    j["points_used"] = fit.points_used;
    j["points_dropped"] = fit.points_dropped;
    j["min_successes"] = fit.min_successes;
    json rows = json::array();
    for (std::size_t i = 0; i < fit.points_used; ++i) {
        rows.push_back({{"y", fit.y_used[i]},
                        {"observed", fit.observed[i]},
                        {"fitted", fit.fitted[i]},
                        {"residual", fit.residuals[i]},
                        {"observed_se", fit.observed_se[i]}});
    }
    j["rows"] = rows;
    if (!config_echo.empty()) j["config"] = json::parse(config_echo, nullptr, false);
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_marginal_csv(const std::filesystem::path& path, const TrapEnvironment& env,
                        std::span<const double> probs, const std::string& config_echo) {
    if (probs.size() != static_cast<std::size_t>(env.width())) {
        throw std::invalid_argument("write_marginal_csv: one probability per site required");
    }
    auto out = open_out(path);
    csv_header(out, config_echo);
    out << "site,probability\n";
    for (std::size_t i = 0; i < probs.size(); ++i) {
        out << (env.z_lo + static_cast<long>(i)) << ',' << format_double(probs[i]) << '\n';
    }
}

void write_trajectory_ndjson(const std::filesystem::path& path, const Trajectory& traj,
                             const std::string& config_echo) {
    auto out = open_out(path);
    json meta = meta_line("trajectory", config_echo);
    meta["start"] = traj.start;
    meta["t_end"] = traj.t_end;
    meta["truncated"] = traj.truncated;
    out << meta.dump() << "\n";
    for (const auto& [t, pos] : traj.events) {
        out << "{\"t\":" << format_double(t) << ",\"pos\":" << format_double(pos) << "}\n";
    }
}

void write_environment_ndjson(const std::filesystem::path& path, const TrapEnvironment& env,
                              const std::string& config_echo) {
    auto out = open_out(path);
    json meta = meta_line("trap_environment", config_echo);
    meta["alpha"] = env.alpha;
    meta["z_lo"] = env.z_lo;
    meta["z_hi"] = env.z_hi;
    meta["site_seed"] = env.site_seed;
    out << meta.dump() << "\n";
    for (long z = env.z_lo; z <= env.z_hi; ++z) {
        out << "{\"z\":" << z << ",\"tau\":" << format_double(env.depth(z)) << "}\n";
    }
}

TrapEnvironment read_environment_ndjson(const std::filesystem::path& path) {
    auto in = open_in(path);
    TrapEnvironment env;
    std::string line;
    bool meta_seen = false;
    std::vector<std::pair<long, double>> sites;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const json j = json::parse(line);
        if (j.value("type", "") == "meta") {
            env.alpha = j.at("alpha").get<double>();
            env.z_lo = j.at("z_lo").get<long>();
            env.z_hi = j.at("z_hi").get<long>();
            env.site_seed = j.at("site_seed").get<std::uint64_t>();
            meta_seen = true;
            continue;
        }
        sites.emplace_back(j.at("z").get<long>(), j.at("tau").get<double>());
    }
    if (!meta_seen) throw std::runtime_error("environment ndjson: missing meta line");
    env.depths.assign(static_cast<std::size_t>(env.width()), 0.0);
    if (sites.size() != env.depths.size()) {
        throw std::runtime_error("environment ndjson: site count does not match window");
    }
    for (const auto& [z, tau] : sites) {
        if (z < env.z_lo || z > env.z_hi) throw std::runtime_error("environment ndjson: site outside window");
        env.depths[static_cast<std::size_t>(z - env.z_lo)] = tau;
    }
    return env;
}

void write_measure_ndjson(const std::filesystem::path& path, const AtomicMeasure& m,
                          const std::string& config_echo) {
    auto out = open_out(path);
    json meta = meta_line("atomic_measure", config_echo);
    meta["alpha"] = m.alpha;
    meta["lo"] = m.lo;
    meta["hi"] = m.hi;
    meta["v_min"] = m.v_min;
    out << meta.dump() << "\n";
    for (const auto& atom : m.atoms) {
        out << "{\"x\":" << format_double(atom.x) << ",\"v\":" << format_double(atom.v) << "}\n";
    }
}

AtomicMeasure read_measure_ndjson(const std::filesystem::path& path) {
    auto in = open_in(path);
    AtomicMeasure m;
    std::string line;
    bool meta_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const json j = json::parse(line);
        if (j.value("type", "") == "meta") {
            m.alpha = j.at("alpha").get<double>();
            m.lo = j.at("lo").get<double>();
            m.hi = j.at("hi").get<double>();
            m.v_min = j.at("v_min").get<double>();
            meta_seen = true;
            continue;
        }
        m.atoms.push_back({j.at("x").get<double>(), j.at("v").get<double>()});
    }
    if (!meta_seen) throw std::runtime_error("measure ndjson: missing meta line");
    for (std::size_t i = 1; i < m.atoms.size(); ++i) {
        if (!(m.atoms[i].x > m.atoms[i - 1].x)) {
            throw std::runtime_error("measure ndjson: atom positions not strictly increasing");
        }
    }
    return m;
}

void write_coupling_map_csv(const std::filesystem::path& path, const CouplingMap& map,
                            const std::string& config_echo) {
    auto out = open_out(path);
    csv_header(out, config_echo);
    out << "u,G\n";
    for (std::size_t i = 0; i < map.u.size(); ++i) {
        out << format_double(map.u[i]) << ',' << format_double(map.g[i]) << '\n';
    }
}

} // namespace traplab

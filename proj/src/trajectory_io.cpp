#include "mcflow/trajectory_io.hpp"

#include "mcflow/errors.hpp"

#include <cstdio>
#include <fstream>
#include <map>

namespace mcf {

namespace fs = std::filesystem;

namespace {

std::string snapshot_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%06zu.mcf", i);
    return std::string("snapshots/") + buf;
}

StopReason parse_stop(const std::string& s)
{
    for (auto r : {StopReason::EndTime, StopReason::MaxSteps, StopReason::Blowup, StopReason::Degenerate})
        if (stop_name(r) == s)
            return r;
    throw DataError("unknown stop reason '" + s + "'");
}

}  // namespace

std::vector<std::string> save_trajectory(const fs::path& dir, const Trajectory& traj)
{
    fs::create_directories(dir / "snapshots");
    for (const auto& entry : fs::directory_iterator(dir / "snapshots")) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("snap_") && entry.path().extension() == ".mcf")
            fs::remove(entry.path());
    }
    std::vector<std::string> written;
    auto open = [&](const std::string& rel) {
        std::ofstream os(dir / rel);
        if (!os)
            throw std::runtime_error("cannot write " + (dir / rel).string());
        written.push_back(rel);
        return os;
    };
    {
        auto os = open("trajectory.txt");
        os << "mode=" << mode_name(traj.mode) << '\n'
           << "records=" << traj.snapshots.size() << '\n'
           << "T_singular=" << (traj.T_singular ? format17(*traj.T_singular) : "none") << '\n'
           << "stop=" << stop_name(traj.stop) << '\n';
    }
    {
        auto os = open("diagnostics.csv");
        write_diagnostics_csv(os, traj.diagnostics);
    }
    {
        auto os = open("diagnostics_extra.csv");
        write_extra_csv(os, traj.diagnostics);
    }
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        auto os = open(snapshot_name(i));
        write_snapshot(os, traj.snapshots[i]);
    }
    return written;
}

Trajectory load_trajectory(const fs::path& dir)
{
    std::ifstream meta(dir / "trajectory.txt");
    if (!meta)
        throw DataError("no trajectory.txt in " + dir.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(meta, line)) {
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("malformed trajectory.txt line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    for (const char* key : {"mode", "records", "T_singular", "stop"})
        if (!kv.count(key))
            throw DataError(std::string("trajectory.txt lacks '") + key + "'");

    Trajectory traj;
    std::size_t records = 0;
    try {
        traj.mode = parse_mode(kv["mode"]);
        records = std::stoul(kv["records"]);
        if (kv["T_singular"] != "none")
            traj.T_singular = std::stod(kv["T_singular"]);
    }
    catch (const DataError&) {
        throw;
    }
    catch (const std::exception& e) {
        throw DataError(std::string("bad trajectory.txt: ") + e.what());
    }
    traj.stop = parse_stop(kv["stop"]);

    std::ifstream diag(dir / "diagnostics.csv");
    if (!diag)
        throw DataError("no diagnostics.csv in " + dir.string());
    traj.diagnostics = read_diagnostics_csv(diag);
    if (traj.diagnostics.size() != records)
        throw DataError("diagnostics.csv row count does not match trajectory.txt");
    for (std::size_t i = 0; i < records; ++i) {
        traj.snapshots.push_back(read_snapshot_file((dir / snapshot_name(i)).string()));
        if (traj.snapshots.back().t != traj.diagnostics[i].t)
            throw DataError("snapshot " + std::to_string(i) + " time does not match diagnostics");
    }
    return traj;
}

}  // namespace mcf

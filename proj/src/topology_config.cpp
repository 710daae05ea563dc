#include "ksrt/topology_config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ksrt::sim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

ChainTopology parse_topology(const std::string& text) {
    std::map<std::string, std::string> entries;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("topology line " + std::to_string(line_no) +
                                        " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("topology line " + std::to_string(line_no) +
                                        " has an empty key or value");
        entries[key] = value;
    }

    auto take = [&](const std::string& key) -> std::string {
        auto it = entries.find(key);
        if (it == entries.end()) return "";
        std::string v = it->second;
        entries.erase(it);
        return v;
    };
    auto parse_model = [&](const std::string& prefix, DelayModel base) {
        DelayModel m = base;
        if (const std::string kind = take(prefix + ".kind"); !kind.empty())
            m.kind = delay_kind_from_string(kind);
        if (const std::string v = take(prefix + ".location_ns"); !v.empty())
            m.location_ns = std::stod(v);
        if (const std::string v = take(prefix + ".scale_ns"); !v.empty())
            m.scale_ns = std::stod(v);
        if (const std::string v = take(prefix + ".shape"); !v.empty())
            m.shape = std::stod(v);
        return m;
    };

    ChainTopology topo;
    for (uint32_t i = 0;; ++i) {
        const std::string prefix = "hop." + std::to_string(i);
        const bool present = std::any_of(entries.begin(), entries.end(), [&](const auto& kv) {
            return kv.first.rfind(prefix + ".", 0) == 0;
        });
        if (!present) break;
        topo.hops.push_back(parse_model(prefix, DelayModel{}));
    }
    if (topo.hops.empty())
        throw std::invalid_argument("topology defines no hops");

    topo.eve_position = 1;
    if (const std::string v = take("eve.position"); !v.empty())
        topo.eve_position = static_cast<uint32_t>(std::stoul(v));
    topo.eve_jitter = parse_model("eve.jitter", DelayModel{DelayKind::constant, 0.0, 0.0, 0.0});

    if (!entries.empty())
        throw std::invalid_argument("unknown topology key: " + entries.begin()->first);
    topo.validate();
    return topo;
}

ChainTopology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read topology from " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_topology(buffer.str());
}

std::string topology_to_text(const ChainTopology& topology) {
    std::ostringstream out;
    out.precision(17);
    for (size_t i = 0; i < topology.hops.size(); ++i) {
        const DelayModel& m = topology.hops[i];
        const std::string prefix = "hop." + std::to_string(i);
        out << prefix << ".kind = " << to_string(m.kind) << "\n";
        out << prefix << ".location_ns = " << m.location_ns << "\n";
        out << prefix << ".scale_ns = " << m.scale_ns << "\n";
        out << prefix << ".shape = " << m.shape << "\n";
    }
    out << "eve.position = " << topology.eve_position << "\n";
    out << "eve.jitter.kind = " << to_string(topology.eve_jitter.kind) << "\n";
    out << "eve.jitter.location_ns = " << topology.eve_jitter.location_ns << "\n";
    out << "eve.jitter.scale_ns = " << topology.eve_jitter.scale_ns << "\n";
    out << "eve.jitter.shape = " << topology.eve_jitter.shape << "\n";
    return out.str();
}

} // namespace ksrt::sim

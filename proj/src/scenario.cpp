#include "convtrace/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

#include "convtrace/rng.hpp"

namespace convtrace {

using json = nlohmann::ordered_json;

void ScenarioSpec::validate() const {
    if (format_version != 1) throw ScenarioError("unsupported scenario format version");
    if (name.empty()) throw ScenarioError("scenario has no name");
    topology.validate();
    ibgp.validate(topology);
    if (prefix_count < 1) throw ScenarioError("prefix_count must be >= 1");
    if (samples < 1) throw ScenarioError("samples must be >= 1");
    if (external_routes.empty()) throw ScenarioError("no external routes");
    for (const auto& er : external_routes) {
        topology.peer(er.peer); // throws on unknown peers
        if (er.as_path_len < 1) throw ScenarioError("as_path_len must be >= 1");
        if (!er.all_prefixes)
            for (PrefixId p : er.prefixes)
                if (p >= prefix_count) throw ScenarioError("external route prefix out of range");
    }
    if (event.kind != "withdraw" && event.kind != "update-worse" && event.kind != "announce")
        throw ScenarioError("unknown event kind: " + event.kind);
    topology.peer(event.peer);
    if (processing.default_cost < 1) throw ScenarioError("processing cost must be positive");
    if (processing.jitter_ppm >= 1000000) throw ScenarioError("jitter must be < 1");
    for (const auto& [name_, cost] : processing.overrides) {
        topology.router(name_);
        if (cost < 1) throw ScenarioError("processing cost must be positive");
    }
    if (probe.rate_pps <= 0 || 1000000 % probe.rate_pps != 0)
        throw ScenarioError("probe rate must be a positive divisor of 1e6 pps");
    if (probe.window_start >= 0) throw ScenarioError("probe window must start before the event");
    if (!probe.all_sources)
        for (const auto& s : probe.sources) topology.router(s);
    for (PrefixId p : probe.fixed_prefixes)
        if (p >= prefix_count) throw ScenarioError("probe prefix out of range");
    if (quiet_window < 1) throw ScenarioError("quiet window must be positive");
}

EventSpec ScenarioSpec::resolve_event(const Topology& topo) const {
    EventSpec ev;
    if (event.kind == "withdraw") ev.kind = EventSpec::Kind::Withdraw;
    else if (event.kind == "update-worse") ev.kind = EventSpec::Kind::UpdateWorse;
    else ev.kind = EventSpec::Kind::Announce;
    ev.at_peer = topo.peer(event.peer);
    if (event.all_prefixes) {
        ev.prefixes.resize(prefix_count);
        for (PrefixId p = 0; p < prefix_count; ++p) ev.prefixes[p] = p;
    } else {
        ev.prefixes = event.prefixes;
    }
    ev.time = event.time;
    ev.prepend_delta = event.prepend_delta;
    ev.announce_as_path_len = event.announce_as_path_len;
    return ev;
}

ProcessingModel ScenarioSpec::resolve_processing() const {
    ProcessingModel pm;
    pm.per_prefix_cost.assign(topology.num_routers(), processing.default_cost);
    for (const auto& [name_, cost] : processing.overrides)
        pm.per_prefix_cost[topology.router(name_)] = cost;
    pm.jitter_ppm = processing.jitter_ppm;
    return pm;
}

std::vector<ExternalRoute> ScenarioSpec::resolve_external_routes() const {
    std::vector<ExternalRoute> out;
    for (const auto& er : external_routes) {
        const PeerId peer = topology.peer(er.peer);
        if (er.all_prefixes) {
            for (PrefixId p = 0; p < prefix_count; ++p)
                out.push_back({peer, p, er.as_path_len});
        } else {
            for (PrefixId p : er.prefixes) out.push_back({peer, p, er.as_path_len});
        }
    }
    return out;
}

std::vector<RouterId> ScenarioSpec::resolve_sources() const {
    std::vector<RouterId> out;
    if (probe.all_sources) {
        out.resize(topology.num_routers());
        for (RouterId r = 0; r < out.size(); ++r) out[r] = r;
    } else {
        for (const auto& s : probe.sources) out.push_back(topology.router(s));
    }
    return out;
}

std::vector<PrefixId> ScenarioSpec::resolve_probe_prefixes(std::uint64_t sample_seed) const {
    if (!probe.fixed_prefixes.empty()) return probe.fixed_prefixes;
    const std::size_t want = std::min<std::size_t>(probe.sample_prefixes, prefix_count);
    // partial Fisher-Yates over the prefix universe, seeded per sample
    std::vector<PrefixId> universe(prefix_count);
    for (PrefixId p = 0; p < prefix_count; ++p) universe[p] = p;
    Rng rng(Rng::mix(seed, sample_seed));
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(universe.size() - i));
        std::swap(universe[i], universe[j]);
    }
    universe.resize(want);
    std::sort(universe.begin(), universe.end());
    return universe;
}

namespace {

json topology_to_json(const Topology& t) {
    json j;
    j["routers"] = t.routers;
    j["links"] = json::array();
    for (const auto& l : t.links)
        j["links"].push_back({{"a", t.routers[l.a]},
                              {"b", t.routers[l.b]},
                              {"delay_us", l.delay},
                              {"igp_cost", l.cost}});
    j["external_peers"] = json::array();
    for (const auto& p : t.peers)
        j["external_peers"].push_back(
            {{"peer", p.name}, {"attached_to", t.routers[p.attached_to]}, {"delay_us", p.delay}});
    return j;
}

Topology topology_from_json(const json& j) {
    Topology t;
    t.routers = j.at("routers").get<std::vector<std::string>>();
    for (const auto& l : j.at("links"))
        t.links.push_back({t.router(l.at("a").get<std::string>()),
                           t.router(l.at("b").get<std::string>()),
                           l.at("delay_us").get<MicroSec>(), l.at("igp_cost").get<std::int64_t>()});
    for (const auto& p : j.value("external_peers", json::array()))
        t.peers.push_back({p.at("peer").get<std::string>(),
                           t.router(p.at("attached_to").get<std::string>()),
                           p.at("delay_us").get<MicroSec>()});
    return t;
}

json prefix_selector(bool all, const std::vector<PrefixId>& list) {
    if (all) return json("all");
    return json(list);
}

void parse_prefix_selector(const json& j, bool& all, std::vector<PrefixId>& list) {
    if (j.is_string()) {
        if (j.get<std::string>() != "all") throw ScenarioError("bad prefix selector");
        all = true;
        list.clear();
        return;
    }
    all = false;
    list = j.get<std::vector<PrefixId>>();
}

} // namespace

std::string scenario_to_json(const ScenarioSpec& s) {
    json j;
    j["format_version"] = s.format_version;
    j["name"] = s.name;
    j["topology"] = topology_to_json(s.topology);
    if (s.ibgp.mode == IbgpConfig::Mode::FullMesh) {
        j["ibgp"] = {{"mode", "full-mesh"}};
    } else {
        std::vector<std::string> names;
        for (RouterId r : s.ibgp.reflectors) names.push_back(s.topology.routers[r]);
        j["ibgp"] = {{"mode", "route-reflection"}, {"reflectors", names}};
    }
    j["prefix_count"] = s.prefix_count;
    j["external_routes"] = json::array();
    for (const auto& er : s.external_routes)
        j["external_routes"].push_back({{"peer", er.peer},
                                        {"as_path_len", er.as_path_len},
                                        {"prefixes", prefix_selector(er.all_prefixes, er.prefixes)}});
    j["event"] = {{"kind", s.event.kind},
                  {"peer", s.event.peer},
                  {"prefixes", prefix_selector(s.event.all_prefixes, s.event.prefixes)},
                  {"time_us", s.event.time},
                  {"prepend_delta", s.event.prepend_delta},
                  {"announce_as_path_len", s.event.announce_as_path_len}};
    json overrides = json::object();
    for (const auto& [name, cost] : s.processing.overrides) overrides[name] = cost;
    j["processing"] = {{"default_cost_us", s.processing.default_cost},
                       {"overrides", overrides},
                       {"jitter_ppm", s.processing.jitter_ppm}};
    j["probe"] = {{"rate_pps", s.probe.rate_pps},
                  {"sources", s.probe.all_sources ? json("all") : json(s.probe.sources)},
                  {"sample_prefixes", s.probe.sample_prefixes},
                  {"fixed_prefixes", s.probe.fixed_prefixes},
                  {"window_start_us", s.probe.window_start},
                  {"window_end_us", s.probe.window_end ? json(*s.probe.window_end) : json()},
                  {"ttl", s.probe.ttl},
                  {"rpf_drop", s.probe.rpf_drop}};
    j["samples"] = s.samples;
    j["seed"] = s.seed;
    j["quiet_window_us"] = s.quiet_window;
    return j.dump(2) + "\n";
}

ScenarioSpec scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("malformed scenario JSON: ") + e.what());
    }
    ScenarioSpec s;
    try {
        s.format_version = j.at("format_version").get<int>();
        s.name = j.at("name").get<std::string>();
        s.topology = topology_from_json(j.at("topology"));
        const auto& ib = j.at("ibgp");
        const std::string mode = ib.at("mode").get<std::string>();
        if (mode == "full-mesh") {
            s.ibgp.mode = IbgpConfig::Mode::FullMesh;
        } else if (mode == "route-reflection") {
            s.ibgp.mode = IbgpConfig::Mode::RouteReflection;
            for (const auto& n : ib.at("reflectors"))
                s.ibgp.reflectors.push_back(s.topology.router(n.get<std::string>()));
        } else {
            throw ScenarioError("unknown ibgp mode: " + mode);
        }
        s.prefix_count = j.at("prefix_count").get<std::size_t>();
        for (const auto& er : j.at("external_routes")) {
            ExternalRouteSpec e;
            e.peer = er.at("peer").get<std::string>();
            e.as_path_len = er.at("as_path_len").get<int>();
            parse_prefix_selector(er.at("prefixes"), e.all_prefixes, e.prefixes);
            s.external_routes.push_back(e);
        }
        const auto& ev = j.at("event");
        s.event.kind = ev.at("kind").get<std::string>();
        s.event.peer = ev.at("peer").get<std::string>();
        parse_prefix_selector(ev.at("prefixes"), s.event.all_prefixes, s.event.prefixes);
        s.event.time = ev.value("time_us", MicroSec{0});
        s.event.prepend_delta = ev.value("prepend_delta", 2);
        s.event.announce_as_path_len = ev.value("announce_as_path_len", 1);
        const auto& pr = j.at("processing");
        s.processing.default_cost = pr.at("default_cost_us").get<MicroSec>();
        for (auto it = pr.at("overrides").begin(); it != pr.at("overrides").end(); ++it)
            s.processing.overrides.push_back({it.key(), it.value().get<MicroSec>()});
        s.processing.jitter_ppm = pr.value("jitter_ppm", 0u);
        const auto& pb = j.at("probe");
        s.probe.rate_pps = pb.at("rate_pps").get<int>();
        if (pb.at("sources").is_string()) {
            s.probe.all_sources = true;
        } else {
            s.probe.all_sources = false;
            s.probe.sources = pb.at("sources").get<std::vector<std::string>>();
        }
        s.probe.sample_prefixes = pb.value("sample_prefixes", std::size_t{10});
        s.probe.fixed_prefixes = pb.value("fixed_prefixes", std::vector<PrefixId>{});
        s.probe.window_start = pb.at("window_start_us").get<MicroSec>();
        if (pb.contains("window_end_us") && !pb.at("window_end_us").is_null())
            s.probe.window_end = pb.at("window_end_us").get<MicroSec>();
        s.probe.ttl = pb.value("ttl", 64);
        s.probe.rpf_drop = pb.value("rpf_drop", true);
        s.samples = j.at("samples").get<std::size_t>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.quiet_window = j.value("quiet_window_us", sec(10));
    } catch (const ScenarioError&) {
        throw;
    } catch (const ModelError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("invalid scenario: ") + e.what());
    }
    s.validate();
    return s;
}

ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot read scenario file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scenario_from_json(text);
}

void save_scenario(const std::string& path, const ScenarioSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write scenario file: " + path);
    out << scenario_to_json(spec);
}

std::string scenario_hash(const ScenarioSpec& spec) {
    const std::string canon = scenario_to_json(spec);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- presets --------------------------------------------------------------

ScenarioSpec preset_path3(MicroSec processing_cost) {
    ScenarioSpec s;
    s.name = "path3-withdraw";
    s.topology.routers = {"r1", "r2", "r3"};
    s.topology.links = {{0, 1, ms(10), 1}, {1, 2, ms(10), 1}};
    s.topology.peers = {{"e1", 0, ms(10)}, {"e3", 2, ms(10)}};
    s.ibgp.mode = IbgpConfig::Mode::FullMesh;
    s.prefix_count = 1;
    s.external_routes = {{"e1", 2, true, {}}, {"e3", 3, true, {}}};
    s.event = {"withdraw", "e1", true, {}, 0, 2, 1};
    s.processing.default_cost = processing_cost;
    s.probe.rate_pps = 1000;
    s.probe.window_start = -sec(1) - ms(500);
    s.samples = 1;
    s.seed = 7;
    s.quiet_window = sec(2);
    return s;
}

ScenarioSpec preset_path3_backup_middle(MicroSec processing_cost) {
    ScenarioSpec s = preset_path3(processing_cost);
    s.name = "path3-backup-middle";
    // backup egress moves from the far end to the middle router
    s.topology.peers = {{"e1", 0, ms(10)}, {"e2", 1, ms(10)}};
    s.external_routes = {{"e1", 2, true, {}}, {"e2", 3, true, {}}};
    return s;
}

ScenarioSpec preset_abilene(const AbileneOptions& opt) {
    ScenarioSpec s;
    // Declaration order fixes the deterministic id tie-breaks; LosAngeles
    // precedes KansasCity so equal-IGP-cost routers keep LA as their initial
    // egress.
    s.topology.routers = {"Seattle",      "Sunnyvale", "LosAngeles",   "Denver",
                          "Houston",      "KansasCity", "Indianapolis", "Atlanta",
                          "Chicago",      "WashingtonDC", "NewYork"};
    auto R = [&](const char* n) { return s.topology.router(n); };
    auto L = [&](const char* a, const char* b, MicroSec d) {
        s.topology.links.push_back({R(a), R(b), d, 1});
    };
    // link delays proportional to geographic distance (~5 us/km)
    L("Seattle", "Sunnyvale", 5693);
    L("Seattle", "Denver", 8204);
    L("Sunnyvale", "LosAngeles", 2516);
    L("Sunnyvale", "Denver", 7516);
    L("LosAngeles", "Houston", 11031);
    L("Denver", "KansasCity", 4483);
    L("Houston", "KansasCity", 5205);
    L("Houston", "Atlanta", 5641);
    L("KansasCity", "Indianapolis", 3634);
    L("Indianapolis", "Atlanta", 3438);
    L("Indianapolis", "Chicago", 1326);
    L("Atlanta", "WashingtonDC", 4364);
    L("Chicago", "NewYork", 5721);
    L("WashingtonDC", "NewYork", 1638);

    s.topology.peers = {{"ext-LosAngeles", R("LosAngeles"), 500},
                        {"ext-backup", R(opt.backup_at.c_str()), 500}};

    if (opt.reflectors.empty()) {
        s.ibgp.mode = IbgpConfig::Mode::FullMesh;
    } else {
        s.ibgp.mode = IbgpConfig::Mode::RouteReflection;
        for (const auto& n : opt.reflectors) s.ibgp.reflectors.push_back(R(n.c_str()));
    }

    s.prefix_count = opt.prefixes;
    const int backup_len = opt.visible_backup ? 2 : 3;

    s.event.peer = "ext-LosAngeles";
    s.event.kind = opt.event;
    if (opt.event == "announce") {
        // Only the backup egress holds the prefixes initially; the event
        // introduces a shorter path at LA.
        s.external_routes = {{"ext-backup", 2, true, {}}};
        s.event.announce_as_path_len = 1;
    } else {
        s.external_routes = {{"ext-LosAngeles", 2, true, {}}, {"ext-backup", backup_len, true, {}}};
        s.event.prepend_delta = 2;
    }

    s.processing.default_cost = opt.processing_cost;
    s.processing.jitter_ppm = opt.jitter_ppm;
    s.probe.rate_pps = 1000;
    s.probe.sample_prefixes = 10;
    s.probe.window_start = -sec(1) - ms(500);
    s.samples = 1;
    s.seed = 42;
    s.quiet_window = sec(2);

    std::string suffix = opt.event;
    if (opt.visible_backup) suffix += "-visible";
    if (!opt.reflectors.empty()) {
        suffix += "-rr";
        for (const auto& n : opt.reflectors) suffix += "-" + n;
    }
    if (opt.backup_at != "KansasCity") suffix += "-backup-" + opt.backup_at;
    s.name = "abilene-" + suffix + "-" + std::to_string(opt.prefixes);
    return s;
}

std::vector<std::pair<std::string, ScenarioSpec>> shipped_presets() {
    std::vector<std::pair<std::string, ScenarioSpec>> out;
    out.push_back({"path3-withdraw.json", preset_path3()});
    out.push_back({"path3-backup-middle.json", preset_path3_backup_middle()});

    AbileneOptions def;
    out.push_back({"abilene-withdraw-10k.json", preset_abilene(def)});

    AbileneOptions small = def;
    small.prefixes = 100;
    out.push_back({"abilene-withdraw-100.json", preset_abilene(small)});

    AbileneOptions one = def;
    one.prefixes = 1;
    one.processing_cost = ms(100);
    out.push_back({"abilene-withdraw-1.json", preset_abilene(one)});

    AbileneOptions uw = small;
    uw.event = "update-worse";
    out.push_back({"abilene-update-worse-100.json", preset_abilene(uw)});

    AbileneOptions uwv = uw;
    uwv.visible_backup = true;
    out.push_back({"abilene-update-worse-visible-100.json", preset_abilene(uwv)});

    AbileneOptions an = small;
    an.event = "announce";
    out.push_back({"abilene-announce-100.json", preset_abilene(an)});

    AbileneOptions wv = small;
    wv.visible_backup = true;
    out.push_back({"abilene-withdraw-visible-100.json", preset_abilene(wv)});

    AbileneOptions rr1 = small;
    rr1.reflectors = {"Atlanta"};
    out.push_back({"abilene-rr-atlanta-100.json", preset_abilene(rr1)});

    AbileneOptions rr2 = small;
    rr2.reflectors = {"Atlanta", "NewYork"};
    out.push_back({"abilene-rr-atlanta-newyork-100.json", preset_abilene(rr2)});

    AbileneOptions rr3 = small;
    rr3.reflectors = {"Atlanta", "NewYork", "Seattle"};
    out.push_back({"abilene-rr-atlanta-newyork-seattle-100.json", preset_abilene(rr3)});

    AbileneOptions bk = small;
    bk.backup_at = "NewYork";
    out.push_back({"abilene-withdraw-backup-newyork-100.json", preset_abilene(bk)});

    AbileneOptions bk2 = small;
    bk2.backup_at = "Sunnyvale";
    out.push_back({"abilene-withdraw-backup-sunnyvale-100.json", preset_abilene(bk2)});
    return out;
}

} // namespace convtrace

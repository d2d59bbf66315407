#include "convtrace/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"

namespace convtrace {

bool TraceRecord::operator==(const TraceRecord& o) const {
    if (ts != o.ts || kind != o.kind) return false;
    switch (kind) {
    case Kind::Probe:
        return link_from == o.link_from && link_to == o.link_to && stage == o.stage &&
               probe_src == o.probe_src && prefix == o.prefix && seq == o.seq && ttl == o.ttl;
    case Kind::Bgp:
        return link_from == o.link_from && link_to == o.link_to && stage == o.stage &&
               bgp_kind == o.bgp_kind && has_prefix == o.has_prefix &&
               (!has_prefix || prefix == o.prefix) && sess_from == o.sess_from &&
               sess_to == o.sess_to;
    case Kind::Summary:
        return drops == o.drops;
    }
    return false;
}

NodeId router_node(const Topology&, RouterId r) { return r; }
NodeId peer_node(const Topology& topo, PeerId p) {
    return static_cast<NodeId>(topo.num_routers()) + p;
}
NodeId prober_node(const Topology& topo) {
    return static_cast<NodeId>(topo.num_routers() + topo.num_peers());
}

std::optional<MicroSec> HardwareMapping::link_delay(NodeId a, NodeId b) const {
    for (const auto& l : links) {
        if ((l.from == a && l.to == b) || (l.from == b && l.to == a)) return l.delay;
    }
    return std::nullopt;
}

std::optional<std::string> HardwareMapping::node_name(NodeId id) const {
    for (const auto& [name, nid] : routers)
        if (nid == id) return name;
    for (const auto& [name, nid] : peers)
        if (nid == id) return name;
    if (id == prober) return std::string("prober");
    return std::nullopt;
}

void HardwareMapping::validate() const {
    std::set<NodeId> ids;
    for (const auto& [name, id] : routers)
        if (!ids.insert(id).second) throw TraceError("duplicate node id in mapping");
    for (const auto& [name, id] : peers)
        if (!ids.insert(id).second) throw TraceError("duplicate node id in mapping");
    if (!ids.insert(prober).second) throw TraceError("prober id collides in mapping");
    for (const auto& l : links) {
        if (!ids.count(l.from) || !ids.count(l.to))
            throw TraceError("mapping link references unknown node id");
        if (l.delay < 0) throw TraceError("negative link delay in mapping");
    }
}

HardwareMapping HardwareMapping::from_topology(const Topology& topo) {
    HardwareMapping m;
    for (std::size_t r = 0; r < topo.num_routers(); ++r)
        m.routers[topo.routers[r]] = static_cast<NodeId>(r);
    for (std::size_t p = 0; p < topo.num_peers(); ++p)
        m.peers[topo.peers[p].name] = peer_node(topo, static_cast<PeerId>(p));
    m.prober = prober_node(topo);
    for (const auto& l : topo.links) m.links.push_back({l.a, l.b, l.delay});
    for (std::size_t p = 0; p < topo.num_peers(); ++p)
        m.links.push_back({peer_node(topo, static_cast<PeerId>(p)), topo.peers[p].attached_to,
                           topo.peers[p].delay});
    for (std::size_t r = 0; r < topo.num_routers(); ++r)
        m.links.push_back({m.prober, static_cast<NodeId>(r), 0});
    return m;
}

void write_mapping(const std::string& path, const HardwareMapping& m) {
    nlohmann::ordered_json j;
    j["format_version"] = m.format_version;
    j["routers"] = nlohmann::ordered_json::object();
    for (const auto& [name, id] : m.routers) j["routers"][name] = id;
    j["peers"] = nlohmann::ordered_json::object();
    for (const auto& [name, id] : m.peers) j["peers"][name] = id;
    j["prober"] = m.prober;
    j["links"] = nlohmann::ordered_json::array();
    for (const auto& l : m.links)
        j["links"].push_back({{"from", l.from}, {"to", l.to}, {"delay_us", l.delay}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceError("cannot write mapping file: " + path);
    out << j.dump(2) << "\n";
}

HardwareMapping read_mapping(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot read mapping file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw TraceError(std::string("malformed mapping file: ") + e.what());
    }
    HardwareMapping m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1) throw TraceError("unsupported mapping format version");
    for (auto it = j.at("routers").begin(); it != j.at("routers").end(); ++it)
        m.routers[it.key()] = it.value().get<NodeId>();
    for (auto it = j.at("peers").begin(); it != j.at("peers").end(); ++it)
        m.peers[it.key()] = it.value().get<NodeId>();
    m.prober = j.at("prober").get<NodeId>();
    for (const auto& l : j.at("links"))
        m.links.push_back({l.at("from").get<NodeId>(), l.at("to").get<NodeId>(),
                           l.at("delay_us").get<MicroSec>()});
    m.validate();
    return m;
}

namespace {

const char* stage_str(TraceRecord::Stage s) {
    switch (s) {
    case TraceRecord::Stage::Pre: return "pre";
    case TraceRecord::Stage::Post: return "post";
    case TraceRecord::Stage::Undelayed: return "und";
    }
    return "?";
}

const char* bgp_str(TraceRecord::BgpKind k) {
    switch (k) {
    case TraceRecord::BgpKind::Update: return "update";
    case TraceRecord::BgpKind::Withdraw: return "withdraw";
    case TraceRecord::BgpKind::KeepAlive: return "keepalive";
    }
    return "?";
}

void append_int(std::string& s, std::int64_t v) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    s.append(buf, p);
}

} // namespace

std::string record_to_line(const TraceRecord& r) {
    std::string s;
    s.reserve(96);
    s += "ts=";
    append_int(s, r.ts);
    switch (r.kind) {
    case TraceRecord::Kind::Probe:
        s += " kind=probe link=";
        append_int(s, r.link_from);
        s += '-';
        append_int(s, r.link_to);
        s += " stage=";
        s += stage_str(r.stage);
        s += " src=";
        append_int(s, r.probe_src);
        s += " prefix=";
        append_int(s, r.prefix);
        s += " seq=";
        append_int(s, r.seq);
        s += " ttl=";
        append_int(s, r.ttl);
        break;
    case TraceRecord::Kind::Bgp:
        s += " kind=bgp link=";
        append_int(s, r.link_from);
        s += '-';
        append_int(s, r.link_to);
        s += " stage=";
        s += stage_str(r.stage);
        s += " msg=";
        s += bgp_str(r.bgp_kind);
        s += " prefix=";
        if (r.has_prefix) append_int(s, r.prefix);
        else s += '-';
        s += " from=";
        append_int(s, r.sess_from);
        s += " to=";
        append_int(s, r.sess_to);
        break;
    case TraceRecord::Kind::Summary:
        s += " kind=summary drops=";
        append_int(s, r.drops);
        break;
    }
    return s;
}

namespace {

struct LineParser {
    const std::string& line;
    std::size_t lineno;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw TraceError("trace line " + std::to_string(lineno) + ": " + why);
    }

    // expects "key=" then returns the value token
    std::string_view value(const char* key) {
        const std::size_t klen = std::strlen(key);
        if (line.compare(pos, klen, key) != 0 || pos + klen >= line.size() ||
            line[pos + klen] != '=')
            fail(std::string("expected field '") + key + "'");
        pos += klen + 1;
        std::size_t end = line.find(' ', pos);
        if (end == std::string::npos) end = line.size();
        std::string_view v(line.data() + pos, end - pos);
        pos = end < line.size() ? end + 1 : end;
        return v;
    }

    std::int64_t value_int(const char* key) {
        std::string_view v = value(key);
        std::int64_t out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size())
            fail(std::string("field '") + key + "' is not an integer");
        return out;
    }
};

} // namespace

TraceRecord record_from_line(const std::string& line, std::size_t lineno) {
    LineParser p{line, lineno};
    TraceRecord r;
    r.ts = p.value_int("ts");
    std::string_view kind = p.value("kind");
    if (kind == "summary") {
        r.kind = TraceRecord::Kind::Summary;
        r.drops = p.value_int("drops");
        return r;
    }
    std::string_view link = p.value("link");
    const std::size_t dash = link.find('-');
    if (dash == std::string_view::npos) p.fail("link must be <from>-<to>");
    {
        std::uint32_t a = 0, b = 0;
        auto [p1, e1] = std::from_chars(link.data(), link.data() + dash, a);
        auto [p2, e2] = std::from_chars(link.data() + dash + 1, link.data() + link.size(), b);
        if (e1 != std::errc() || e2 != std::errc()) p.fail("bad link endpoints");
        r.link_from = a;
        r.link_to = b;
    }
    std::string_view stage = p.value("stage");
    if (stage == "pre") r.stage = TraceRecord::Stage::Pre;
    else if (stage == "post") r.stage = TraceRecord::Stage::Post;
    else if (stage == "und") r.stage = TraceRecord::Stage::Undelayed;
    else p.fail("unknown stage");

    if (kind == "probe") {
        r.kind = TraceRecord::Kind::Probe;
        r.probe_src = static_cast<NodeId>(p.value_int("src"));
        r.prefix = static_cast<PrefixId>(p.value_int("prefix"));
        r.seq = p.value_int("seq");
        r.ttl = static_cast<int>(p.value_int("ttl"));
    } else if (kind == "bgp") {
        r.kind = TraceRecord::Kind::Bgp;
        std::string_view msg = p.value("msg");
        if (msg == "update") r.bgp_kind = TraceRecord::BgpKind::Update;
        else if (msg == "withdraw") r.bgp_kind = TraceRecord::BgpKind::Withdraw;
        else if (msg == "keepalive") r.bgp_kind = TraceRecord::BgpKind::KeepAlive;
        else p.fail("unknown bgp message kind");
        std::string_view pfx = p.value("prefix");
        if (pfx == "-") {
            r.has_prefix = false;
        } else {
            std::uint32_t v = 0;
            auto [pp, ec] = std::from_chars(pfx.data(), pfx.data() + pfx.size(), v);
            if (ec != std::errc()) p.fail("bad prefix");
            r.prefix = v;
            r.has_prefix = true;
        }
        r.sess_from = static_cast<NodeId>(p.value_int("from"));
        r.sess_to = static_cast<NodeId>(p.value_int("to"));
    } else {
        p.fail("unknown record kind");
    }
    return r;
}

std::string twin_identity(const TraceRecord& r) {
    // record line minus the timestamp and stage fields
    std::string s = record_to_line(r);
    s.erase(0, s.find(' ') + 1);
    const std::size_t st = s.find("stage=");
    if (st != std::string::npos) {
        const std::size_t ste = s.find(' ', st);
        s.erase(st, ste == std::string::npos ? std::string::npos : ste - st + 1);
    }
    return s;
}

void write_trace(const std::string& path, const std::vector<TraceRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceError("cannot write trace file: " + path);
    std::string buf;
    buf.reserve(1 << 20);
    buf += kTraceHeader;
    buf += '\n';
    for (const auto& r : records) {
        buf += record_to_line(r);
        buf += '\n';
        if (buf.size() > (1 << 20) - 256) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw TraceError("short write on trace file: " + path);
}

void for_each_record(const std::string& path,
                     const std::function<void(const TraceRecord&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot read trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw TraceError("empty trace file");
    if (line != kTraceHeader) throw TraceError("trace format version mismatch");
    std::size_t lineno = 1;
    bool saw_summary = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        TraceRecord r = record_from_line(line, lineno);
        if (saw_summary)
            throw TraceError("trace line " + std::to_string(lineno) +
                             ": record after the summary");
        if (r.kind == TraceRecord::Kind::Summary) saw_summary = true;
        fn(r);
    }
    if (!saw_summary) throw TraceError("incomplete trace: missing summary record");
}

std::vector<TraceRecord> read_trace(const std::string& path) {
    std::vector<TraceRecord> out;
    for_each_record(path, [&](const TraceRecord& r) { out.push_back(r); });
    return out;
}

std::vector<Finding> validate_trace(const std::vector<TraceRecord>& records,
                                    const HardwareMapping& mapping) {
    std::vector<Finding> findings;
    auto note = [&](std::size_t idx, std::string what) {
        findings.push_back({idx, std::move(what)});
    };

    std::set<NodeId> known;
    for (const auto& [n, id] : mapping.routers) known.insert(id);
    for (const auto& [n, id] : mapping.peers) known.insert(id);
    known.insert(mapping.prober);

    std::map<std::pair<NodeId, NodeId>, MicroSec> link_delay;
    for (const auto& l : mapping.links) {
        link_delay[{l.from, l.to}] = l.delay;
        link_delay[{l.to, l.from}] = l.delay;
    }

    std::map<std::pair<NodeId, NodeId>, MicroSec> last_ts;
    // probe duplicate detection: (key, link, stage)
    std::set<std::tuple<NodeId, PrefixId, std::int64_t, NodeId, NodeId, int>> seen_probe;
    // pre/post twinning per link+identity
    std::map<std::string, std::int64_t> pre_minus_post;

    std::size_t summary_count = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TraceRecord& r = records[i];
        if (r.kind == TraceRecord::Kind::Summary) {
            ++summary_count;
            if (i + 1 != records.size()) note(i, "summary record is not last");
            continue;
        }
        if (!known.count(r.link_from) || !known.count(r.link_to)) {
            note(i, "record references an unknown node id");
            continue;
        }
        auto ld = link_delay.find({r.link_from, r.link_to});
        if (ld == link_delay.end()) {
            note(i, "record references an unknown link");
            continue;
        }

        auto [it, inserted] = last_ts.insert({{r.link_from, r.link_to}, r.ts});
        if (!inserted) {
            if (r.ts < it->second) note(i, "timestamps not monotone on link");
            it->second = std::max(it->second, r.ts);
        }

        if (r.kind == TraceRecord::Kind::Probe) {
            auto key = std::make_tuple(r.probe_src, r.prefix, r.seq, r.link_from, r.link_to,
                                       static_cast<int>(r.stage));
            if (!seen_probe.insert(key).second) note(i, "duplicate probe observation");
        }

        if (ld->second > 0) {
            // delayed link: account pre/post twinning by identity
            if (r.stage == TraceRecord::Stage::Pre) pre_minus_post[twin_identity(r)]++;
            else if (r.stage == TraceRecord::Stage::Post) pre_minus_post[twin_identity(r)]--;
            else note(i, "undelayed record on a delayed link");
        }
    }
    if (summary_count == 0) findings.push_back({records.size(), "missing summary record"});
    if (summary_count > 1) findings.push_back({records.size(), "multiple summary records"});
    for (const auto& [ident, balance] : pre_minus_post) {
        if (balance > 0) findings.push_back({records.size(), "pre record without post twin: " + ident});
        if (balance < 0) findings.push_back({records.size(), "post record without pre twin: " + ident});
    }
    return findings;
}

TraceBuild build_trace(const Topology& topo, const IgpState& igp,
                       const std::vector<BgpMessage>& messages,
                       const std::vector<ProbeFate>& fates) {
    TraceBuild tb;
    auto& recs = tb.records;

    for (const auto& m : messages) {
        TraceRecord base;
        base.kind = TraceRecord::Kind::Bgp;
        base.bgp_kind = m.kind == BgpMessage::Kind::Update ? TraceRecord::BgpKind::Update
                                                           : TraceRecord::BgpKind::Withdraw;
        base.has_prefix = true;
        base.prefix = m.prefix;
        base.sess_from = m.from.is_peer ? peer_node(topo, m.from.id) : router_node(topo, m.from.id);
        base.sess_to = m.to.is_peer ? peer_node(topo, m.to.id) : router_node(topo, m.to.id);

        if (m.from.is_peer) {
            // single external link
            TraceRecord r = base;
            r.link_from = peer_node(topo, m.from.id);
            r.link_to = router_node(topo, m.to.id);
            r.stage = TraceRecord::Stage::Pre;
            r.ts = m.sent_at;
            recs.push_back(r);
            r.stage = TraceRecord::Stage::Post;
            r.ts = m.arrives_at;
            recs.push_back(r);
            continue;
        }
        // iBGP message rides the IGP path hop by hop
        RouterId at = m.from.id;
        MicroSec t = m.sent_at;
        while (at != m.to.id) {
            const RouterId next = igp.next_hop(at, m.to.id);
            const MicroSec d = link_delay(topo, at, next);
            TraceRecord r = base;
            r.link_from = router_node(topo, at);
            r.link_to = router_node(topo, next);
            r.stage = TraceRecord::Stage::Pre;
            r.ts = t;
            recs.push_back(r);
            r.stage = TraceRecord::Stage::Post;
            r.ts = t + d;
            recs.push_back(r);
            t += d;
            at = next;
        }
    }

    const NodeId prober = prober_node(topo);
    for (const auto& f : fates) {
        TraceRecord base;
        base.kind = TraceRecord::Kind::Probe;
        base.probe_src = router_node(topo, f.src);
        base.prefix = f.prefix;
        base.seq = f.seq;

        TraceRecord inj = base;
        inj.link_from = prober;
        inj.link_to = router_node(topo, f.src);
        inj.stage = TraceRecord::Stage::Undelayed;
        inj.ts = f.departed_at;
        inj.ttl = f.ttl;
        recs.push_back(inj);

        for (std::size_t i = 0; i + 1 < f.hops.size(); ++i) {
            TraceRecord r = base;
            r.link_from = router_node(topo, f.hops[i].router);
            r.link_to = router_node(topo, f.hops[i + 1].router);
            r.ttl = f.ttl - static_cast<int>(i) - 1;
            r.stage = TraceRecord::Stage::Pre;
            r.ts = f.hops[i].arrived_at;
            recs.push_back(r);
            r.stage = TraceRecord::Stage::Post;
            r.ts = f.hops[i + 1].arrived_at;
            recs.push_back(r);
        }
        if (f.terminal == ProbeFate::Terminal::Delivered ||
            f.terminal == ProbeFate::Terminal::DroppedInactivePeer) {
            TraceRecord r = base;
            r.link_from = router_node(topo, f.hops.back().router);
            r.link_to = peer_node(topo, f.peer);
            r.ttl = f.ttl - static_cast<int>(f.hops.size()) + 1;
            r.stage = TraceRecord::Stage::Pre;
            r.ts = f.hops.back().arrived_at;
            recs.push_back(r);
            r.stage = TraceRecord::Stage::Post;
            r.ts = f.terminal_at;
            recs.push_back(r);
        }
    }

    std::stable_sort(recs.begin(), recs.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return a.ts < b.ts; });

    TraceRecord summary;
    summary.kind = TraceRecord::Kind::Summary;
    summary.ts = recs.empty() ? 0 : recs.back().ts;
    summary.drops = 0;
    recs.push_back(summary);
    return tb;
}

} // namespace convtrace

#include "convtrace/report.hpp"

#include <fstream>

#include "json.hpp"

namespace convtrace {

using json = nlohmann::ordered_json;

namespace {

json summary_to_json(const PercentileSummary& s) {
    return {{"q5_us", s.q5}, {"q25_us", s.q25}, {"q50_us", s.q50},
            {"q75_us", s.q75}, {"q95_us", s.q95}, {"n", s.n}};
}

PercentileSummary summary_from_json(const json& j) {
    PercentileSummary s;
    s.q5 = j.at("q5_us").get<MicroSec>();
    s.q25 = j.at("q25_us").get<MicroSec>();
    s.q50 = j.at("q50_us").get<MicroSec>();
    s.q75 = j.at("q75_us").get<MicroSec>();
    s.q95 = j.at("q95_us").get<MicroSec>();
    s.n = j.at("n").get<std::size_t>();
    return s;
}

} // namespace

std::string report_to_json(const ExperimentReport& rep) {
    json j;
    j["format_version"] = rep.format_version;
    j["tool_version"] = rep.tool_version;
    j["scenario_name"] = rep.scenario_name;
    j["scenario_hash"] = rep.scenario_hash;
    j["seed"] = rep.seed;
    j["samples"] = rep.samples;
    j["excluded_samples"] = rep.excluded_samples;

    j["sample_reports"] = json::array();
    for (const auto& s : rep.sample_reports) {
        json js;
        js["sample"] = s.index;
        js["seed"] = s.seed;
        js["valid"] = s.valid;
        if (!s.valid) js["invalid_reason"] = s.invalid_reason;
        js["converged_at_us"] = s.converged_at;
        js["last_fib_change_us"] = s.last_fib_change;
        js["pairs"] = json::array();
        for (const auto& p : s.pairs) {
            json jp;
            jp["router"] = p.src;
            jp["prefix"] = p.prefix;
            json ivs = json::array();
            for (const auto& iv : p.exact) ivs.push_back({iv.start, iv.end});
            jp["exact_intervals_us"] = ivs;
            jp["exact_total_us"] = p.exact_total;
            jp["alt_exact_total_us"] = p.alt_exact_total;
            jp["probe_dropped"] = p.probe_dropped;
            jp["probe_estimate_us"] = p.probe_estimate;
            jp["rate_pps"] = p.rate_pps;
            js["pairs"].push_back(jp);
        }
        j["sample_reports"].push_back(js);
    }

    j["per_router_exact"] = json::object();
    for (const auto& [r, s] : rep.per_router_exact) j["per_router_exact"][r] = summary_to_json(s);
    j["per_router_probe"] = json::object();
    for (const auto& [r, s] : rep.per_router_probe) j["per_router_probe"][r] = summary_to_json(s);
    j["pooled_exact"] = rep.pooled_exact.n ? summary_to_json(rep.pooled_exact) : json();
    j["pooled_probe"] = rep.pooled_probe.n ? summary_to_json(rep.pooled_probe) : json();

    j["propagation_delay_us"] = json::object();
    for (const auto& [r, d] : rep.propagation_delay) j["propagation_delay_us"][r] = d;
    return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("malformed report JSON: ") + e.what());
    }
    ExperimentReport rep;
    rep.format_version = j.at("format_version").get<int>();
    if (rep.format_version != kReportFormatVersion)
        throw ScenarioError("report format version mismatch");
    rep.tool_version = j.at("tool_version").get<std::string>();
    rep.scenario_name = j.at("scenario_name").get<std::string>();
    rep.scenario_hash = j.at("scenario_hash").get<std::string>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.samples = j.at("samples").get<std::size_t>();
    rep.excluded_samples = j.at("excluded_samples").get<std::vector<std::size_t>>();
    for (const auto& js : j.at("sample_reports")) {
        SampleReport s;
        s.index = js.at("sample").get<std::size_t>();
        s.seed = js.at("seed").get<std::uint64_t>();
        s.valid = js.at("valid").get<bool>();
        if (js.contains("invalid_reason")) s.invalid_reason = js.at("invalid_reason");
        s.converged_at = js.at("converged_at_us").get<MicroSec>();
        s.last_fib_change = js.at("last_fib_change_us").get<MicroSec>();
        for (const auto& jp : js.at("pairs")) {
            PairViolation p;
            p.src = jp.at("router").get<RouterId>();
            p.prefix = jp.at("prefix").get<PrefixId>();
            for (const auto& iv : jp.at("exact_intervals_us"))
                p.exact.push_back({iv.at(0).get<MicroSec>(), iv.at(1).get<MicroSec>()});
            p.exact_total = jp.at("exact_total_us").get<MicroSec>();
            p.alt_exact_total = jp.at("alt_exact_total_us").get<MicroSec>();
            p.probe_dropped = jp.at("probe_dropped").get<std::int64_t>();
            p.probe_estimate = jp.at("probe_estimate_us").get<MicroSec>();
            p.rate_pps = jp.at("rate_pps").get<int>();
            s.pairs.push_back(p);
        }
        rep.sample_reports.push_back(std::move(s));
    }
    for (auto it = j.at("per_router_exact").begin(); it != j.at("per_router_exact").end(); ++it)
        rep.per_router_exact[it.key()] = summary_from_json(it.value());
    for (auto it = j.at("per_router_probe").begin(); it != j.at("per_router_probe").end(); ++it)
        rep.per_router_probe[it.key()] = summary_from_json(it.value());
    if (!j.at("pooled_exact").is_null()) rep.pooled_exact = summary_from_json(j.at("pooled_exact"));
    if (!j.at("pooled_probe").is_null()) rep.pooled_probe = summary_from_json(j.at("pooled_probe"));
    for (auto it = j.at("propagation_delay_us").begin(); it != j.at("propagation_delay_us").end();
         ++it)
        rep.propagation_delay[it.key()] = it.value().get<MicroSec>();
    return rep;
}

void save_report(const std::string& path, const ExperimentReport& rep) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write report file: " + path);
    out << report_to_json(rep);
}

ExperimentReport load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot read report file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return report_from_json(text);
}

std::string stats_csv(const std::vector<ExperimentReport>& reports) {
    std::string csv = "scenario,router,metric,n,q5_ms,q25_ms,q50_ms,q75_ms,q95_ms\n";
    auto row = [&](const std::string& scen, const std::string& router, const char* metric,
                   const PercentileSummary& s) {
        if (s.n == 0) return;
        csv += scen + "," + router + "," + metric + "," + std::to_string(s.n) + "," +
               format_ms(s.q5) + "," + format_ms(s.q25) + "," + format_ms(s.q50) + "," +
               format_ms(s.q75) + "," + format_ms(s.q95) + "\n";
    };
    for (const auto& rep : reports) {
        for (const auto& [r, s] : rep.per_router_exact) row(rep.scenario_name, r, "exact", s);
        for (const auto& [r, s] : rep.per_router_probe) row(rep.scenario_name, r, "probe", s);
        row(rep.scenario_name, "ALL", "exact", rep.pooled_exact);
        row(rep.scenario_name, "ALL", "probe", rep.pooled_probe);
    }
    return csv;
}

std::string propagation_csv(const std::vector<PropagationRow>& rows) {
    std::string csv =
        "router,to_initial_egress_ms,initial_to_backup_ms,backup_to_router_ms,total_ms\n";
    for (const auto& r : rows) {
        csv += r.router + "," + format_ms(r.to_initial_egress) + "," +
               format_ms(r.initial_to_backup) + "," + format_ms(r.backup_to_router) + "," +
               format_ms(r.total) + "\n";
    }
    return csv;
}

} // namespace convtrace

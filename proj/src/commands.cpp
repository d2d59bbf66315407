#include "convtrace/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "convtrace/analyze.hpp"
#include "convtrace/probe.hpp"
#include "convtrace/rng.hpp"
#include "convtrace/trace.hpp"

namespace convtrace {

namespace fs = std::filesystem;

namespace {

int classify_error(const std::exception& e, const char* cmd) {
    std::fprintf(stderr, "%s: %s\n", cmd, e.what());
    if (dynamic_cast<const SampleError*>(&e)) return kExitInvalidSample;
    if (dynamic_cast<const ScenarioError*>(&e) || dynamic_cast<const ModelError*>(&e) ||
        dynamic_cast<const TraceError*>(&e) || dynamic_cast<const ConvergenceError*>(&e))
        return kExitInvalidInput;
    return kExitInternal;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write: " + path);
    out << text;
}

} // namespace

SampleRun run_sample(const ScenarioSpec& spec, std::size_t sample_index, bool with_probes) {
    spec.validate();
    SampleRun run;
    run.igp = compute_igp(spec.topology);
    run.t0 = spec.event.time;
    run.sample_seed = Rng::mix(spec.seed, sample_index);

    const EventSpec ev = spec.resolve_event(spec.topology);
    const ProcessingModel pm = spec.resolve_processing();
    run.initial = build_initial_state(spec.topology, run.igp, spec.ibgp,
                                      spec.resolve_external_routes(), spec.prefix_count);
    run.sim = run_event(spec.topology, run.igp, spec.ibgp, run.initial, ev, pm, run.sample_seed);

    const MicroSec anchor = std::max(run.sim.converged_at, run.sim.last_fib_change);
    run.capture_end = spec.probe.window_end
                          ? run.t0 + *spec.probe.window_end
                          : anchor + std::max<MicroSec>(spec.quiet_window, sec(1) + ms(100));

    if (with_probes) {
        run.sources = spec.resolve_sources();
        run.probe_prefixes = spec.resolve_probe_prefixes(sample_index);

        ProbeConfig cfg;
        cfg.rate_pps = spec.probe.rate_pps;
        cfg.sources = run.sources;
        cfg.prefixes = run.probe_prefixes;
        cfg.window_start = spec.probe.window_start;
        cfg.ttl = spec.probe.ttl;
        cfg.rpf_drop = spec.probe.rpf_drop;

        DataPlaneView view{&spec.topology, &run.igp, &run.sim.fib, &run.sim.activity,
                           spec.probe.rpf_drop, spec.probe.ttl};

        // Alternative attribution for withdraws: the violation is pinned to
        // the instant the border router receives the withdraw, so packets
        // reaching the peer count as dropped only from t0 + 2 * ext delay.
        PeerActivity alt = run.sim.activity;
        const PeerActivity* alt_ptr = nullptr;
        if (ev.kind == EventSpec::Kind::Withdraw) {
            const MicroSec ext = spec.topology.peers[ev.at_peer].delay;
            for (PrefixId p : ev.prefixes)
                alt.set_inactive_from(ev.at_peer, p, ev.time + 2 * ext);
            alt_ptr = &alt;
        }
        run.probes = probe_series(view, cfg, run.t0, run.capture_end, alt_ptr);
    }
    return run;
}

namespace {

void fill_summaries(ExperimentReport& rep, const Topology& topo) {
    std::map<std::string, std::vector<MicroSec>> exact, probe;
    std::vector<MicroSec> pooled_exact, pooled_probe;
    for (const auto& s : rep.sample_reports) {
        if (!s.valid) continue;
        for (const auto& p : s.pairs) {
            const std::string& name = topo.router_name(p.src);
            exact[name].push_back(p.exact_total);
            probe[name].push_back(p.probe_estimate);
            pooled_exact.push_back(p.exact_total);
            pooled_probe.push_back(p.probe_estimate);
        }
    }
    for (auto& [r, v] : exact) rep.per_router_exact[r] = summarize(std::move(v));
    for (auto& [r, v] : probe) rep.per_router_probe[r] = summarize(std::move(v));
    if (!pooled_exact.empty()) rep.pooled_exact = summarize(std::move(pooled_exact));
    if (!pooled_probe.empty()) rep.pooled_probe = summarize(std::move(pooled_probe));
}

} // namespace

std::vector<PropagationRow> propagation_table(const ScenarioSpec& spec) {
    spec.validate();
    const Topology& topo = spec.topology;
    const IgpState igp = compute_igp(topo);
    const EventSpec ev = spec.resolve_event(topo);
    const PrefixId probe_prefix = ev.prefixes.front();

    const PeerId event_peer = ev.at_peer;
    const RouterId initial_egress = topo.peers[event_peer].attached_to;
    const MicroSec ext = topo.peers[event_peer].delay;

    // final stable state identifies the backup egress
    std::vector<ExternalRoute> external = spec.resolve_external_routes();
    PeerActivity activity;
    apply_event_to_peer(topo, ev, external, activity);
    InitialState final_state =
        build_initial_state(topo, igp, spec.ibgp, external, spec.prefix_count);

    RouterId backup = kNoRouter;
    for (RouterId r = 0; r < topo.num_routers(); ++r) {
        const auto& best = final_state.ribs[r].prefixes[probe_prefix].best;
        if (!best) throw ScenarioError("final state leaves " + topo.router_name(r) +
                                       " without a route; no backup egress");
        if (backup == kNoRouter) backup = best->egress;
        else if (backup != best->egress)
            throw ScenarioError("ambiguous backup egress in the final state");
    }

    std::vector<PropagationRow> rows;
    for (RouterId r = 0; r < topo.num_routers(); ++r) {
        PropagationRow row;
        row.router = topo.router_name(r);
        row.to_initial_egress = igp.path_delay(r, initial_egress) + ext;
        row.initial_to_backup = ext + igp.path_delay(initial_egress, backup);
        row.backup_to_router = igp.path_delay(backup, r);
        row.total = row.to_initial_egress + row.initial_to_backup + row.backup_to_router;
        rows.push_back(row);
    }
    return rows;
}

int cmd_simulate(const SimulateOptions& opt, ExperimentReport* out_report) {
    try {
        ScenarioSpec spec = load_scenario(opt.scenario_path);
        if (opt.seed) spec.seed = *opt.seed;
        if (opt.samples) spec.samples = *opt.samples;
        if (opt.rate_pps) spec.probe.rate_pps = *opt.rate_pps;
        if (opt.quiet_window) spec.quiet_window = *opt.quiet_window;
        spec.validate();

        fs::create_directories(opt.out_dir);

        ExperimentReport rep;
        rep.scenario_name = spec.name;
        rep.scenario_hash = scenario_hash(spec);
        rep.seed = spec.seed;
        rep.samples = spec.samples;

        if (opt.write_traces) {
            const HardwareMapping mapping = HardwareMapping::from_topology(spec.topology);
            write_mapping((fs::path(opt.out_dir) / "mapping.json").string(), mapping);
        }

        bool any_invalid = false;
        for (std::size_t i = 0; i < spec.samples; ++i) {
            SampleReport sr;
            sr.index = i;
            sr.seed = Rng::mix(spec.seed, i);
            try {
                SampleRun run = run_sample(spec, i);
                sr.converged_at = run.sim.converged_at;
                sr.last_fib_change = run.sim.last_fib_change;
                sr.pairs = run.probes.pairs;
                if (opt.write_traces) {
                    TraceBuild tb =
                        build_trace(spec.topology, run.igp, run.sim.messages, run.probes.fates);
                    char name[32];
                    std::snprintf(name, sizeof(name), "sample_%03zu.trace", i);
                    write_trace((fs::path(opt.out_dir) / name).string(), tb.records);
                }
            } catch (const SampleError& e) {
                sr.valid = false;
                sr.invalid_reason = e.what();
                rep.excluded_samples.push_back(i);
                any_invalid = true;
                std::fprintf(stderr, "simulate: sample %zu rejected: %s\n", i, e.what());
            }
            rep.sample_reports.push_back(std::move(sr));
        }
        fill_summaries(rep, spec.topology);
        try {
            for (const auto& row : propagation_table(spec))
                rep.propagation_delay[row.router] = row.total;
        } catch (const std::exception&) {
            // scenarios without a unique egress pair simply omit the table
        }

        save_report((fs::path(opt.out_dir) / "report.json").string(), rep);
        if (!opt.quiet) {
            std::printf("scenario %s: %zu sample(s), %zu excluded\n", spec.name.c_str(),
                        spec.samples, rep.excluded_samples.size());
            if (rep.pooled_exact.n)
                std::printf("pooled exact violation: median %s ms (n=%zu)\n",
                            format_ms(rep.pooled_exact.q50).c_str(), rep.pooled_exact.n);
        }
        if (out_report) *out_report = rep;
        return any_invalid ? kExitInvalidSample : kExitOk;
    } catch (const std::exception& e) {
        return classify_error(e, "simulate");
    }
}

int cmd_analyze(const AnalyzeOptions& opt, ExperimentReport* out_report) {
    try {
        const HardwareMapping mapping = read_mapping(opt.mapping_path);
        const TraceScan scan = scan_trace(opt.trace_path, mapping, opt.assume_stable_reachable);

        SampleCheckResult check = check_sample(opt.trace_path, mapping, opt.delayer_tolerance);
        ConvergenceResult conv = detect_convergence(scan, opt.quiet_window);

        ExperimentReport rep;
        rep.scenario_name = fs::path(opt.trace_path).filename().string();
        rep.scenario_hash = "";
        rep.samples = 1;

        SampleReport sr;
        sr.index = 0;
        sr.valid = check.accepted() && conv.conclusive;
        sr.converged_at = conv.converged_at;
        sr.last_fib_change = conv.converged_at;
        if (!check.accepted()) sr.invalid_reason = "sample check failed";
        if (!conv.conclusive) sr.invalid_reason = "inconclusive convergence";

        for (const auto& est : violation_from_journeys(scan.journeys, opt.rate_pps)) {
            PairViolation p;
            p.src = est.src; // router node ids coincide with router ids
            p.prefix = est.prefix;
            p.probe_dropped = est.dropped;
            p.probe_estimate = est.probe_estimate;
            p.rate_pps = opt.rate_pps;
            sr.pairs.push_back(p);
        }
        rep.sample_reports.push_back(sr);

        // probe-side summaries keyed by router name
        std::map<std::string, std::vector<MicroSec>> per_router;
        std::vector<MicroSec> pooled;
        for (const auto& p : rep.sample_reports[0].pairs) {
            auto name = mapping.node_name(p.src);
            per_router[name ? *name : std::to_string(p.src)].push_back(p.probe_estimate);
            pooled.push_back(p.probe_estimate);
        }
        for (auto& [r, v] : per_router) rep.per_router_probe[r] = summarize(std::move(v));
        if (!pooled.empty()) rep.pooled_probe = summarize(std::move(pooled));

        if (!opt.out_path.empty()) save_report(opt.out_path, rep);
        if (!opt.quiet) {
            std::printf("converged_at_us=%lld conclusive=%d sample_ok=%d journeys=%zu\n",
                        static_cast<long long>(conv.converged_at), conv.conclusive ? 1 : 0,
                        check.accepted() ? 1 : 0, scan.journeys.size());
            for (const auto& n : check.notes) std::printf("note: %s\n", n.c_str());
        }
        if (out_report) *out_report = rep;

        if (!check.accepted()) {
            std::fprintf(stderr, "analyze: sample rejected by correctness checks\n");
            return kExitInvalidSample;
        }
        if (!conv.conclusive) {
            std::fprintf(stderr, "analyze: convergence inconclusive (capture too short)\n");
            return kExitInvalidSample;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_error(e, "analyze");
    }
}

int cmd_propagation(const PropagationOptions& opt, std::vector<PropagationRow>* out_rows) {
    try {
        ScenarioSpec spec = load_scenario(opt.scenario_path);
        std::vector<PropagationRow> rows = propagation_table(spec);
        const std::string csv = propagation_csv(rows);
        if (opt.out_path.empty()) std::fputs(csv.c_str(), stdout);
        else write_text(opt.out_path, csv);
        if (out_rows) *out_rows = rows;
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_error(e, "propagation");
    }
}

int cmd_stats(const StatsOptions& opt, std::string* out_csv) {
    try {
        if (opt.report_paths.empty()) throw ScenarioError("stats requires at least one report");
        std::vector<ExperimentReport> reports;
        for (const auto& p : opt.report_paths) reports.push_back(load_report(p));
        const std::string csv = stats_csv(reports);
        if (opt.out_path.empty()) std::fputs(csv.c_str(), stdout);
        else write_text(opt.out_path, csv);
        if (out_csv) *out_csv = csv;
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_error(e, "stats");
    }
}

int cmd_validate(const ValidateOptions& opt, std::vector<Finding>* out_findings) {
    try {
        const HardwareMapping mapping = read_mapping(opt.mapping_path);
        const std::vector<TraceRecord> records = read_trace(opt.trace_path);
        std::vector<Finding> findings = validate_trace(records, mapping);
        for (const auto& f : findings)
            std::printf("finding at record %zu: %s\n", f.record_index, f.what.c_str());
        if (out_findings) *out_findings = findings;
        if (findings.empty()) {
            std::printf("trace valid: %zu records\n", records.size());
            return kExitOk;
        }
        return kExitInvalidSample;
    } catch (const std::exception& e) {
        return classify_error(e, "validate");
    }
}

int cmd_presets(const std::string& out_dir) {
    try {
        fs::create_directories(out_dir);
        for (const auto& [name, spec] : shipped_presets())
            save_scenario((fs::path(out_dir) / name).string(), spec);
        std::printf("wrote %zu preset scenarios to %s\n", shipped_presets().size(),
                    out_dir.c_str());
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_error(e, "presets");
    }
}

} // namespace convtrace

// sbl: separator/bandwidth lab - construction, certification and embedding
// experiments for bounded-degree bipartite guests with small separators.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbl/bandwidth.hpp"
#include "sbl/embed.hpp"
#include "sbl/errors.hpp"
#include "sbl/expander.hpp"
#include "sbl/graph_ops.hpp"
#include "sbl/hosts.hpp"
#include "sbl/hrt.hpp"
#include "sbl/io.hpp"
#include "sbl/pipeline.hpp"
#include "sbl/rng.hpp"

using nlohmann::json;

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SBL_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw sbl::parameter_error("SBL_SEED is not a valid integer");
        }
    }
    return 1;
}

void emit(const std::string& path, json report) {
    if (path.empty()) {
        std::cout << sbl::json_dump(report);
    } else {
        sbl::write_file_atomic(path, sbl::json_dump(report));
        std::cout << "wrote " << path << "\n";
    }
}

// layered host files carry their layer structure
json layered_to_json(const sbl::LayeredHost& host) {
    json j = sbl::graph_to_json(host.graph);
    json layers = json::array();
    for (const auto& l : host.layers) layers.push_back(l.ids());
    j["layers"] = std::move(layers);
    j["layer_size"] = host.layer_size;
    return j;
}

sbl::LayeredHost layered_from_json(const json& j) {
    sbl::LayeredHost host;
    host.graph = sbl::graph_from_json(j);
    if (!j.contains("layers"))
        throw sbl::parameter_error("input is not a layered-host file (missing 'layers')");
    for (const auto& l : j.at("layers"))
        host.layers.emplace_back(sbl::VertexSet(l.get<std::vector<int>>()));
    host.layer_size = j.value("layer_size", host.layers.empty() ? 0 : host.layers[0].size());
    return host;
}

struct SweepPoint {
    int t;
    std::string status = "ok";
    sbl::ConstructionParams params;
    bool separator_valid = false;
    int bw_lower = 0, bw_upper = 0;
    bool layered_nonembed = false;
    std::string pipeline_rate = "na";
};

} // namespace

int run(int argc, char** argv) {
    CLI::App app{"separator/bandwidth lab"};
    app.require_subcommand(1);

    // ---- expander ----------------------------------------------------------
    auto* expander = app.add_subcommand("expander", "near-Ramanujan regular graphs");
    expander->require_subcommand(1);

    struct {
        int k = 0, r = 0, max_resamples = 20, trials = 1000;
        double tol = -1.0;
        std::uint64_t seed = default_seed();
        std::string out, in, report;
    } xp;
    auto* xgen = expander->add_subcommand("gen", "generate and spectrally verify");
    xgen->add_option("--k", xp.k, "vertex count")->required();
    xgen->add_option("--r", xp.r, "degree")->required();
    xgen->add_option("--seed", xp.seed, "rng seed");
    xgen->add_option("--out", xp.out, "output report json")->required();
    xgen->add_option("--max-resamples", xp.max_resamples);
    xgen->add_option("--tol", xp.tol, "eigenvalue tolerance (default 0.05*sqrt(r-1))");
    xgen->callback([&] {
        auto rep = sbl::random_near_ramanujan(xp.k, xp.r, xp.seed, xp.max_resamples, xp.tol);
        json j = sbl::regular_report_to_json(rep);
        j["config"] = {{"k", xp.k},   {"r", xp.r},   {"seed", xp.seed},
                       {"max_resamples", xp.max_resamples}, {"tol", xp.tol}};
        emit(xp.out, j);
        std::cout << "lambda " << rep.lambda << " threshold " << rep.ramanujan_threshold
                  << (rep.is_ramanujan ? " (ramanujan)" : " (above threshold)") << "\n";
    });

    auto* xverify = expander->add_subcommand("verify", "re-verify a report file");
    xverify->add_option("--in", xp.in, "report json from 'expander gen'")->required();
    xverify->add_option("--trials", xp.trials, "mixing/thirds trials");
    xverify->add_option("--seed", xp.seed);
    xverify->add_option("--report", xp.report, "verification output json");
    xverify->callback([&] {
        auto stored = sbl::regular_report_from_json(json::parse(sbl::read_file(xp.in)));
        auto fresh = sbl::analyze_regular(stored.graph, stored.eig_tolerance);
        bool lambda_matches = std::abs(fresh.lambda - stored.lambda) <= 1e-8;

        int violations = 0;
        auto rng = sbl::make_rng(xp.seed);
        std::uniform_int_distribution<int> size_pick(1, fresh.k);
        for (int t = 0; t < xp.trials; ++t) {
            sbl::VertexSet a(sbl::sample_distinct(rng, fresh.k, size_pick(rng)));
            sbl::VertexSet b(sbl::sample_distinct(rng, fresh.k, size_pick(rng)));
            if (!sbl::mixing_deviation(fresh, a, b).holds_measured) ++violations;
        }
        auto thirds = sbl::thirds_edge_check(fresh, xp.trials, xp.seed);
        json j{{"config", {{"in", xp.in}, {"trials", xp.trials}, {"seed", xp.seed}}},
               {"lambda_stored", stored.lambda},
               {"lambda_recomputed", fresh.lambda},
               {"lambda_matches", lambda_matches},
               {"is_ramanujan", fresh.is_ramanujan},
               {"mixing_violations", violations},
               {"thirds", {{"trials", thirds.trials},
                           {"violations", thirds.violations},
                           {"min_edges", thirds.min_edges},
                           {"low_r_warning", thirds.low_r_warning}}}};
        emit(xp.report, j);
        if (violations > 0)
            throw sbl::lemma_violation("mixing inequality violated with measured lambda");
    });

    // ---- hrt ---------------------------------------------------------------
    auto* hrt = app.add_subcommand("hrt", "H_{r,t} guests: build and verify");
    hrt->require_subcommand(1);
    struct {
        int n = 0, r = 0, t = 0;
        std::optional<int> k;
        double gamma = 0.1, gamma_target = 0.1;
        std::uint64_t seed = default_seed();
        std::string out, in, report;
    } hp;
    auto* hbuild = hrt->add_subcommand("build", "construct an instance");
    hbuild->add_option("--n", hp.n)->required();
    hbuild->add_option("--r", hp.r)->required();
    hbuild->add_option("--t", hp.t)->required();
    hbuild->add_option("--k", hp.k, "half separator size (otherwise derived)");
    hbuild->add_option("--gamma-target", hp.gamma_target, "target 2k/n when k is derived");
    hbuild->add_option("--seed", hp.seed);
    hbuild->add_option("--out", hp.out)->required();
    hbuild->callback([&] {
        auto params = sbl::solve_params(hp.n, hp.r, hp.t, hp.k, hp.gamma_target, hp.seed);
        auto h = sbl::build_reference(params);
        auto structure = sbl::verify_structure(h);
        if (!structure.ok)
            throw sbl::lemma_violation("freshly built instance failed verify_structure");
        emit(hp.out, sbl::hrt_to_json(h));
        std::cout << "k " << params.k << " D " << params.D << " gamma_achieved "
                  << params.gamma_achieved << " gamma_nominal " << params.gamma_nominal << "\n";
    });
    auto* hverify = hrt->add_subcommand("verify", "structure + separator certificate");
    hverify->add_option("--in", hp.in)->required();
    hverify->add_option("--gamma", hp.gamma, "separability parameter")->required();
    hverify->add_option("--report", hp.report);
    hverify->callback([&] {
        auto h = sbl::hrt_from_json(json::parse(sbl::read_file(hp.in)));
        auto structure = sbl::verify_structure(h);
        auto cert = sbl::verify_separator(h, hp.gamma);
        json j{{"config", {{"in", hp.in}, {"gamma", hp.gamma}}},
               {"structure", sbl::structure_report_to_json(structure)},
               {"separator", sbl::separator_certificate_to_json(cert)}};
        emit(hp.report, j);
        std::cout << "structure " << (structure.ok ? "ok" : "VIOLATED") << ", separator "
                  << (cert.valid ? "valid" : "invalid") << " at gamma " << hp.gamma << "\n";
    });

    // ---- bw ----------------------------------------------------------------
    auto* bw = app.add_subcommand("bw", "bandwidth bounds");
    bw->require_subcommand(1);
    struct {
        std::string in, report;
        long long limit = 50'000'000;
        int probes = 20;
        std::uint64_t seed = default_seed();
    } bp;
    auto* bexact = bw->add_subcommand("exact", "branch-and-bound exact bandwidth");
    bexact->add_option("--in", bp.in)->required();
    bexact->add_option("--limit", bp.limit, "node budget");
    bexact->add_option("--report", bp.report);
    bexact->callback([&] {
        auto g = sbl::load_graph_file(bp.in);
        auto res = sbl::exact_bandwidth(g, bp.limit);
        json j{{"config", {{"in", bp.in}, {"limit", bp.limit}}},
               {"exact", res.exact ? json(*res.exact) : json(nullptr)},
               {"lower", res.lower},
               {"upper", res.upper},
               {"nodes", res.nodes},
               {"limit_hit", res.limit_hit}};
        emit(bp.report, j);
        if (res.exact)
            std::cout << "bandwidth " << *res.exact << "\n";
        else
            std::cout << "inconclusive within limit; bounds [" << res.lower << ", " << res.upper
                      << "]\n";
    });
    auto* bbound = bw->add_subcommand("bound", "short-path lower bound + heuristic upper bound");
    bbound->add_option("--in", bp.in, "hrt json file")->required();
    bbound->add_option("--probes", bp.probes);
    bbound->add_option("--seed", bp.seed);
    bbound->add_option("--report", bp.report);
    bbound->callback([&] {
        auto h = sbl::hrt_from_json(json::parse(sbl::read_file(bp.in)));
        auto rep = sbl::bandwidth_lower_bound(h, bp.probes, bp.seed);
        json j = sbl::bandwidth_report_to_json(rep);
        j["config"] = {{"in", bp.in}, {"probes", bp.probes}, {"seed", bp.seed}};
        emit(bp.report, j);
        std::cout << "lower_bound " << rep.lower_bound << " upper_bound " << rep.upper_bound
                  << "\n";
    });

    // ---- host --------------------------------------------------------------
    auto* host = app.add_subcommand("host", "host graphs and robustness diagnostics");
    host->require_subcommand(1);
    struct {
        int n = 0, t = 13, trials = 1000;
        double gamma = 0.1, nu = 0.002, tau = 0.2;
        std::uint64_t seed = default_seed();
        std::string out, in, report;
    } op;
    auto* hlayer = host->add_subcommand("layered", "the 100-layer robust expander");
    hlayer->add_option("--n", op.n)->required();
    hlayer->add_option("--out", op.out);
    hlayer->callback([&] {
        auto lh = sbl::build_layered_host(op.n);
        json j = layered_to_json(lh);
        j["config"] = {{"n", op.n}};
        emit(op.out, j);
        std::cout << "layers 100 x " << lh.layer_size << ", edges " << lh.graph.edge_count()
                  << "\n";
    });
    auto* htwo = host->add_subcommand("twoclique", "two overlapping cliques");
    htwo->add_option("--n", op.n)->required();
    htwo->add_option("--gamma", op.gamma)->required();
    htwo->add_option("--out", op.out);
    htwo->callback([&] {
        auto tc = sbl::build_two_clique_host(op.n, op.gamma);
        json j = sbl::graph_to_json(tc.graph);
        j["config"] = {{"n", op.n}, {"gamma", op.gamma}};
        j["two_clique"] = sbl::two_clique_to_json(tc);
        emit(op.out, j);
        std::cout << "cliques " << tc.clique_a << "/" << tc.clique_b << " overlap " << tc.overlap
                  << " min degree " << tc.graph.min_degree() << "\n";
    });
    auto* hprobe = host->add_subcommand("probe-robust", "sample robust-expander violations");
    hprobe->add_option("--in", op.in)->required();
    hprobe->add_option("--nu", op.nu)->required();
    hprobe->add_option("--tau", op.tau)->required();
    hprobe->add_option("--trials", op.trials);
    hprobe->add_option("--seed", op.seed);
    hprobe->add_option("--report", op.report);
    hprobe->callback([&] {
        json raw;
        auto g = sbl::load_graph_file(op.in, nullptr, &raw);
        sbl::RobustExpanderParams params{op.nu, op.tau};
        std::vector<sbl::VertexSet> adversarial;
        if (raw.is_object() && raw.contains("layers"))
            adversarial = sbl::layer_union_candidates(layered_from_json(raw), params);
        auto rep = sbl::robust_expander_probe(g, params, op.trials, op.seed, adversarial);
        json j = sbl::robust_probe_to_json(rep);
        j["config"] = {{"in", op.in}, {"nu", op.nu},     {"tau", op.tau},
                       {"trials", op.trials}, {"seed", op.seed}};
        emit(op.report, j);
        std::cout << (rep.violation_found ? "violation found" : "no violation found (sampling)")
                  << ", min margin " << rep.min_margin << "\n";
    });
    auto* hcert = host->add_subcommand("certify-nonembed", "distance obstruction for guests");
    hcert->add_option("--t", op.t)->required();
    hcert->add_option("--in", op.in, "layered host json")->required();
    hcert->add_option("--report", op.report);
    hcert->callback([&] {
        auto lh = layered_from_json(json::parse(sbl::read_file(op.in)));
        auto cert = sbl::layered_non_embeddability(op.t, lh);
        json j = sbl::nonembed_certificate_to_json(cert);
        j["config"] = {{"in", op.in}, {"t", op.t}};
        emit(op.report, j);
        std::cout << (cert.conclusion ? "H not embeddable (distance obstruction)"
                                      : "no conclusion from this obstruction")
                  << "\n";
    });

    // ---- embed -------------------------------------------------------------
    auto* embed = app.add_subcommand("embed", "embedding pipeline and oracles");
    embed->require_subcommand(1);
    struct {
        std::string guest, host_file, partition, report, out_host, out_partition;
        std::uint64_t seed = default_seed();
        double rho = 0.5, d = 0.5, delta_super = 0.3, density = -1.0;
        int n = 0, l = 10, retries = 20;
        long long limit = 20'000'000;
        sbl::PipelineConfig cfg;
        double eps = -1, dflag = -1, delta = -1, c = 0.3, alpha = 0.35, slack = 0.10;
    } ep;

    auto* eplant = embed->add_subcommand("planted-host", "generate a host with a known partition");
    eplant->add_option("--n", ep.n)->required();
    eplant->add_option("--l", ep.l, "cluster count");
    eplant->add_option("--d", ep.d, "reduced-graph density threshold");
    eplant->add_option("--delta-super", ep.delta_super);
    eplant->add_option("--density", ep.density, "planted pair density (default d+0.3)");
    eplant->add_option("--seed", ep.seed);
    eplant->add_option("--out-host", ep.out_host)->required();
    eplant->add_option("--out-partition", ep.out_partition)->required();
    eplant->callback([&] {
        auto ph = sbl::planted_regular_host(ep.n, ep.l, ep.d, ep.delta_super, ep.seed, ep.density);
        json hj = sbl::graph_to_json(ph.graph);
        hj["config"] = {{"n", ep.n},     {"l", ep.l},       {"d", ep.d},
                        {"delta_super", ep.delta_super}, {"density", ep.density},
                        {"seed", ep.seed}};
        hj["min_degree_fraction"] = ph.min_degree_fraction;
        emit(ep.out_host, hj);
        emit(ep.out_partition, sbl::partition_to_json(ph.partition));
        std::cout << "planted host: m " << ph.partition.m << " min degree fraction "
                  << ph.min_degree_fraction << "\n";
    });

    auto* epipe = embed->add_subcommand("pipeline", "steps 1-8 end to end");
    epipe->add_option("--guest", ep.guest)->required();
    epipe->add_option("--host", ep.host_file)->required();
    epipe->add_option("--partition", ep.partition)->required();
    epipe->add_option("--seed", ep.seed);
    epipe->add_option("--report", ep.report)->required();
    epipe->add_option("--rho", ep.rho);
    epipe->add_option("--eps", ep.eps, "regularity parameter (default d/20)");
    epipe->add_option("--d", ep.dflag, "density threshold (default from partition)");
    epipe->add_option("--delta", ep.delta, "super-regularity degree fraction (default 0.3d)");
    epipe->add_option("--c", ep.c, "restriction size fraction");
    epipe->add_option("--alpha", ep.alpha, "restriction count fraction");
    epipe->add_option("--slack", ep.slack, "component load window");
    epipe->callback([&] {
        auto guest = sbl::hrt_from_json(json::parse(sbl::read_file(ep.guest)));
        auto hostg = sbl::load_graph_file(ep.host_file);
        auto part = sbl::partition_from_json(json::parse(sbl::read_file(ep.partition)));
        sbl::PipelineConfig cfg;
        cfg.seed = ep.seed;
        cfg.rho = ep.rho;
        if (ep.eps >= 0) cfg.eps = ep.eps;
        if (ep.dflag >= 0) cfg.d = ep.dflag;
        if (ep.delta >= 0) cfg.delta = ep.delta;
        cfg.c_restriction = ep.c;
        cfg.alpha = ep.alpha;
        cfg.load_slack = ep.slack;
        auto result = sbl::run_pipeline(guest, hostg, part, cfg);
        json j = result.report;
        j["config"]["guest"] = ep.guest;
        j["config"]["host"] = ep.host_file;
        j["config"]["partition"] = ep.partition;
        emit(ep.report, j);
        std::cout << (result.success ? "embedded and verified" : "pipeline did not succeed")
                  << "\n";
        if (!result.success) throw std::runtime_error("pipeline unsuccessful (see report)");
    });

    auto* edense = embed->add_subcommand("dense", "dense randomized greedy (separator embedder)");
    edense->add_option("--guest", ep.guest)->required();
    edense->add_option("--host", ep.host_file)->required();
    edense->add_option("--rho", ep.rho);
    edense->add_option("--seed", ep.seed);
    edense->add_option("--retries", ep.retries);
    edense->add_option("--report", ep.report);
    edense->callback([&] {
        auto guest = sbl::load_graph_file(ep.guest);
        auto hostg = sbl::load_graph_file(ep.host_file);
        auto rep = sbl::dense_embed_separator(guest, hostg, ep.rho, ep.seed, ep.retries);
        json j = sbl::dense_embed_report_to_json(rep);
        j["config"] = {{"guest", ep.guest}, {"host", ep.host_file}, {"rho", ep.rho},
                       {"seed", ep.seed},   {"retries", ep.retries}};
        emit(ep.report, j);
        std::cout << (rep.success ? "embedded and verified" : "dense greedy failed") << "\n";
        if (!rep.success) throw std::runtime_error("dense embedding failed");
    });

    auto* eexact = embed->add_subcommand("exact", "exhaustive backtracking subgraph search");
    eexact->add_option("--guest", ep.guest)->required();
    eexact->add_option("--host", ep.host_file)->required();
    eexact->add_option("--limit", ep.limit);
    eexact->add_option("--report", ep.report);
    eexact->callback([&] {
        auto guest = sbl::load_graph_file(ep.guest);
        auto hostg = sbl::load_graph_file(ep.host_file);
        auto res = sbl::exact_embed(guest, hostg, ep.limit);
        std::string verdict = res.status == sbl::EmbedStatus::embeds ? "embeds"
                              : res.status == sbl::EmbedStatus::does_not_embed
                                  ? "does_not_embed"
                                  : "inconclusive";
        json j{{"config", {{"guest", ep.guest}, {"host", ep.host_file}, {"limit", ep.limit}}},
               {"status", verdict},
               {"nodes", res.nodes}};
        if (res.status == sbl::EmbedStatus::embeds) j["map"] = res.map.image;
        emit(ep.report, j);
        std::cout << verdict << " (" << res.nodes << " nodes)\n";
    });

    // ---- sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "CSV summary over a t-grid");
    struct {
        int n = 800, r = 35, probes = 5, pipeline_seeds = 0;
        std::vector<int> t_list;
        double gamma_target = 0.1;
        std::uint64_t seed = default_seed();
        std::string out;
    } sp;
    sweep->add_option("--n", sp.n);
    sweep->add_option("--r", sp.r);
    sweep->add_option("--t-list", sp.t_list, "path lengths, e.g. --t-list 1 5 13");
    sweep->add_option("--gamma-target", sp.gamma_target);
    sweep->add_option("--probes", sp.probes, "bandwidth probe orderings per point");
    sweep->add_option("--pipeline-seeds", sp.pipeline_seeds,
                      "run the embedding pipeline this many times per point (0 = skip)");
    sweep->add_option("--seed", sp.seed);
    sweep->add_option("--out", sp.out)->required();
    sweep->callback([&] {
        std::ostringstream csv;
        json cfg{{"n", sp.n}, {"r", sp.r},   {"t_list", sp.t_list},
                 {"gamma_target", sp.gamma_target}, {"probes", sp.probes},
                 {"pipeline_seeds", sp.pipeline_seeds}, {"seed", sp.seed}};
        csv << "# config: " << cfg.dump() << "\n";
        csv << "n,r,t,k,D,gamma_achieved,separator_valid,bw_lower,bw_upper,"
               "layered_nonembed,pipeline_success_rate,status\n";
        std::optional<sbl::LayeredHost> layered;
        for (int t : sp.t_list) {
            SweepPoint point;
            point.t = t;
            try {
                point.params = sbl::solve_params(sp.n, sp.r, t, std::nullopt, sp.gamma_target,
                                                 sp.seed);
                auto h = sbl::build_reference(point.params);
                point.separator_valid = sbl::verify_separator(h, point.params.gamma_achieved).valid;
                auto bound = sbl::bandwidth_lower_bound(h, sp.probes, sp.seed);
                point.bw_lower = bound.lower_bound;
                point.bw_upper = bound.upper_bound;
                if (!layered) layered = sbl::build_layered_host(500);
                point.layered_nonembed = sbl::layered_non_embeddability(t, *layered).conclusion;
                if (sp.pipeline_seeds > 0) {
                    auto ph = sbl::planted_regular_host(2 * sp.n, 10, 0.5, 0.3, sp.seed, 0.8);
                    int good = 0;
                    for (int s = 0; s < sp.pipeline_seeds; ++s) {
                        sbl::PipelineConfig pcfg;
                        pcfg.seed = sbl::substream(sp.seed, 0x5EEDULL + s);
                        pcfg.eps = 0.05;
                        try {
                            if (sbl::run_pipeline(h, ph.graph, ph.partition, pcfg).success) ++good;
                        } catch (const sbl::parameter_error&) {
                        } catch (const sbl::generation_error&) {
                        }
                    }
                    point.pipeline_rate =
                        std::to_string(good) + "/" + std::to_string(sp.pipeline_seeds);
                }
            } catch (const std::exception& e) {
                point.status = e.what();
                for (auto& c : point.status)
                    if (c == ',' || c == '\n') c = ';';
            }
            if (point.status == "ok") {
                csv << sp.n << ',' << sp.r << ',' << t << ',' << point.params.k << ','
                    << point.params.D << ',' << point.params.gamma_achieved << ','
                    << (point.separator_valid ? "yes" : "no") << ',' << point.bw_lower << ','
                    << point.bw_upper << ',' << (point.layered_nonembed ? "yes" : "no") << ','
                    << point.pipeline_rate << ",ok\n";
            } else {
                csv << sp.n << ',' << sp.r << ',' << t << ",,,,,,,,," << point.status << "\n";
            }
        }
        sbl::write_file_atomic(sp.out, csv.str());
        std::cout << "wrote " << sp.out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage problems are parameter errors
    }
    return 0;
}

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sbl::lemma_violation& e) {
        std::cerr << "lemma violation (this is a bug, not bad data): " << e.what() << "\n";
        return 3;
    } catch (const sbl::parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

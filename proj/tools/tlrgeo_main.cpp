#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "tlrgeo/common.hpp"
#include "tlrgeo/cov/assemble.hpp"
#include "tlrgeo/ingest/ingest.hpp"
#include "tlrgeo/mle/mle.hpp"
#include "tlrgeo/ordering/curves.hpp"
#include "tlrgeo/ordering/graph.hpp"
#include "tlrgeo/simd/simd.hpp"
#include "tlrgeo/tlr/factor.hpp"
#include "tlrgeo/util/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tlrgeo;

namespace {

// Resolved run configuration; serialized verbatim into every output file.
struct ExperimentConfig {
    std::string command;
    index_t n = 1600;
    index_t nb = 320;
    double epsilon = 1e-7;
    std::string ordering = "hilbert";
    int curve_bits = 16;
    double sparsify_tau = 0.5;
    std::string kernel = "matern";
    double sigma2 = 1.0, beta = 0.1, nu = 0.5;
    double init_sigma2 = 1.0, init_beta = 0.1, init_nu = 0.5;
    double tgh_xi = 0.0, tgh_omega = 1.0, tgh_g = 0.0, tgh_h = 0.0;
    double biv_sigma11 = 1.0, biv_sigma22 = 1.0, biv_a = 0.1;
    double biv_nu11 = 0.5, biv_nu22 = 0.5, biv_beta12 = 0.0;
    int replicates = 10;
    int runs = 3;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = hardware concurrency
    std::string output_dir = ".";
    std::string format = "json";
    std::string preset;
    std::string stages = "ranks,timing,estimation";
    std::string orderings = "none,morton,hilbert,kdtree";
    std::string input, output;
    std::string lon_col = "lon", lat_col = "lat", value_col = "value";
    double missing = -999.0;
    bool missing_set = false;
    index_t subset = 0;
    bool simulate = false;
    std::string dump_matrix;
};

json config_json(const ExperimentConfig& c) {
    json j;
    j["command"] = c.command;
    j["n"] = c.n;
    j["nb"] = c.nb;
    j["epsilon"] = c.epsilon;
    j["ordering"] = c.ordering;
    j["curve_bits"] = c.curve_bits;
    j["sparsify_tau"] = c.sparsify_tau;
    j["kernel"] = c.kernel;
    j["params"] = {{"sigma2", c.sigma2}, {"beta", c.beta}, {"nu", c.nu}};
    j["initial"] = {{"sigma2", c.init_sigma2}, {"beta", c.init_beta}, {"nu", c.init_nu}};
    j["replicates"] = c.replicates;
    j["runs"] = c.runs;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["format"] = c.format;
    if (!c.preset.empty()) j["preset"] = c.preset;
    if (!c.input.empty()) j["input"] = c.input;
    if (!c.output.empty()) j["output"] = c.output;
    return j;
}

std::string config_comment(const ExperimentConfig& c) {
    return "version: " + std::string(kVersion) + " config: " + config_json(c).dump();
}

void apply_preset(ExperimentConfig& c) {
    if (c.preset.empty()) return;
    struct Regime { double sigma2, beta, nu; };
    static const std::map<std::string, Regime> presets = {
        {"weak-small", {1.0, 0.03, 0.5}},   {"medium-small", {1.0, 0.1, 0.5}},
        {"strong-small", {1.0, 0.3, 0.5}},  {"smooth-weak", {1.0, 0.025, 1.0}},
        {"smooth-medium", {1.0, 0.075, 1.0}}, {"smooth-strong", {1.0, 0.2, 1.0}},
    };
    auto it = presets.find(c.preset);
    if (it == presets.end())
        throw CLI::ValidationError("--preset", "unknown preset '" + c.preset + "'");
    c.sigma2 = it->second.sigma2;
    c.beta = it->second.beta;
    c.nu = it->second.nu;
}

cov::CovarianceModel model_from(const ExperimentConfig& c) {
    cov::CovarianceModel m;
    m.kernel = kernel_from_string(c.kernel);
    m.matern = {c.sigma2, c.beta, c.nu};
    m.bivariate = {c.biv_sigma11, c.biv_sigma22, c.biv_a, c.biv_nu11, c.biv_nu22, c.biv_beta12};
    m.tgh = {c.tgh_xi, c.tgh_omega, c.tgh_g, c.tgh_h};
    return m;
}

ordering::OrderingSpec ordering_from(const ExperimentConfig& c) {
    ordering::OrderingSpec spec;
    spec.method = ordering_from_string(c.ordering);
    spec.curve_bits = c.curve_bits;
    spec.sparsify_tau = c.sparsify_tau;
    return spec;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(s);
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

void write_json_file(const std::string& path, json payload, const ExperimentConfig& c) {
    payload["version"] = kVersion;
    payload["config"] = config_json(c);
    std::ofstream f(path);
    if (!f) throw io_error("cannot open for writing: " + path);
    f << payload.dump(2) << "\n";
    if (!f) throw io_error("write failed: " + path);
}

fs::path out_path(const ExperimentConfig& c, const std::string& name) {
    fs::create_directories(c.output_dir);
    return fs::path(c.output_dir) / name;
}

// ---- subcommands -----------------------------------------------------------

int cmd_generate(ExperimentConfig c) {
    auto locs = generate_uniform_locations(c.n, c.seed);
    std::string path = c.output.empty() ? out_path(c, "locations.csv").string() : c.output;
    if (c.simulate) {
        auto z = cov::simulate_field(locs, model_from(c), c.seed);
        write_locations_csv(path, locs, &z);
    } else {
        write_locations_csv(path, locs);
    }
    std::printf("generate: wrote %lld locations to %s (seed %llu)\n",
                static_cast<long long>(c.n), path.c_str(),
                static_cast<unsigned long long>(c.seed));
    return 0;
}

int cmd_order(ExperimentConfig c) {
    auto locs = read_locations_csv(c.input);
    auto perm = ordering::order_locations(locs, ordering_from(c), model_from(c));
    std::string path = c.output.empty() ? out_path(c, "permutation.txt").string() : c.output;
    write_permutation(path, perm);
    std::printf("order: %s ordering of %lld locations -> %s\n", c.ordering.c_str(),
                static_cast<long long>(locs.n()), path.c_str());
    return 0;
}

LocationSet load_or_generate(const ExperimentConfig& c, std::vector<double>* values) {
    if (!c.input.empty()) return read_locations_csv(c.input, values);
    return generate_uniform_locations(c.n, c.seed);
}

int cmd_compress(ExperimentConfig c) {
    auto locs = load_or_generate(c, nullptr);
    auto perm = ordering::order_locations(locs, ordering_from(c), model_from(c));
    auto ordered = apply_permutation(locs, perm);
    auto tlrm = tlr::compress_covariance(ordered, model_from(c), c.nb, c.epsilon);
    tlrm.ordering = perm.method;

    if (!c.dump_matrix.empty()) {
        auto dense = cov::build_covariance(ordered, model_from(c), c.nb);
        dense.dump(c.dump_matrix);
    }

    auto rep = tlr::rank_stats(tlrm);
    json j = json::parse(tlr::rank_report_json(rep));
    write_json_file(out_path(c, "rank_report.json").string(), j, c);
    tlr::write_rank_heatmap_csv(out_path(c, "rank_heatmap.csv").string(), rep, config_comment(c));

    for (const auto& [i, jt, r] : tlrm.over_budget_tiles())
        std::fprintf(stderr, "warning: tile (%lld,%lld) rank %lld >= nb/2; compression is not paying off\n",
                     static_cast<long long>(i), static_cast<long long>(jt), static_cast<long long>(r));

    std::printf("compress: n=%lld nb=%lld eps=%g ordering=%s ranks[min=%g med=%g mean=%.2f max=%g] mem %.2f MB (dense %.2f MB)\n",
                static_cast<long long>(rep.n), static_cast<long long>(rep.nb), rep.epsilon,
                to_string(rep.ordering), rep.min, rep.median, rep.mean, rep.max,
                rep.mem_tlr_mb(), rep.mem_dense_mb());
    return 0;
}

int cmd_factorize(ExperimentConfig c) {
    auto locs = load_or_generate(c, nullptr);
    auto perm = ordering::order_locations(locs, ordering_from(c), model_from(c));
    auto ordered = apply_permutation(locs, perm);
    auto tlrm = tlr::compress_covariance(ordered, model_from(c), c.nb, c.epsilon);
    tlrm.ordering = perm.method;

    auto rec = tlr::time_factorization(tlrm, c.runs, kernel_from_string(c.kernel),
                                       {c.sigma2, c.beta, c.nu});
    json j = json::parse(tlr::timing_record_json(rec));
    write_json_file(out_path(c, "factorize_timing.json").string(), j, c);
    std::printf("factorize: n=%lld nb=%lld ordering=%s median %.4f s over %d runs\n",
                static_cast<long long>(rec.n), static_cast<long long>(rec.nb),
                to_string(rec.ordering), rec.median_seconds, rec.runs);
    return 0;
}

int cmd_mle(ExperimentConfig c) {
    std::vector<double> z;
    auto locs = read_locations_csv(c.input, &z);
    if (z.empty()) throw io_error("mle: input CSV must carry a z column with observations");
    auto perm = ordering::order_locations(locs, ordering_from(c), model_from(c));
    auto ordered = apply_permutation(locs, perm);
    auto zo = apply_permutation(z, perm);

    mle::MleOptions opt;
    opt.nb = c.nb;
    opt.epsilon = c.epsilon;
    opt.initial = {c.init_sigma2, c.init_beta, c.init_nu};
    auto res = mle::fit_matern(ordered, zo, opt);

    json j;
    j["theta_hat"] = {{"sigma2", res.theta_hat.sigma2}, {"beta", res.theta_hat.beta},
                      {"nu", res.theta_hat.nu}};
    j["f_hat"] = res.f_hat;
    j["loglik"] = res.loglik_at_opt;
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    write_json_file(out_path(c, "mle_result.json").string(), j, c);
    std::printf("mle: sigma2=%.4f beta=%.4f nu=%.4f f=%.4f loglik=%.4f iters=%d converged=%d\n",
                res.theta_hat.sigma2, res.theta_hat.beta, res.theta_hat.nu, res.f_hat,
                res.loglik_at_opt, res.iterations, res.converged ? 1 : 0);
    return 0;
}

int cmd_ingest(ExperimentConfig c) {
    ingest::IngestSchema schema;
    schema.lon_col = c.lon_col;
    schema.lat_col = c.lat_col;
    schema.value_col = c.value_col;
    if (c.missing_set) schema.missing = c.missing;
    auto res = ingest::ingest_csv(c.input, schema);
    LocationSet locs = res.locs;
    std::vector<double> values = res.values;
    if (c.subset > 0) {
        auto [sl, sv] = ingest::subset_random(locs, values, c.subset, c.seed);
        locs = std::move(sl);
        values = std::move(sv);
    }
    std::string path = c.output.empty() ? out_path(c, "ingested.csv").string() : c.output;
    write_locations_csv(path, locs, &values);

    json j;
    j["rows_total"] = res.rows_total;
    j["rows_missing"] = res.rows_missing;
    j["rows_kept"] = res.rows_kept;
    j["subset"] = locs.n();
    j["lon_range"] = {res.lon_min, res.lon_max};
    j["lat_range"] = {res.lat_min, res.lat_max};
    j["value_mean"] = res.value_mean;
    j["value_std"] = res.value_std;
    write_json_file(out_path(c, "ingest_summary.json").string(), j, c);
    std::printf("ingest: %lld rows, %lld missing dropped, %lld kept, %lld written -> %s\n",
                static_cast<long long>(res.rows_total), static_cast<long long>(res.rows_missing),
                static_cast<long long>(res.rows_kept), static_cast<long long>(locs.n()),
                path.c_str());
    return 0;
}

int cmd_bench(ExperimentConfig c) {
    apply_preset(c);
    auto stages = split_list(c.stages);
    auto has_stage = [&](const char* s) {
        return std::find(stages.begin(), stages.end(), s) != stages.end();
    };
    auto methods = split_list(c.orderings);
    auto model = model_from(c);

    std::printf("bench: preset=%s theta=(%.4g, %.4g, %.4g) n=%lld nb=%lld eps=%g\n",
                c.preset.empty() ? "(none)" : c.preset.c_str(), c.sigma2, c.beta, c.nu,
                static_cast<long long>(c.n), static_cast<long long>(c.nb), c.epsilon);

    if (has_stage("ranks")) {
        std::ofstream stats(out_path(c, "rank_stats.csv"));
        stats << "# " << config_comment(c) << "\n";
        stats << "ordering,seed,min,median,mean,max,mem_tlr_mb,mem_dense_mb\n";
        for (const auto& mname : methods) {
            ExperimentConfig cc = c;
            cc.ordering = mname;
            for (int rep = 0; rep < c.replicates; ++rep) {
                std::uint64_t seed = c.seed + static_cast<std::uint64_t>(rep);
                auto locs = generate_uniform_locations(c.n, seed);
                auto perm = ordering::order_locations(locs, ordering_from(cc), model);
                auto ordered = apply_permutation(locs, perm);
                auto tlrm = tlr::compress_covariance(ordered, model, c.nb, c.epsilon);
                tlrm.ordering = perm.method;
                auto rep_stats = tlr::rank_stats(tlrm);
                stats << mname << ',' << seed << ',' << rep_stats.min << ',' << rep_stats.median
                      << ',' << rep_stats.mean << ',' << rep_stats.max << ','
                      << rep_stats.mem_tlr_mb() << ',' << rep_stats.mem_dense_mb() << "\n";
                if (rep == 0)
                    tlr::write_rank_heatmap_csv(
                        out_path(c, "rank_heatmap_" + mname + ".csv").string(), rep_stats,
                        config_comment(cc));
            }
            std::printf("bench/ranks: %s done\n", mname.c_str());
        }
    }

    if (has_stage("timing")) {
        for (const auto& mname : methods) {
            ExperimentConfig cc = c;
            cc.ordering = mname;
            auto locs = generate_uniform_locations(c.n, c.seed);
            auto perm = ordering::order_locations(locs, ordering_from(cc), model);
            auto ordered = apply_permutation(locs, perm);
            auto tlrm = tlr::compress_covariance(ordered, model, c.nb, c.epsilon);
            tlrm.ordering = perm.method;
            auto rec = tlr::time_factorization(tlrm, c.runs, model.kernel, model.matern);
            json j = json::parse(tlr::timing_record_json(rec));
            write_json_file(out_path(c, "timing_" + mname + ".json").string(), j, cc);
            std::printf("bench/timing: %s median %.4f s\n", mname.c_str(), rec.median_seconds);
        }
    }

    if (has_stage("estimation")) {
        for (const auto& mname : methods) {
            ExperimentConfig cc = c;
            cc.ordering = mname;
            mle::ReplicateExperiment exp;
            exp.n = c.n;
            exp.nb = c.nb;
            exp.epsilon = c.epsilon;
            exp.ordering = ordering_from(cc);
            exp.true_params = {c.sigma2, c.beta, c.nu};
            exp.replicates = c.replicates;
            exp.seed_base = c.seed;
            exp.opt.initial = {c.init_sigma2, c.init_beta, c.init_nu};
            auto report = mle::run_replicates(exp);
            mle::write_estimation_csv(out_path(c, "estimation_" + mname + ".csv").string(),
                                      report, config_comment(cc));
            auto qjson = [](const mle::Quantiles& q) {
                return json{{"min", q.min}, {"q25", q.q25}, {"median", q.median},
                            {"q75", q.q75}, {"max", q.max}};
            };
            json j;
            j["sigma2"] = qjson(report.sigma2);
            j["beta"] = qjson(report.beta);
            j["nu"] = qjson(report.nu);
            j["f"] = qjson(report.f);
            j["true"] = {{"sigma2", c.sigma2}, {"beta", c.beta}, {"nu", c.nu},
                         {"f", mle::identifiable_f({c.sigma2, c.beta, c.nu})}};
            write_json_file(out_path(c, "estimation_summary_" + mname + ".json").string(), j, cc);
            std::printf("bench/estimation: %s median f=%.3f (true %.3f) median nu=%.3f\n",
                        mname.c_str(), report.median_f,
                        mle::identifiable_f({c.sigma2, c.beta, c.nu}), report.median_nu);
        }
    }
    return 0;
}

void load_config_file(ExperimentConfig& c, int argc, char** argv) {
    std::string path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") path = argv[i + 1];
    if (path.empty()) return;
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config: " + path);
    json j = json::parse(f);
    if (j.contains("n")) c.n = j["n"].get<index_t>();
    if (j.contains("nb")) c.nb = j["nb"].get<index_t>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("ordering")) c.ordering = j["ordering"].get<std::string>();
    if (j.contains("curve_bits")) c.curve_bits = j["curve_bits"].get<int>();
    if (j.contains("sparsify_tau")) c.sparsify_tau = j["sparsify_tau"].get<double>();
    if (j.contains("kernel")) c.kernel = j["kernel"].get<std::string>();
    if (j.contains("params")) {
        c.sigma2 = j["params"].value("sigma2", c.sigma2);
        c.beta = j["params"].value("beta", c.beta);
        c.nu = j["params"].value("nu", c.nu);
    }
    if (j.contains("replicates")) c.replicates = j["replicates"].get<int>();
    if (j.contains("runs")) c.runs = j["runs"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
}

} // namespace

int main(int argc, char** argv) {
    ExperimentConfig cfg;
    try {
        load_config_file(cfg, argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    CLI::App app{"tlrgeo: tile low-rank geostatistics toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with defaults");
    app.add_option("--seed", cfg.seed, "base RNG seed")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)")->capture_default_str();
    app.add_option("--output-dir", cfg.output_dir, "directory for outputs")->capture_default_str();
    app.add_option("--format", cfg.format, "json|csv preference for summaries")
        ->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    auto add_model_flags = [&](CLI::App* sub) {
        sub->add_option("--kernel", cfg.kernel, "matern|bivariate-matern|tgh-matern")
            ->check(CLI::IsMember({"matern", "bivariate-matern", "tgh-matern"}))
            ->capture_default_str();
        sub->add_option("--sigma2", cfg.sigma2)->capture_default_str();
        sub->add_option("--beta", cfg.beta)->capture_default_str();
        sub->add_option("--nu", cfg.nu)->capture_default_str();
        sub->add_option("--tgh-xi", cfg.tgh_xi)->capture_default_str();
        sub->add_option("--tgh-omega", cfg.tgh_omega)->capture_default_str();
        sub->add_option("--tgh-g", cfg.tgh_g)->capture_default_str();
        sub->add_option("--tgh-h", cfg.tgh_h)->capture_default_str();
        sub->add_option("--biv-sigma11", cfg.biv_sigma11)->capture_default_str();
        sub->add_option("--biv-sigma22", cfg.biv_sigma22)->capture_default_str();
        sub->add_option("--biv-a", cfg.biv_a)->capture_default_str();
        sub->add_option("--biv-nu11", cfg.biv_nu11)->capture_default_str();
        sub->add_option("--biv-nu22", cfg.biv_nu22)->capture_default_str();
        sub->add_option("--biv-beta12", cfg.biv_beta12)->capture_default_str();
    };
    auto add_ordering_flags = [&](CLI::App* sub) {
        sub->add_option("--ordering,--method", cfg.ordering,
                        "none|morton|hilbert|kdtree|rcm|mindegree")
            ->check(CLI::IsMember({"none", "morton", "hilbert", "kdtree", "rcm", "mindegree"}))
            ->capture_default_str();
        sub->add_option("--bits", cfg.curve_bits, "curve quantization bits")->capture_default_str();
        sub->add_option("--sparsify-tau", cfg.sparsify_tau, "graph sparsification threshold")
            ->capture_default_str();
    };

    auto* gen = app.add_subcommand("generate", "generate uniform locations (optionally a field)");
    gen->add_option("--n", cfg.n)->capture_default_str();
    gen->add_flag("--simulate", cfg.simulate, "also simulate field values into a z column");
    gen->add_option("--out", cfg.output, "output CSV path");
    add_model_flags(gen);

    auto* ord = app.add_subcommand("order", "compute an ordering permutation for a location CSV");
    ord->add_option("--input", cfg.input)->required();
    ord->add_option("--out", cfg.output, "permutation file path");
    add_ordering_flags(ord);
    add_model_flags(ord);

    auto* comp = app.add_subcommand("compress", "assemble and TLR-compress a covariance matrix");
    comp->add_option("--input", cfg.input, "location CSV (generated when omitted)");
    comp->add_option("--n", cfg.n)->capture_default_str();
    comp->add_option("--nb", cfg.nb)->capture_default_str();
    comp->add_option("--epsilon", cfg.epsilon)->capture_default_str();
    comp->add_option("--dump-matrix", cfg.dump_matrix, "also dump the dense matrix (binary)");
    add_ordering_flags(comp);
    add_model_flags(comp);

    auto* fact = app.add_subcommand("factorize", "compress and run the TLR Cholesky benchmark");
    fact->add_option("--input", cfg.input, "location CSV (generated when omitted)");
    fact->add_option("--n", cfg.n)->capture_default_str();
    fact->add_option("--nb", cfg.nb)->capture_default_str();
    fact->add_option("--epsilon", cfg.epsilon)->capture_default_str();
    fact->add_option("--runs", cfg.runs)->capture_default_str();
    add_ordering_flags(fact);
    add_model_flags(fact);

    auto* fit = app.add_subcommand("mle", "maximum likelihood fit on an x,y,z CSV");
    fit->add_option("--input", cfg.input)->required();
    fit->add_option("--nb", cfg.nb)->capture_default_str();
    fit->add_option("--epsilon", cfg.epsilon)->capture_default_str();
    fit->add_option("--init-sigma2", cfg.init_sigma2)->capture_default_str();
    fit->add_option("--init-beta", cfg.init_beta)->capture_default_str();
    fit->add_option("--init-nu", cfg.init_nu)->capture_default_str();
    add_ordering_flags(fit);

    auto* bench = app.add_subcommand("bench", "run the rank/timing/estimation experiment recipes");
    bench->add_option("--preset", cfg.preset,
                      "weak-small|medium-small|strong-small|smooth-weak|smooth-medium|smooth-strong");
    bench->add_option("--n", cfg.n)->capture_default_str();
    bench->add_option("--nb", cfg.nb)->capture_default_str();
    bench->add_option("--epsilon", cfg.epsilon)->capture_default_str();
    bench->add_option("--replicates", cfg.replicates)->capture_default_str();
    bench->add_option("--runs", cfg.runs)->capture_default_str();
    bench->add_option("--orderings", cfg.orderings, "comma list")->capture_default_str();
    bench->add_option("--stages", cfg.stages, "subset of ranks,timing,estimation")->capture_default_str();
    bench->add_option("--init-sigma2", cfg.init_sigma2)->capture_default_str();
    bench->add_option("--init-beta", cfg.init_beta)->capture_default_str();
    bench->add_option("--init-nu", cfg.init_nu)->capture_default_str();
    add_model_flags(bench);

    auto* ing = app.add_subcommand("ingest", "ingest a lon/lat/value CSV (soil-moisture style)");
    ing->add_option("--input", cfg.input)->required();
    ing->add_option("--lon-col", cfg.lon_col)->capture_default_str();
    ing->add_option("--lat-col", cfg.lat_col)->capture_default_str();
    ing->add_option("--value-col", cfg.value_col)->capture_default_str();
    auto* miss = ing->add_option("--missing", cfg.missing, "missing-value sentinel");
    ing->add_option("--subset", cfg.subset, "random subset size (0 = keep all)")->capture_default_str();
    ing->add_option("--out", cfg.output, "output CSV path");

    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    cfg.missing_set = miss->count() > 0;

    int threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    util::set_num_threads(threads);

    try {
        if (gen->parsed()) { cfg.command = "generate"; return cmd_generate(cfg); }
        if (ord->parsed()) { cfg.command = "order"; return cmd_order(cfg); }
        if (comp->parsed()) { cfg.command = "compress"; return cmd_compress(cfg); }
        if (fact->parsed()) { cfg.command = "factorize"; return cmd_factorize(cfg); }
        if (fit->parsed()) { cfg.command = "mle"; return cmd_mle(cfg); }
        if (bench->parsed()) { cfg.command = "bench"; return cmd_bench(cfg); }
        if (ing->parsed()) { cfg.command = "ingest"; return cmd_ingest(cfg); }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const factorization_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

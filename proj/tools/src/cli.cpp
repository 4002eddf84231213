#include "wnn/cli.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wnn/capacity.hpp"
#include "wnn/compile.hpp"
#include "wnn/error.hpp"
#include "wnn/estimate.hpp"
#include "wnn/io.hpp"
#include "wnn/transform.hpp"

namespace wnn::cli {

namespace {

bool looks_inline(const std::string& arg) {
    const auto pos = arg.find_first_not_of(" \t\r\n");
    return pos != std::string::npos && arg[pos] == '{';
}

ClassSpec load_spec(const std::string& arg) {
    try {
        return class_spec_from_json(looks_inline(arg) ? arg : read_text_file(arg));
    } catch (const InputError& e) {
        throw FormatError(std::string("--spec-json: ") + e.what());
    }
}

NormSpec make_norm(double p, const std::string& q) {
    try {
        return NormSpec(p, NormIndex::parse(q));
    } catch (const Error& e) {
        throw InputError(std::string("--p/--q: ") + e.what());
    }
}

WnNetwork load_net(const std::string& path, const char* flag) {
    try {
        return load_network(path);
    } catch (const InputError& e) {
        throw FormatError(std::string(flag) + ": " + e.what());
    }
}

void apply_config_json(const std::string& arg, EstimateConfig& cfg) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(looks_inline(arg) ? arg : read_text_file(arg));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("--cfg: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("--cfg: expected a JSON object");
    auto count = [&](const char* key, std::size_t& field) {
        if (auto it = doc.find(key); it != doc.end()) {
            if (!it->is_number_unsigned()) throw FormatError(std::string("--cfg: '") + key + "' must be a count");
            field = it->get<std::size_t>();
        }
    };
    auto real = [&](const char* key, double& field) {
        if (auto it = doc.find(key); it != doc.end()) {
            if (!it->is_number()) throw FormatError(std::string("--cfg: '") + key + "' must be a number");
            field = it->get<double>();
        }
    };
    count("epsilon_draws", cfg.epsilon_draws);
    count("restarts", cfg.restarts);
    count("steps", cfg.steps);
    count("decay_every", cfg.decay_every);
    count("exact_enumeration_max_n", cfg.exact_enumeration_max_n);
    count("threads", cfg.threads);
    real("step_size", cfg.step_size);
    real("decay", cfg.decay);
    if (auto it = doc.find("verify_feasibility"); it != doc.end()) {
        if (!it->is_boolean()) throw FormatError("--cfg: 'verify_feasibility' must be a boolean");
        cfg.verify_feasibility = it->get<bool>();
    }
}

std::vector<double> parse_real_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw FormatError(std::string(flag) + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw FormatError(std::string(flag) + ": empty list");
    return out;
}

struct Options {
    std::string net, out_path, spec_json, shallow, sample, cfg, sweep, formula = "auto", rule = "exact";
    double p = 1.0;
    std::string q = "inf";
    double c = 1.0, c_out = 1.0, tol = 1e-9, delta = 0.05;
    std::optional<double> a0, big_c;
    std::size_t k = 1, n = 1, verify = 0, m1 = 1;
    double L = 1.0, Cr = 1.0;
    std::uint64_t seed = 0;
    bool compare_bound = false;
    // estimator overrides
    std::optional<std::size_t> draws, restarts, steps, decay_every, threads;
    std::optional<double> step_size, decay;
    bool verify_feasibility = false;
    // claim1
    double gamma0 = 1.0;
    std::string c0_list = "1,10,100,1000,10000,100000,1000000";
    bool monte_carlo = false;
    std::size_t mc_draws = 100000;
};

int cmd_norm(const Options& o, std::ostream& out) {
    const WnNetwork net = load_net(o.net, "--net");
    const NormSpec ns = make_norm(o.p, o.q);
    out << "layer,norm\n";
    const auto norms = layer_norms(net, ns);
    for (std::size_t i = 0; i < norms.size(); ++i) out << (i + 1) << ',' << format_number(norms[i]) << '\n';
    return kOk;
}

int cmd_check(const Options& o, std::ostream& out) {
    const WnNetwork net = load_net(o.net, "--net");
    const ClassSpec spec = load_spec(o.spec_json);
    const HiddenNormRule rule = o.rule == "at-most" ? HiddenNormRule::AtMost : HiddenNormRule::Exact;
    const MembershipReport rep = class_check(net, spec, o.tol, rule);
    out << rep.summary() << '\n';
    return rep.pass() ? kOk : kVerificationFailure;
}

int cmd_canonicalize(const Options& o, std::ostream& out) {
    const WnNetwork net = load_net(o.net, "--net");
    const NormSpec ns = make_norm(o.p, o.q);
    const CanonicalizeResult res = canonicalize(net, ns, o.c, o.c_out, o.tol);
    save_network(res.net, o.out_path);
    out << "wrote " << o.out_path << '\n';
    if (res.report.constant_collapse) {
        out << "constant network: collapsed to bias-only layers\n";
    } else {
        out << "scale_factors";
        for (double s : res.report.scale_factors) out << ' ' << format_number(s);
        out << '\n';
    }
    return kOk;
}

int cmd_compile(const Options& o, std::ostream& out) {
    ShallowNet s;
    try {
        s = load_shallow(o.shallow);
    } catch (const InputError& e) {
        throw FormatError(std::string("--shallow: ") + e.what());
    }
    const NormSpec ns = make_norm(o.p, o.q);
    const CompileResult res = compile_to_depth(s, o.k, ns, o.c_out);
    save_network(res.net, o.out_path);

    out << "wrote " << o.out_path << '\n';
    out << "widths";
    for (std::size_t i = 1; i <= o.k; ++i) out << ' ' << res.net.dims()[i];
    out << "\nwid_k " << res.plan.wid_k << "\nconstruction_bound " << res.plan.construction_bound << '\n';

    if (o.verify == 0) return kOk;
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> x(s.input_dim);
    double worst = 0.0;
    for (std::size_t i = 0; i < o.verify; ++i) {
        for (double& v : x) v = dist(rng);
        worst = std::max(worst, std::abs(eval_scalar(res.net, x) - s(x)));
    }
    out << "max_deviation " << format_number(worst) << '\n';
    return worst <= 1e-9 ? kOk : kVerificationFailure;
}

BoundReport pick_bound(const std::string& formula, const ClassSpec& spec, std::size_t n) {
    if (formula == "prop1") return bound_prop1(spec, n);
    if (formula == "prop2") return bound_prop2(spec, n);
    return bound_auto(spec, n);
}

int cmd_bound(const Options& o, std::ostream& out) {
    const ClassSpec spec = load_spec(o.spec_json);
    out << bound_csv_header() << '\n';
    if (o.sweep.empty()) {
        out << bound_csv_row(pick_bound(o.formula, spec, o.n)) << '\n';
        return kOk;
    }
    // sweep keeps the first hidden width for every depth
    const SweepRange range = parse_sweep(o.sweep);
    const std::size_t width = spec.k >= 1 ? spec.dims[1] : 1;
    for (std::size_t k = range.first; k <= range.last; k += range.step) {
        ClassSpec s = spec;
        s.k = k;
        s.dims.assign(k + 2, width);
        s.dims.front() = spec.dims.front();
        s.dims.back() = spec.dims.back();
        out << bound_csv_row(pick_bound(o.formula, s, o.n)) << '\n';
    }
    return kOk;
}

int cmd_gen_bound(const Options& o, std::ostream& out) {
    const ClassSpec spec = load_spec(o.spec_json);
    const BoundReport g = generalization_bound(spec, o.n, o.delta);
    out << "bound,branch,value\n";
    out << "generalization," << to_string(g.branch) << ',' << format_number(g.value) << '\n';
    if (o.a0) {
        const BoundReport c = corollary_bound(spec, o.n, o.delta, *o.a0);
        out << "corollary," << to_string(c.branch) << ',' << format_number(c.value) << '\n';
    }
    return kOk;
}

int cmd_approx(const Options& o, std::ostream& out) {
    const ApproxPlan plan = approx_plan(o.m1, o.L, o.c_out, o.k, o.Cr);
    out << "wid_k,k_max,inner" << (o.big_c ? ",error_bound" : "") << '\n';
    out << plan.wid_k << ',' << plan.k_max << ',' << format_number(plan.inner);
    if (o.big_c) out << ',' << format_number(approx_error_bound(o.m1, o.L, o.c_out, *o.big_c));
    out << '\n';
    return kOk;
}

int cmd_estimate(const Options& o, std::ostream& out) {
    const ClassSpec spec = load_spec(o.spec_json);
    Sample sample = [&] {
        try {
            return load_sample(o.sample);
        } catch (const InputError& e) {
            throw FormatError(std::string("--sample: ") + e.what());
        }
    }();
    EstimateConfig cfg;
    if (!o.cfg.empty()) apply_config_json(o.cfg, cfg);
    cfg.seed = o.seed;
    if (o.draws) cfg.epsilon_draws = *o.draws;
    if (o.restarts) cfg.restarts = *o.restarts;
    if (o.steps) cfg.steps = *o.steps;
    if (o.decay_every) cfg.decay_every = *o.decay_every;
    if (o.threads) cfg.threads = *o.threads;
    if (o.step_size) cfg.step_size = *o.step_size;
    if (o.decay) cfg.decay = *o.decay;
    if (o.verify_feasibility) cfg.verify_feasibility = true;

    EstimateReport rep = empirical_rademacher(spec, sample, cfg);
    if (!o.compare_bound) rep.analytic_bound.reset();
    out << estimate_report_to_json(rep);
    if (cfg.verify_feasibility && rep.infeasible_iterates > 0) return kVerificationFailure;
    return kOk;
}

int cmd_demo_motivating(std::ostream& out) {
    const auto rows = motivating_table(201);
    bool ok = true;
    out << "x,f,f_prime,diff\n";
    for (const auto& r : rows) {
        out << format_number(r.x) << ',' << format_number(r.f) << ',' << format_number(r.f_prime) << ','
            << format_number(r.diff) << '\n';
        ok = ok && std::abs(r.diff - 99.0) <= 1e-12;
    }
    return ok ? kOk : kVerificationFailure;
}

int cmd_demo_claim1(const Options& o, std::ostream& out) {
    const std::vector<double> c0 = parse_real_list(o.c0_list, "--c0-list");
    out << claim1_csv(demo_claim1(c0, o.gamma0, o.n, o.seed, o.monte_carlo, o.mc_draws));
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weight-normalized ReLU network toolkit"};
    app.require_subcommand(1);
    Options o;

    auto add_norm = [&](CLI::App* sub) {
        sub->add_option("--p", o.p, "Within-column exponent p >= 1")->required();
        sub->add_option("--q", o.q, "Across-column exponent q >= 1 or 'inf'")->required();
    };

    auto* norm = app.add_subcommand("norm", "Per-layer (p,q) norms of a network");
    norm->add_option("--net", o.net, "Network file")->required();
    add_norm(norm);

    auto* check = app.add_subcommand("check", "Membership test against a class spec");
    check->add_option("--net", o.net, "Network file")->required();
    check->add_option("--spec-json", o.spec_json, "Class spec file or inline JSON")->required();
    check->add_option("--tol", o.tol, "Relative tolerance")->capture_default_str();
    check->add_option("--rule", o.rule, "Hidden norm rule")->check(CLI::IsMember({"exact", "at-most"}));

    auto* canon = app.add_subcommand("canonicalize", "Rescale hidden layers to norm exactly c");
    canon->add_option("--net", o.net, "Network file")->required();
    add_norm(canon);
    canon->add_option("--c", o.c, "Hidden budget")->required();
    canon->add_option("--c-out", o.c_out, "Output budget")->required();
    canon->add_option("--tol", o.tol, "Relative tolerance")->capture_default_str();
    canon->add_option("--out", o.out_path, "Output network file")->required();

    auto* comp = app.add_subcommand("compile", "Compile a one-hidden-layer net to depth k");
    comp->add_option("--shallow", o.shallow, "Shallow net file")->required();
    comp->add_option("--k", o.k, "Target depth")->required();
    add_norm(comp);
    comp->add_option("--c-out", o.c_out, "Coefficient budget")->required();
    comp->add_option("--out", o.out_path, "Output network file")->required();
    comp->add_option("--verify", o.verify, "Check equivalence at N random points in [-2,2]^m1");
    comp->add_option("--seed", o.seed, "Seed for --verify points");

    auto* bound = app.add_subcommand("bound", "Rademacher complexity upper bound (CSV)");
    bound->add_option("--spec-json", o.spec_json, "Class spec file or inline JSON")->required();
    bound->add_option("--n", o.n, "Sample size")->required();
    bound->add_option("--sweep", o.sweep, "Depth sweep k=A..B[,step]");
    bound->add_option("--formula", o.formula, "auto, prop1 or prop2")->check(CLI::IsMember({"auto", "prop1", "prop2"}));

    auto* gen = app.add_subcommand("gen-bound", "Generalization bound");
    gen->add_option("--spec-json", o.spec_json, "Class spec file or inline JSON")->required();
    gen->add_option("--n", o.n, "Sample size")->required();
    gen->add_option("--delta", o.delta, "Failure probability in (0,1)")->required();
    gen->add_option("--a0", o.a0, "Also report the bound under c^k <= a0 (p = 1)");

    auto* approx = app.add_subcommand("approx", "Width prescription and approximation error");
    approx->add_option("--m1", o.m1, "Input dimension")->required();
    approx->add_option("--L", o.L, "Lipschitz constant")->required();
    approx->add_option("--c-out", o.c_out, "Output budget")->required();
    approx->add_option("--k", o.k, "Depth")->required();
    approx->add_option("--Cr", o.Cr, "Width constant")->required();
    approx->add_option("--C", o.big_c, "Error constant");

    auto* est = app.add_subcommand("estimate", "Empirical Rademacher complexity estimate (JSON)");
    est->add_option("--spec-json", o.spec_json, "Class spec file or inline JSON")->required();
    est->add_option("--sample", o.sample, "Sample file")->required();
    est->add_option("--seed", o.seed, "Seed");
    est->add_option("--cfg", o.cfg, "Estimator config file or inline JSON");
    est->add_option("--draws", o.draws, "Sign-vector draws");
    est->add_option("--restarts", o.restarts, "Restarts per sign vector");
    est->add_option("--steps", o.steps, "Ascent steps per restart");
    est->add_option("--step-size", o.step_size, "Initial step size");
    est->add_option("--decay", o.decay, "Step decay factor");
    est->add_option("--decay-every", o.decay_every, "Steps between decays");
    est->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    est->add_flag("--verify-feasibility", o.verify_feasibility, "Check every iterate against the class");
    est->add_flag("--compare-bound", o.compare_bound, "Append the analytic bound and margin");

    auto* demo = app.add_subcommand("demo", "Demonstrations");
    demo->require_subcommand(1);
    auto* motivating = demo->add_subcommand("motivating", "Norm product does not control the output");
    auto* claim1 = demo->add_subcommand("claim1", "Divergence of the norm-product class");
    claim1->add_option("--gamma0", o.gamma0, "Norm product budget")->capture_default_str();
    claim1->add_option("--n", o.n, "Sample size")->capture_default_str();
    claim1->add_option("--c0-list", o.c0_list, "Comma-separated output constants")->capture_default_str();
    claim1->add_option("--seed", o.seed, "Sample seed");
    claim1->add_flag("--monte-carlo", o.monte_carlo, "Sample sign vectors instead of enumerating");
    claim1->add_option("--draws", o.mc_draws, "Monte Carlo draws")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    const std::vector<std::pair<CLI::App*, std::function<int()>>> handlers = {
        {norm, [&] { return cmd_norm(o, out); }},
        {check, [&] { return cmd_check(o, out); }},
        {canon, [&] { return cmd_canonicalize(o, out); }},
        {comp, [&] { return cmd_compile(o, out); }},
        {bound, [&] { return cmd_bound(o, out); }},
        {gen, [&] { return cmd_gen_bound(o, out); }},
        {approx, [&] { return cmd_approx(o, out); }},
        {est, [&] { return cmd_estimate(o, out); }},
        {motivating, [&] { return cmd_demo_motivating(out); }},
        {claim1, [&] { return cmd_demo_claim1(o, out); }},
    };
    try {
        for (const auto& [sub, handler] : handlers) {
            if (sub->parsed()) return handler();
        }
        err << "error: no subcommand\n";
        return kInputError;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kPreconditionError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

}  // namespace wnn::cli

// Command-line front end: pricing runs, table reproduction, and check suites.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lvexp/checks.hpp"
#include "lvexp/generic.hpp"
#include "lvexp/montecarlo.hpp"
#include "lvexp/pce.hpp"
#include "lvexp/pricing.hpp"
#include "lvexp/tables.hpp"

namespace {

std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct RunConfig {
    std::string model = "exp";
    std::vector<double> coeffs;
    double alpha = 0.1;
    bool jumps = false;
    double lambda = 2.0, gamma = 0.05, delta = 0.02;
    double s0 = 100.0, strike = 100.0, rate = 0.03, maturity = 0.5;
    double sigma0 = 0.25, sigma1 = 0.15, eps = 0.1;
    int order = 1;
    std::string method = "closed";
    std::size_t paths = 10000, steps = 256;
    std::uint64_t seed = 1;
    int degree = 15;
    bool paper_literal = false;
    std::string format = "json";
    std::string out;
    std::string config_path;
};

void add_run_flags(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--model", rc.model)->check(CLI::IsMember({"exp", "linear", "poly"}));
    cmd->add_option("--coeffs", rc.coeffs)->delimiter(',');
    cmd->add_option("--alpha", rc.alpha);
    cmd->add_flag("--jumps", rc.jumps);
    cmd->add_option("--lambda", rc.lambda);
    cmd->add_option("--gamma", rc.gamma);
    cmd->add_option("--delta", rc.delta);
    cmd->add_option("--s0", rc.s0);
    cmd->add_option("--strike", rc.strike);
    cmd->add_option("--rate", rc.rate);
    cmd->add_option("--maturity", rc.maturity);
    cmd->add_option("--sigma0", rc.sigma0);
    cmd->add_option("--sigma1", rc.sigma1);
    cmd->add_option("--eps", rc.eps);
    cmd->add_option("--order", rc.order)->check(CLI::IsMember({1, 2}));
    cmd->add_option("--method", rc.method)->check(CLI::IsMember({"closed", "mc", "pce"}));
    cmd->add_option("--paths", rc.paths);
    cmd->add_option("--steps", rc.steps);
    cmd->add_option("--seed", rc.seed);
    cmd->add_option("--degree", rc.degree);
    cmd->add_flag("--paper-literal", rc.paper_literal);
    cmd->add_option("--format", rc.format)->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", rc.out);
    cmd->add_option("--config", rc.config_path);
}

// Flat JSON config mirroring the flags; command-line values take precedence.
void apply_config(CLI::App* cmd, RunConfig& rc) {
    if (rc.config_path.empty()) return;
    std::ifstream in(rc.config_path);
    if (!in) throw lvexp::DomainError("cannot open config file: " + rc.config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw lvexp::DomainError(std::string("config parse error: ") + e.what());
    }
    auto unset = [&](const std::string& flag) { return cmd->count(flag) == 0; };
    auto getd = [&](const char* k, const std::string& flag, double& tgt) {
        if (j.contains(k) && unset(flag)) tgt = j.at(k).get<double>();
    };
    auto gets = [&](const char* k, const std::string& flag, std::string& tgt) {
        if (j.contains(k) && unset(flag)) tgt = j.at(k).get<std::string>();
    };
    auto getb = [&](const char* k, const std::string& flag, bool& tgt) {
        if (j.contains(k) && unset(flag)) tgt = j.at(k).get<bool>();
    };
    gets("model", "--model", rc.model);
    if (j.contains("coeffs") && unset("--coeffs")) rc.coeffs = j.at("coeffs").get<std::vector<double>>();
    getd("alpha", "--alpha", rc.alpha);
    getb("jumps", "--jumps", rc.jumps);
    getd("lambda", "--lambda", rc.lambda);
    getd("gamma", "--gamma", rc.gamma);
    getd("delta", "--delta", rc.delta);
    getd("s0", "--s0", rc.s0);
    getd("strike", "--strike", rc.strike);
    getd("rate", "--rate", rc.rate);
    getd("maturity", "--maturity", rc.maturity);
    getd("sigma0", "--sigma0", rc.sigma0);
    getd("sigma1", "--sigma1", rc.sigma1);
    getd("eps", "--eps", rc.eps);
    if (j.contains("order") && unset("--order")) rc.order = j.at("order").get<int>();
    gets("method", "--method", rc.method);
    if (j.contains("paths") && unset("--paths")) rc.paths = j.at("paths").get<std::size_t>();
    if (j.contains("steps") && unset("--steps")) rc.steps = j.at("steps").get<std::size_t>();
    if (j.contains("seed") && unset("--seed")) rc.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("degree") && unset("--degree")) rc.degree = j.at("degree").get<int>();
    getb("paper-literal", "--paper-literal", rc.paper_literal);
    gets("format", "--format", rc.format);
    gets("out", "--out", rc.out);
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw lvexp::DomainError("cannot open output file: " + path);
    f << text;
}

bool ctx_coeffs_linear(const lvexp::ValidatedContext& ctx) {
    const auto* p = std::get_if<lvexp::PolynomialVol>(&ctx.model);
    return p && p->coeffs.size() <= 2;
}

int run_price(const RunConfig& rc) {
    using namespace lvexp;
    if (rc.eps > 0.5)
        std::cerr << "warning: eps = " << rc.eps << " is outside the small-noise regime\n";
    MarketParams mp{rc.s0, rc.strike, rc.rate, rc.maturity, rc.sigma0, rc.sigma1, rc.eps};
    VolModel model;
    if (rc.model == "exp") {
        model = ExponentialVol{rc.alpha};
    } else {
        std::vector<double> cs = rc.coeffs;
        if (cs.empty()) throw DomainError("--coeffs is required for linear/poly models");
        if (rc.model == "linear" && cs.size() > 2)
            throw DomainError("linear model takes at most two coefficients");
        model = PolynomialVol{cs};
    }
    std::optional<JumpParams> jp;
    if (rc.jumps) jp = JumpParams{rc.lambda, rc.gamma, rc.delta};
    auto ctx = validate_params(mp, model, jp);
    const Mode mode = rc.paper_literal ? Mode::kPaperLiteral : Mode::kDefault;
    const bool is_exp = rc.model == "exp";
    const bool is_linear = !is_exp && ctx_coeffs_linear(ctx);
    if (rc.order == 2 && !(is_exp && rc.method == "closed"))
        throw DomainError("order 2 is only available for the exponential closed form");
    if (rc.method == "pce" && !is_exp && !is_linear)
        throw DomainError("pce requires the exponential or linear model");
    if (rc.method == "closed" && !is_exp && !is_linear)
        throw DomainError("closed form requires the exponential or linear model");

    auto t0 = std::chrono::steady_clock::now();
    PriceBreakdown pb;
    std::optional<MCEstimate> est;
    if (rc.method == "closed") {
        if (is_exp) {
            if (rc.order == 2) {
                if (jp) throw DomainError("order 2 does not support jumps");
                pb = price_exp_o2(ctx, mode);
            } else {
                pb = jp ? price_exp_jump_o1(ctx, *jp, mode) : price_exp_o1(ctx, mode);
            }
        } else {
            pb = jp ? price_linear_jump_o1(ctx, *jp, mode) : price_linear_o1(ctx, mode);
        }
    } else {
        GenericConfig gc;
        gc.mc.n_paths = rc.paths;
        gc.mc.n_steps = rc.steps;
        gc.mc.seed = rc.seed;
        gc.mc.workers = std::max(1u, std::thread::hardware_concurrency());
        gc.pce_degree = rc.degree;
        MCEstimate e;
        pb = price_generic_o1(ctx, rc.method == "mc" ? EstimatorMethod::kMonteCarlo
                                                     : EstimatorMethod::kPce,
                              gc, mode, &e);
        if (rc.method == "mc") est = e;
    }
    auto t1 = std::chrono::steady_clock::now();
    double runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (!std::isfinite(pb.total)) {
        std::cerr << "error: non-finite price\n";
        return 1;
    }

    if (rc.format == "csv") {
        std::ostringstream os;
        os << "model,method,mode,order,base,total,mc_mean,mc_se,mc_n,runtime_ms\n";
        os << rc.model << "," << rc.method << ","
           << (rc.paper_literal ? "paper-literal" : "default") << "," << rc.order << ","
           << num6(pb.base) << "," << num6(pb.total) << ",";
        if (est) os << num6(est->mean) << "," << num6(est->std_error) << "," << est->n;
        else os << ",,";
        os << "," << num6(runtime_ms) << "\n";
        write_out(rc.out, os.str());
        return 0;
    }
    std::ostringstream os;
    os << "{\n  \"model\": \"" << rc.model << "\",\n  \"params\": {";
    os << "\"s0\": " << num17(rc.s0) << ", \"strike\": " << num17(rc.strike)
       << ", \"rate\": " << num17(rc.rate) << ", \"maturity\": " << num17(rc.maturity)
       << ", \"sigma0\": " << num17(rc.sigma0) << ", \"sigma1\": " << num17(rc.sigma1)
       << ", \"eps\": " << num17(rc.eps);
    if (is_exp) os << ", \"alpha\": " << num17(rc.alpha);
    else {
        os << ", \"coeffs\": [";
        const auto& cs = std::get<PolynomialVol>(ctx.model).coeffs;
        for (std::size_t i = 0; i < cs.size(); ++i) os << (i ? ", " : "") << num17(cs[i]);
        os << "]";
    }
    if (jp)
        os << ", \"lambda\": " << num17(jp->lambda) << ", \"gamma\": " << num17(jp->gamma)
           << ", \"delta\": " << num17(jp->delta);
    os << "},\n  \"mode\": \"" << (rc.paper_literal ? "paper-literal" : "default") << "\",\n";
    os << "  \"method\": \"" << rc.method << "\",\n";
    os << "  \"price\": {\"base\": " << num17(pb.base) << ", \"terms\": [";
    for (std::size_t i = 0; i < pb.terms.size(); ++i) {
        const auto& t = pb.terms[i];
        os << (i ? ", " : "") << "{\"label\": \"" << t.label << "\", \"order\": " << t.order
           << ", \"value\": " << num17(t.value) << "}";
    }
    os << "], \"total\": " << num17(pb.total) << "},\n";
    if (est)
        os << "  \"estimate\": {\"mean\": " << num17(est->mean) << ", \"se\": "
           << num17(est->std_error) << ", \"n\": " << est->n << "},\n";
    os << "  \"runtime_ms\": " << num17(runtime_ms) << "\n}\n";
    write_out(rc.out, os.str());
    return 0;
}

int run_table(int table_id, const std::string& out_path, const RunConfig& rc) {
    using namespace lvexp;
    auto spec = table_spec(table_id);
    if (!spec) {
        std::cerr << "error: unknown table id " << table_id
                  << " (valid ids: 2-7, 9-11, 13-15)\n";
        return 2;
    }
    MCConfig mcc;
    mcc.n_paths = rc.paths;
    mcc.n_steps = rc.steps;
    mcc.seed = rc.seed;
    mcc.workers = std::max(1u, std::thread::hardware_concurrency());
    std::ostringstream os;
    os << "table_id,s0,sigma0,eps,paper_analytical,closed_default,closed_literal,"
          "closed_published_convention,closed_correction_default,pce,mc_mean,mc_se,"
          "dev_closed_default,dev_closed_literal,dev_published_convention,"
          "dev_pce,dev_mc,note\n";
    int cell = 0;
    for (double sg : table_sigma0_grid())
        for (double eps : table_eps_grid()) {
            double analytical = spec->analytical[cell++];
            auto ctx = validate_params(table_market(*spec, sg, eps), table_model(*spec),
                                       table_jumps(*spec));
            PriceBreakdown pd, pl;
            if (spec->exponential) {
                pd = spec->with_jumps ? price_exp_jump_o1(ctx, *ctx.jumps, Mode::kDefault)
                                      : price_exp_o1(ctx, Mode::kDefault);
                pl = spec->with_jumps ? price_exp_jump_o1(ctx, *ctx.jumps, Mode::kPaperLiteral)
                                      : price_exp_o1(ctx, Mode::kPaperLiteral);
            } else {
                pd = spec->with_jumps ? price_linear_jump_o1(ctx, *ctx.jumps, Mode::kDefault)
                                      : price_linear_o1(ctx, Mode::kDefault);
                pl = spec->with_jumps ? price_linear_jump_o1(ctx, *ctx.jumps, Mode::kPaperLiteral)
                                      : price_linear_o1(ctx, Mode::kPaperLiteral);
            }
            double corr = 0.0;
            for (const auto& t : pd.terms)
                if (t.order == 1) corr += t.value;
            corr *= eps;
            GenericConfig gc;
            gc.mc = mcc;
            gc.pce_degree = rc.degree;
            MCEstimate est;
            PriceBreakdown pmc = price_generic_o1(ctx, EstimatorMethod::kMonteCarlo, gc,
                                                  Mode::kDefault, &est);
            PriceBreakdown ppce = price_generic_o1(ctx, EstimatorMethod::kPce, gc, Mode::kDefault);
            std::string note = spec->duplicate_of_nojump
                                   ? "suspected duplication: identical to the no-jump table"
                                   : "";
            auto pub = published_convention_price(*spec, sg, eps);
            std::string pub_s = pub ? num6(*pub) : "";
            std::string pub_dev = pub ? num6(std::abs(*pub - analytical)) : "";
            os << table_id << "," << num6(spec->s0) << "," << num6(sg) << "," << num6(eps) << ","
               << num6(analytical) << "," << num6(pd.total) << "," << num6(pl.total) << ","
               << pub_s << "," << num6(corr) << "," << num6(ppce.total) << ","
               << num6(pmc.total) << ","
               << num6(std::exp(-ctx.params.rate * ctx.params.maturity) * est.std_error * eps)
               << "," << num6(std::abs(pd.total - analytical)) << ","
               << num6(std::abs(pl.total - analytical)) << "," << pub_dev << ","
               << num6(std::abs(ppce.total - analytical)) << ","
               << num6(std::abs(pmc.total - analytical)) << "," << note << "\n";
        }
    write_out(out_path, os.str());
    return 0;
}

int run_check(const std::string& suite) {
    using namespace lvexp;
    std::vector<CheckResult> results;
    if (suite == "invariants" || suite == "all") {
        auto v = run_invariant_checks();
        results.insert(results.end(), v.begin(), v.end());
    }
    if (suite == "oracles" || suite == "all") {
        auto v = run_oracle_checks();
        results.insert(results.end(), v.begin(), v.end());
    }
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic-expansion option pricer for small-noise local volatility models"};
    app.require_subcommand(1);

    RunConfig rc;
    CLI::App* price_cmd = app.add_subcommand("run_price", "Price one contract");
    add_run_flags(price_cmd, rc);

    int table_id = 0;
    std::string table_out;
    CLI::App* table_cmd = app.add_subcommand("run_table", "Reproduce a reference result grid");
    table_cmd->add_option("--id", table_id, "table id (2-7, 9-11, 13-15)")->required();
    table_cmd->add_option("--out", table_out);
    table_cmd->add_option("--paths", rc.paths);
    table_cmd->add_option("--steps", rc.steps);
    table_cmd->add_option("--seed", rc.seed);
    table_cmd->add_option("--degree", rc.degree);

    std::string suite = "all";
    CLI::App* check_cmd = app.add_subcommand("run_check", "Run a validation suite");
    check_cmd->add_option("--suite", suite)->check(CLI::IsMember({"invariants", "oracles", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (price_cmd->parsed()) {
            apply_config(price_cmd, rc);
            return run_price(rc);
        }
        if (table_cmd->parsed()) return run_table(table_id, table_out, rc);
        return run_check(suite);
    } catch (const lvexp::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

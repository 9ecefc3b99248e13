// Command-line surface: simulation sampling, exact transition probabilities,
// identity verification sweeps, Tracy-Widom tables, finite-time marginals,
// and KPZ-scaling convergence studies.
//
// Exit codes: 0 success, 1 precondition violation, 2 numerical
// non-convergence.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aseplab/asep_sim.hpp"
#include "aseplab/bethe.hpp"
#include "aseplab/errors.hpp"
#include "aseplab/fredholm.hpp"
#include "aseplab/identities.hpp"
#include "aseplab/limit_study.hpp"
#include "aseplab/painleve2.hpp"
#include "aseplab/scaling.hpp"
#include "aseplab/tw_distribution.hpp"

namespace {

using nlohmann::json;

constexpr const char* kSchemaComment = "# schema-version: 1\n";

struct OutputTarget {
    std::string path;    // empty = stdout
    std::string format;  // "csv" or "json"

    void write(const std::string& text) const {
        if (path.empty()) {
            std::fputs(text.c_str(), stdout);
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw aseplab::precondition_error("cannot open output file: " + path);
            f << text;
        }
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<int> parse_config(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

std::vector<double> parse_ladder(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

void add_output_flags(CLI::App* cmd, OutputTarget& out) {
    cmd->add_option("--out", out.path, "output path (default: stdout)");
    cmd->add_option("--format", out.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_val("csv");
}

// ---------------------------------------------------------------- simulate
struct SimulateArgs {
    double p = 0.3;
    double rho = 1.0;
    int m = 1;
    double t = 1.0;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    double safety = 3.0;
    unsigned threads = 0;
    OutputTarget out;
};

int run_simulate(const SimulateArgs& a) {
    aseplab::HoppingRates rates(a.p);
    const aseplab::InitialCondition init =
        a.rho == 1.0 ? aseplab::InitialCondition::step()
                     : aseplab::InitialCondition::step_bernoulli(a.rho);
    const auto sample =
        aseplab::sample_marginal(init, rates, a.m, a.t, a.trials, a.seed, a.safety, a.threads);

    json meta{{"seed", a.seed},
              {"p", a.p},
              {"q", rates.q()},
              {"rho", a.rho},
              {"m", a.m},
              {"t", a.t},
              {"trials", a.trials},
              {"window_lo", sample.window.lo},
              {"window_hi", sample.window.hi},
              {"truncation_bias_estimate", sample.truncation_bias}};

    if (a.out.format == "json") {
        json doc{{"schema_version", 1}, {"meta", meta}, {"x_m", sample.cdf.samples()}};
        a.out.write(doc.dump(2) + "\n");
        return 0;
    }
    std::string text = kSchemaComment;
    text += "trial,x_m\n";
    for (std::size_t k = 0; k < sample.cdf.trials(); ++k) {
        // per-trial values, re-derived in trial order (samples() is sorted)
        text += std::to_string(k) + "," +
                std::to_string(aseplab::marginal_trial(init, rates, a.m, a.t, a.safety, a.seed, k)) +
                "\n";
    }
    a.out.write(text);
    if (!a.out.path.empty()) {
        std::ofstream f(a.out.path + ".meta.json", std::ios::binary);
        f << meta.dump(2) << "\n";
    } else {
        std::fprintf(stderr, "%s\n", meta.dump().c_str());
    }
    return 0;
}

// ------------------------------------------------------------------- exact
struct ExactArgs {
    double p = 0.3;
    std::string y;
    std::string x;
    std::string batch;  // CSV of X rows
    double t = 1.0;
    double radius = 0.0;
    OutputTarget out;
};

int run_exact(const ExactArgs& a) {
    aseplab::HoppingRates rates(a.p);
    aseplab::BetheOptions opt;
    opt.radius = a.radius;
    const std::vector<int> y = parse_config(a.y);

    if (!a.batch.empty()) {
        std::ifstream in(a.batch);
        if (!in) throw aseplab::precondition_error("cannot open batch file: " + a.batch);
        std::string line, text = kSchemaComment;
        std::vector<std::vector<int>> configs;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            configs.push_back(parse_config(line));
        }
        json rows = json::array();
        for (const auto& x : configs) {
            const double pr = aseplab::transition_probability(y, x, a.t, rates, opt);
            if (a.out.format == "json") {
                rows.push_back({{"x", x}, {"probability", pr}});
            } else {
                for (int v : x) text += std::to_string(v) + ",";
                text += fmt(pr) + "\n";
            }
        }
        if (a.out.format == "json") {
            a.out.write(json{{"schema_version", 1}, {"rows", rows}}.dump(2) + "\n");
        } else {
            a.out.write(text);
        }
        return 0;
    }

    const std::vector<int> x = parse_config(a.x);
    const int lo = std::min(x.front(), y.front());
    const int hi = std::max(x.back(), y.back());
    if (y.size() <= 3) {
        aseplab::TransitionTable table(y, lo, hi, a.t, rates, opt);
        std::string text;
        text += "probability      " + fmt(table.prob(x)) + "\n";
        text += "nodes            " + std::to_string(table.nodes_used()) + "\n";
        text += "radius           " + fmt(table.radius()) + "\n";
        text += "last_change      " + fmt(table.convergence_change()) + "\n";
        text += "imag_residual    " + fmt(table.max_imag_residual()) + "\n";
        a.out.write(text);
    } else {
        const double pr = aseplab::transition_probability(y, x, a.t, rates, opt);
        a.out.write("probability      " + fmt(pr) + "\n");
    }
    return 0;
}

// -------------------------------------------------------------- identities
struct IdentitiesArgs {
    double p = 0.3;
    int n_min = 2;
    int n_max = 6;
    int det_k_max = 8;
    int points = 100;
    std::uint64_t seed = 1;
    OutputTarget out;
};

int run_identities(const IdentitiesArgs& a) {
    aseplab::HoppingRates rates(a.p);
    aseplab::RngStream rng(a.seed, 0xF00D);
    std::string text = kSchemaComment;
    text += "identity,N,m,max_residual,points\n";
    json rows = json::array();
    auto emit = [&](const std::string& name, int n, int m, double res) {
        if (a.out.format == "json") {
            rows.push_back({{"identity", name}, {"N", n}, {"m", m}, {"max_residual", res},
                            {"points", a.points}});
        } else {
            text += name + "," + std::to_string(n) + "," + (m < 0 ? "" : std::to_string(m)) +
                    "," + fmt(res) + "," + std::to_string(a.points) + "\n";
        }
    };

    for (int n = a.n_min; n <= a.n_max; ++n) {
        double worst1 = 0.0;
        for (int rep = 0; rep < a.points; ++rep) {
            auto xi = aseplab::random_test_point(n, rates, rng);
            worst1 = std::max(worst1, aseplab::check_identity1(xi, rates));
        }
        emit("identity1", n, -1, worst1);
        for (int m = 0; m <= n; ++m) {
            double worst2 = 0.0, worst3 = 0.0;
            bool has2 = n >= m + 1;
            for (int rep = 0; rep < a.points; ++rep) {
                auto xi = aseplab::random_test_point(n, rates, rng);
                if (has2) worst2 = std::max(worst2, aseplab::check_identity2(xi, m, rates));
                worst3 = std::max(worst3, aseplab::check_identity3(xi, m, rates));
            }
            if (has2) emit("identity2", n, m, worst2);
            emit("identity3", n, m, worst3);
        }
    }
    for (int k = 1; k <= a.det_k_max; ++k) {
        double worst = 0.0;
        for (int rep = 0; rep < a.points; ++rep) {
            auto xi = aseplab::random_test_point(k, rates, rng);
            worst = std::max(worst, aseplab::check_det_identity(xi, rates));
        }
        emit("det", k, -1, worst);
    }
    if (a.out.format == "json") {
        a.out.write(json{{"schema_version", 1}, {"rows", rows}}.dump(2) + "\n");
    } else {
        a.out.write(text);
    }
    return 0;
}

// ---------------------------------------------------------------------- tw
struct TwArgs {
    double s_min = -8.0;
    double s_max = 4.0;
    double step = 0.05;
    bool moments = false;
    OutputTarget out;
};

int run_tw(const TwArgs& a) {
    aseplab::HastingsMcLeod hm;
    if (a.moments) {
        const auto m1 = aseplab::make_tw_distribution(hm, 1).moments();
        const auto m2 = aseplab::make_tw_distribution(hm, 2).moments();
        if (a.out.format == "json") {
            json doc{{"schema_version", 1},
                     {"F1",
                      {{"mean", m1.mean},
                       {"variance", m1.variance},
                       {"skewness", m1.skewness},
                       {"kurtosis_excess", m1.kurtosis_excess}}},
                     {"F2",
                      {{"mean", m2.mean},
                       {"variance", m2.variance},
                       {"skewness", m2.skewness},
                       {"kurtosis_excess", m2.kurtosis_excess}}}};
            a.out.write(doc.dump(2) + "\n");
            return 0;
        }
        std::string text = kSchemaComment;
        text += "beta,mean,variance,skewness,kurtosis_excess\n";
        text += "1," + fmt(m1.mean) + "," + fmt(m1.variance) + "," + fmt(m1.skewness) + "," +
                fmt(m1.kurtosis_excess) + "\n";
        text += "2," + fmt(m2.mean) + "," + fmt(m2.variance) + "," + fmt(m2.skewness) + "," +
                fmt(m2.kurtosis_excess) + "\n";
        a.out.write(text);
        return 0;
    }
    if (a.step <= 0.0) throw aseplab::precondition_error("step must be positive");
    const double h = 1e-4;  // density by central differences
    std::string text = kSchemaComment;
    text += "s,F1,F2,f1_density,f2_density\n";
    json rows = json::array();
    for (double s = a.s_min; s <= a.s_max + 1e-12; s += a.step) {
        const double f1 = hm.f1_cdf(s), f2 = hm.f2_cdf(s);
        const double d1 = (hm.f1_cdf(s + h) - hm.f1_cdf(s - h)) / (2.0 * h);
        const double d2 = (hm.f2_cdf(s + h) - hm.f2_cdf(s - h)) / (2.0 * h);
        if (a.out.format == "json") {
            rows.push_back({{"s", s}, {"F1", f1}, {"F2", f2}, {"f1_density", d1},
                            {"f2_density", d2}});
        } else {
            text += fmt(s) + "," + fmt(f1) + "," + fmt(f2) + "," + fmt(d1) + "," + fmt(d2) + "\n";
        }
    }
    if (a.out.format == "json") {
        a.out.write(json{{"schema_version", 1}, {"rows", rows}}.dump(2) + "\n");
    } else {
        a.out.write(text);
    }
    return 0;
}

// --------------------------------------------------------------------- cdf
struct CdfArgs {
    double p = 0.3;
    double rho = 1.0;
    int m = 1;
    double t = 1.0;
    int x_min = -10;
    int x_max = 10;
    OutputTarget out;
};

int run_cdf(const CdfArgs& a) {
    aseplab::HoppingRates rates(a.p);
    std::string text = kSchemaComment;
    text += "x,cdf,raw,imag_residue,n_xi,n_lambda\n";
    json rows = json::array();
    for (int x = a.x_min; x <= a.x_max; ++x) {
        const auto r = aseplab::marginal_cdf(a.m, x, a.t, rates, a.rho);
        if (a.out.format == "json") {
            rows.push_back({{"x", x},
                            {"cdf", r.value},
                            {"raw", r.raw},
                            {"imag_residue", r.imag_residue},
                            {"n_xi", r.n_xi},
                            {"n_lambda", r.n_lambda}});
        } else {
            text += std::to_string(x) + "," + fmt(r.value) + "," + fmt(r.raw) + "," +
                    fmt(r.imag_residue) + "," + std::to_string(r.n_xi) + "," +
                    std::to_string(r.n_lambda) + "\n";
        }
    }
    if (a.out.format == "json") {
        a.out.write(json{{"schema_version", 1}, {"rows", rows}}.dump(2) + "\n");
    } else {
        a.out.write(text);
    }
    return 0;
}

// --------------------------------------------------------------- converge-*
struct ConvergeArgs {
    double p = 0.25;
    double rho = 1.0;
    double sigma = 0.25;  // or v for the current study
    std::string ladder = "50,100,200";
    std::size_t trials = 20000;
    std::uint64_t seed = 20260810;
    unsigned threads = 0;
    double safety = 3.0;
    OutputTarget out;
};

int run_converge(const ConvergeArgs& a, bool particle) {
    aseplab::HoppingRates rates(a.p);
    aseplab::HastingsMcLeod hm;
    const auto f2 = aseplab::make_tw_distribution(hm, 2);
    const auto f1 = aseplab::make_tw_distribution(hm, 1);
    const auto ladder = parse_ladder(a.ladder);
    const aseplab::StudyOptions opt{a.safety, a.threads};
    const aseplab::ConvergenceReport report =
        particle ? aseplab::particle_limit_study(rates, a.rho, a.sigma, ladder, a.trials, a.seed,
                                                 f2, f1, opt)
                 : aseplab::current_limit_study(rates, a.rho, a.sigma, ladder, a.trials, a.seed,
                                                f2, f1, opt);
    if (a.out.format == "json") {
        json rungs = json::array();
        for (const auto& r : report.rungs)
            rungs.push_back({{"t", r.t}, {"ks", r.ks}, {"trials", r.trials}});
        json doc{{"schema_version", 1},
                 {"observable", report.observable},
                 {"regime", report.regime},
                 {"p", report.p},
                 {"rho", report.rho},
                 {"parameter", report.parameter},
                 {"seed", report.seed},
                 {"rungs", rungs}};
        a.out.write(doc.dump(2) + "\n");
    } else {
        a.out.write(report.to_csv());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ASEP numerics: exact transition probabilities, Fredholm marginals, "
                 "Tracy-Widom laws, and KPZ-scaling Monte Carlo studies"};
    app.set_config("--config", "", "key=value config file; flags override");
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "sample x_m(t) trajectories");
    c_sim->add_option("--p", sim.p, "right-jump rate p")->capture_default_str();
    c_sim->add_option("--rho", sim.rho, "Bernoulli density (1 = step)")->capture_default_str();
    c_sim->add_option("--m", sim.m, "particle index")->capture_default_str();
    c_sim->add_option("--t", sim.t, "process time")->capture_default_str();
    c_sim->add_option("--trials", sim.trials)->capture_default_str();
    c_sim->add_option("--seed", sim.seed)->capture_default_str();
    c_sim->add_option("--safety", sim.safety, "light-cone window factor")->capture_default_str();
    c_sim->add_option("--threads", sim.threads)->capture_default_str();
    add_output_flags(c_sim, sim.out);

    ExactArgs ex;
    auto* c_ex = app.add_subcommand("exact", "exact N-particle transition probability");
    c_ex->add_option("--p", ex.p)->capture_default_str();
    c_ex->add_option("--y", ex.y, "initial configuration, e.g. 0,1,2")->required();
    c_ex->add_option("--x", ex.x, "target configuration");
    c_ex->add_option("--batch", ex.batch, "CSV of target configurations");
    c_ex->add_option("--t", ex.t)->capture_default_str();
    c_ex->add_option("--radius", ex.radius, "contour radius (0 = auto)")->capture_default_str();
    add_output_flags(c_ex, ex.out);

    IdentitiesArgs idn;
    auto* c_id = app.add_subcommand("identities", "verify the algebraic identities");
    c_id->add_option("--p", idn.p)->capture_default_str();
    c_id->add_option("--n-min", idn.n_min)->capture_default_str();
    c_id->add_option("--n-max", idn.n_max)->capture_default_str();
    c_id->add_option("--det-k-max", idn.det_k_max)->capture_default_str();
    c_id->add_option("--points", idn.points)->capture_default_str();
    c_id->add_option("--seed", idn.seed)->capture_default_str();
    add_output_flags(c_id, idn.out);

    TwArgs tw;
    auto* c_tw = app.add_subcommand("tw", "Tracy-Widom distribution tables");
    c_tw->add_option("--s-min", tw.s_min)->capture_default_str();
    c_tw->add_option("--s-max", tw.s_max)->capture_default_str();
    c_tw->add_option("--step", tw.step)->capture_default_str();
    c_tw->add_flag("--moments", tw.moments, "print the four moments per beta");
    add_output_flags(c_tw, tw.out);

    CdfArgs cdf;
    auto* c_cdf = app.add_subcommand("cdf", "finite-time marginal P(x_m(t) <= x)");
    c_cdf->add_option("--p", cdf.p)->capture_default_str();
    c_cdf->add_option("--rho", cdf.rho)->capture_default_str();
    c_cdf->add_option("--m", cdf.m)->capture_default_str();
    c_cdf->add_option("--t", cdf.t)->capture_default_str();
    c_cdf->add_option("--x-min", cdf.x_min)->capture_default_str();
    c_cdf->add_option("--x-max", cdf.x_max)->capture_default_str();
    add_output_flags(c_cdf, cdf.out);

    ConvergeArgs cvp, cvc;
    auto* c_cvp = app.add_subcommand("converge-particle", "KS ladder of x_m vs the limit law");
    c_cvp->add_option("--p", cvp.p)->capture_default_str();
    c_cvp->add_option("--rho", cvp.rho)->capture_default_str();
    c_cvp->add_option("--sigma", cvp.sigma)->capture_default_str();
    c_cvp->add_option("--t-ladder", cvp.ladder)->capture_default_str();
    c_cvp->add_option("--trials", cvp.trials)->capture_default_str();
    c_cvp->add_option("--seed", cvp.seed)->capture_default_str();
    c_cvp->add_option("--threads", cvp.threads)->capture_default_str();
    c_cvp->add_option("--safety", cvp.safety)->capture_default_str();
    add_output_flags(c_cvp, cvp.out);

    auto* c_cvc = app.add_subcommand("converge-current", "KS ladder of T(vt) vs the limit law");
    c_cvc->add_option("--p", cvc.p)->capture_default_str();
    c_cvc->add_option("--rho", cvc.rho)->capture_default_str();
    c_cvc->add_option("--v", cvc.sigma, "speed v = x/t")->default_val("0.0");
    c_cvc->add_option("--t-ladder", cvc.ladder)->capture_default_str();
    c_cvc->add_option("--trials", cvc.trials)->capture_default_str();
    c_cvc->add_option("--seed", cvc.seed)->capture_default_str();
    c_cvc->add_option("--threads", cvc.threads)->capture_default_str();
    c_cvc->add_option("--safety", cvc.safety)->capture_default_str();
    add_output_flags(c_cvc, cvc.out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_ex->parsed()) return run_exact(ex);
        if (c_id->parsed()) return run_identities(idn);
        if (c_tw->parsed()) return run_tw(tw);
        if (c_cdf->parsed()) return run_cdf(cdf);
        if (c_cvp->parsed()) return run_converge(cvp, true);
        if (c_cvc->parsed()) return run_converge(cvc, false);
    } catch (const aseplab::precondition_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const aseplab::convergence_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

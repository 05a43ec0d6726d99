// liminfo: command-line front end for the table generator and experiments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "liminfo/designs.hpp"
#include "liminfo/dimwitness.hpp"
#include "liminfo/infometrics.hpp"
#include "liminfo/io.hpp"
#include "liminfo/oracle.hpp"

using namespace liminfo;
using Json = nlohmann::ordered_json;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::string output;
    std::string format = "text";
    bool strict = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit status for a verification failure, as opposed to bad usage (2).
constexpr int kVerificationFailed = 1;

class Sink {
public:
    explicit Sink(const std::string& path) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw UsageError("cannot write output file '" + path + "'");
        }
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    bool is_file() const { return !path_.empty(); }

private:
    std::string path_;
    std::ofstream file_;
};

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write output file '" + path + "'");
    f << j.dump(2) << '\n';
}

Json envelope(const char* command, const Common& c, Json params, Json data) {
    Json meta;
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["seed"] = c.seed;
    meta["parameters"] = std::move(params);
    Json doc;
    doc["meta"] = std::move(meta);
    doc["data"] = std::move(data);
    return doc;
}

void add_common(CLI::App* sub, Common& c, bool randomized, const char* default_format = "text") {
    c.format = default_format;
    sub->add_option("--output,-o", c.output, "Write the primary output to this file instead of stdout");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
    if (randomized) {
        sub->add_option("--seed", c.seed, "Random seed (echoed in the output metadata)");
        sub->add_flag("--strict", c.strict, "Refuse to run without an explicit --seed");
    }
}

void require_seed(const CLI::App* sub, const Common& c) {
    if (c.strict && sub->count("--seed") == 0) throw UsageError("--strict requires an explicit --seed");
}

// --- table -------------------------------------------------------------------

struct TableArgs {
    int s = 2;
    int n = 1;
    bool verify = false;
    std::string from;
};

Json table_json(const ComplementarityTable& t) {
    Json rows = Json::array();
    for (const auto& row : t.rows) rows.push_back({{"label", row.label}, {"columns", row.columns.column_lists()}});
    return {{"s", t.s}, {"N", t.N}, {"rows", std::move(rows)}};
}

int run_table(const TableArgs& a, const Common& c) {
    ComplementarityTable table;
    if (!a.from.empty()) {
        std::ifstream in(a.from, std::ios::binary);
        if (!in) throw UsageError("cannot read table file '" + a.from + "'");
        table = read_table_csv(in);
    } else {
        if (a.s < 1 || a.n < 1) throw UsageError("--s and --n must be >= 1");
        table = build_table(a.s, a.n);
    }
    std::optional<VerificationReport> report;
    if (a.verify) report = verify_table(table);

    Sink sink(c.output);
    if (c.format == "json") {
        Json data = table_json(table);
        if (report) {
            data["verified"] = report->ok();
            if (!report->ok()) data["violation"] = report->violation->describe();
        }
        Json params = {{"s", table.s}, {"n", table.N}, {"verify", a.verify}};
        if (!a.from.empty()) params["from"] = a.from;
        sink.stream() << envelope("table", c, std::move(params), std::move(data)).dump(2) << '\n';
    } else {
        // An imported table is not echoed back to stdout; the verdict is enough.
        if (a.from.empty() || sink.is_file()) write_table_csv(sink.stream(), table);
        if (report) {
            std::cout << "verified: " << (report->ok() ? "true" : "false") << '\n';
            if (!report->ok()) std::cerr << "violation: " << report->violation->describe() << '\n';
        }
    }
    return report && !report->ok() ? kVerificationFailed : 0;
}

// --- query / classical -------------------------------------------------------

struct QueryArgs {
    std::optional<int> s;
    std::string f;
    std::string mask;
};

void check_width(const std::optional<int>& s, const std::string& bits, const char* flag) {
    if (s && static_cast<int>(bits.size()) != *s) {
        throw UsageError(std::string(flag) + " must have exactly --s binary digits");
    }
}

int run_query(const QueryArgs& a, const Common& c) {
    check_width(a.s, a.f, "--f");
    check_width(a.s, a.mask, "--mask");
    const auto f = BooleanFunction::parse(a.f);
    const auto q = ParityQuestion::parse(a.mask);
    if (f.s() != q.s()) throw UsageError("--f and --mask must have the same length");
    const auto r = single_query(q, f);
    Sink sink(c.output);
    auto& os = sink.stream();
    if (c.format == "json") {
        Json data = {{"answer", r.answer}, {"outcome", r.outcome}, {"probability", r.probability}};
        os << envelope("query", c, {{"s", f.s()}, {"f", a.f}, {"mask", a.mask}}, std::move(data)).dump(2) << '\n';
    } else if (c.format == "csv") {
        os << "s,f,mask,answer,outcome,probability\n"
           << f.s() << ',' << a.f << ',' << a.mask << ',' << r.answer << ',' << r.outcome << ','
           << format_double(r.probability) << '\n';
    } else {
        os << "answer " << r.answer << '\n'
           << "outcome " << (r.outcome > 0 ? "+1" : "-1") << '\n'
           << "probability " << format_double(r.probability) << '\n';
    }
    return 0;
}

struct ClassicalArgs {
    std::optional<int> s;
    std::string mask;
    std::string f;
};

int run_classical(const ClassicalArgs& a, const Common& c) {
    check_width(a.s, a.mask, "--mask");
    const auto design = detail::parse_bits(a.mask, "--mask");
    const int s = static_cast<int>(a.mask.size());
    const auto answerable = classical_answerable_masks(s, design);
    std::optional<int> bit;
    if (!a.f.empty()) {
        if (a.f.size() != a.mask.size()) throw UsageError("--f and --mask must have the same length");
        bit = classical_query(design, BooleanFunction::parse(a.f));
    }
    const auto qubit = query_capability(TheoryLevel(2), s);
    const auto full = query_capability(TheoryLevel(s), s);

    Sink sink(c.output);
    auto& os = sink.stream();
    std::vector<std::string> masks;
    for (auto m : answerable) masks.push_back(detail::format_bits(m, s));
    if (c.format == "json") {
        Json data = {{"answerable_masks", masks},
                     {"classical_capability", answerable.size()},
                     {"qubit_capability", qubit},
                     {"level_s_capability", full}};
        if (bit) data["output"] = *bit;
        Json params = {{"s", s}, {"mask", a.mask}};
        if (!a.f.empty()) params["f"] = a.f;
        os << envelope("classical", c, std::move(params), std::move(data)).dump(2) << '\n';
    } else {
        os << "answerable masks";
        for (const auto& m : masks) os << ' ' << m;
        os << '\n' << "classical capability " << answerable.size() << '\n'
           << "qubit capability " << qubit << '\n'
           << "level-" << s << " capability " << full << '\n';
        if (bit) os << "output " << *bit << '\n';
    }
    return 0;
}

// --- info --------------------------------------------------------------------

struct InfoArgs {
    std::size_t dim = 3;
    double alpha = 2.0;
    std::optional<double> k;
    int trials = 100;
    double radius = 1.0;
};

int run_info(const InfoArgs& a, const Common& c) {
    if (a.dim < 1) throw UsageError("--dim must be >= 1");
    if (!(a.radius >= 0.0 && a.radius <= 1.0)) throw UsageError("--radius must lie in [0, 1]");
    const auto params = a.k ? InfoMeasureParams(a.alpha, *a.k) : InfoMeasureParams::normalized(a.alpha);
    // Stream 0 places the state, stream 1 drives the frame scan.
    const RandomStream root(c.seed);
    auto placement = root.derive(0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.dim));
    for (auto& x : v) x = placement.normal();
    const StateVector n(a.radius * v.normalized());
    const auto scan = invariance_scan(n, params, a.trials, root.derive(1));

    Sink sink(c.output);
    auto& os = sink.stream();
    if (c.format == "json") {
        Json p = {{"dim", a.dim}, {"alpha", a.alpha}, {"k", params.k()}, {"trials", a.trials}, {"radius", a.radius}};
        Json data = {{"norm_squared", n.coords().squaredNorm()},
                     {"base_info", scan.base_info},
                     {"max_deviation", scan.max_deviation}};
        os << envelope("info", c, std::move(p), std::move(data)).dump(2) << '\n';
    } else if (c.format == "csv") {
        os << "dim,alpha,k,trials,radius,norm_squared,base_info,max_deviation\n"
           << a.dim << ',' << format_double(a.alpha) << ',' << format_double(params.k()) << ',' << a.trials << ','
           << format_double(a.radius) << ',' << format_double(n.coords().squaredNorm()) << ','
           << format_double(scan.base_info) << ',' << format_double(scan.max_deviation) << '\n';
    } else {
        os << "seed " << c.seed << '\n'
           << "measure " << params.describe() << '\n'
           << "norm_squared " << format_double(n.coords().squaredNorm()) << '\n'
           << "base_info " << format_double(scan.base_info) << '\n'
           << "max_deviation " << format_double(scan.max_deviation) << '\n';
    }
    return 0;
}

// --- dimwit / fit ------------------------------------------------------------

struct DimwitArgs {
    int dim = 3;
    std::size_t samples = 100000;
    int bins = MeanHistogram::kDefaultBins;
    double radius = 1.0;
    bool fit = false;
};

void write_fit_text(std::ostream& os, const FitResult& fit) {
    os << "D_hat " << format_double(fit.D_hat) << '\n'
       << "stderr " << format_double(fit.std_error) << '\n'
       << "log_likelihood " << format_double(fit.log_likelihood) << '\n';
}

int run_dimwit(const DimwitArgs& a, const Common& c) {
    if (a.dim < 1) throw UsageError("--dim must be >= 1");
    if (a.samples < 1) throw UsageError("--samples must be >= 1");
    if (a.bins < 1) throw UsageError("--bins must be >= 1");
    const BallSampler sampler(a.dim, a.radius, RandomStream(c.seed));
    const auto hist = sample_means(sampler, canonical_axes(a.dim, 1), a.samples, a.bins);
    std::optional<FitResult> fit;
    if (a.fit) fit = fit_dimension(hist, a.radius);

    HistogramMeta meta;
    meta.D = a.dim;
    meta.R = a.radius;
    meta.seed = c.seed;
    meta.samples = a.samples;

    Sink sink(c.output);
    if (c.format == "json") {
        Json data = {{"histogram", to_json(hist)}};
        if (fit) data["fit"] = to_json(*fit);
        Json p = {{"dim", a.dim}, {"samples", a.samples}, {"bins", a.bins}, {"radius", a.radius},
                  {"sampler", meta.sampler}, {"rng", meta.rng}};
        sink.stream() << envelope("dimwit", c, std::move(p), std::move(data)).dump(2) << '\n';
        return 0;
    }
    write_histogram_csv(sink.stream(), hist);
    if (sink.is_file()) {
        write_json_file(c.output + ".meta.json", to_json(meta));
        if (fit) write_json_file(c.output + ".fit.json", to_json(*fit));
    } else if (fit) {
        // stdout carries the CSV; the fit summary goes to stderr.
        write_fit_text(std::cerr, *fit);
    }
    return 0;
}

struct FitArgs {
    std::string from;
    std::optional<double> radius;
};

int run_fit(const FitArgs& a, const Common& c) {
    std::ifstream in(a.from, std::ios::binary);
    if (!in) throw UsageError("cannot read histogram file '" + a.from + "'");
    const auto hist = read_histogram_csv(in);
    const double R = a.radius.value_or(hist.radius());
    const auto fit = fit_dimension(hist, R);
    Sink sink(c.output);
    auto& os = sink.stream();
    if (c.format == "json") {
        os << envelope("fit", c, {{"from", a.from}, {"radius", R}}, to_json(fit)).dump(2) << '\n';
    } else if (c.format == "csv") {
        os << "D_hat,stderr,log_likelihood,bins,samples\n"
           << format_double(fit.D_hat) << ',' << format_double(fit.std_error) << ','
           << format_double(fit.log_likelihood) << ',' << fit.bins << ',' << format_double(fit.total) << '\n';
    } else {
        write_fit_text(os, fit);
    }
    return 0;
}

// --- purity ------------------------------------------------------------------

struct PurityArgs {
    int s = 3;
    int steps = 1000;
    std::optional<double> theta;
};

int run_purity(const PurityArgs& a, const Common& c) {
    if (a.s < 2) throw UsageError("--s must be >= 2 for a qubit projection");
    if (a.steps < 0) throw UsageError("--steps must be >= 0");
    const TheoryLevel level(a.s);
    const auto triple = qubit_embedding(level, {0, 1, 2});
    // The qubit sits on the first three canonical axes; a planar run mixes the
    // third of them with the fourth, otherwise the rotation is Haar-random.
    if (a.theta && level.dim() < 4) throw UsageError("--theta needs an axis outside the triple (s >= 3)");
    RandomStream rng(c.seed);
    const Rotation r = a.theta ? Rotation::plane(level.dim(), 2, 3, *a.theta) : Rotation::random(level.dim(), rng);
    const auto trace = purity_drift(level, triple.inject(Eigen::Vector3d(0.0, 0.6, 0.8)), r, a.steps, triple);

    Sink sink(c.output);
    auto& os = sink.stream();
    if (c.format == "json") {
        Json p = {{"s", a.s}, {"steps", a.steps}, {"rotation", a.theta ? "planar" : "random"}};
        if (a.theta) p["theta"] = *a.theta;
        os << envelope("purity", c, std::move(p), {{"length", trace}}).dump(2) << '\n';
    } else {
        os << "step,length\n";
        for (std::size_t k = 0; k < trace.size(); ++k) os << k << ',' << format_double(trace[k]) << '\n';
    }
    return 0;
}

// --- halfdisc ----------------------------------------------------------------

struct HalfdiscArgs {
    std::size_t samples = 100000;
};

int run_halfdisc(const HalfdiscArgs& a, const Common& c) {
    const auto demo = disc_halfdisc_demo(a.samples, RandomStream(c.seed));
    Sink sink(c.output);
    auto& os = sink.stream();
    if (c.format == "json") {
        Json data = {{"single_axis_ks", demo.single_axis_distance}, {"two_axis_tv", demo.two_axis_distance}};
        os << envelope("halfdisc", c, {{"samples", a.samples}}, std::move(data)).dump(2) << '\n';
    } else if (c.format == "csv") {
        os << "samples,single_axis_ks,two_axis_tv\n"
           << a.samples << ',' << format_double(demo.single_axis_distance) << ','
           << format_double(demo.two_axis_distance) << '\n';
    } else {
        os << "single_axis_ks " << format_double(demo.single_axis_distance) << '\n'
           << "two_axis_tv " << format_double(demo.two_axis_distance) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complementarity tables, oracle queries and dimension witnesses"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Common table_c, query_c, classical_c, info_c, dimwit_c, fit_c, purity_c, halfdisc_c;

    TableArgs table_a;
    auto* table = app.add_subcommand("table", "Build (or import) and print a complementarity table");
    table->add_option("--s", table_a.s, "Box positions per system")->check(CLI::Range(1, 20));
    table->add_option("--n", table_a.n, "Number of systems / boxes")->check(CLI::Range(1, 16));
    table->add_flag("--verify", table_a.verify, "Check the design properties; nonzero exit on failure");
    table->add_option("--from", table_a.from, "Read the table from a CSV export instead of building it");
    add_common(table, table_c, false, "csv");

    QueryArgs query_a;
    auto* query = app.add_subcommand("query", "Ask one parity question with a single system");
    query->add_option("--s", query_a.s, "Box positions (checked against the bit strings)");
    query->add_option("--f", query_a.f, "Box configuration, f(0) leftmost")->required();
    query->add_option("--mask", query_a.mask, "Question mask, position 0 leftmost")->required();
    add_common(query, query_c, false);

    ClassicalArgs classical_a;
    auto* classical = app.add_subcommand("classical", "List the questions a classical design answers");
    classical->add_option("--s", classical_a.s, "Box positions (checked against the bit strings)");
    classical->add_option("--mask", classical_a.mask, "Flip design g, position 0 leftmost")->required();
    classical->add_option("--f", classical_a.f, "Optional box configuration to run the design on");
    add_common(classical, classical_c, false);

    InfoArgs info_a;
    auto* info = app.add_subcommand("info", "Total information of a random state and its frame invariance");
    info->add_option("--dim", info_a.dim, "State-space dimension");
    info->add_option("--alpha", info_a.alpha, "Entropy order (1 selects the Shannon limit)");
    info->add_option("--k", info_a.k, "Measure scale; defaults to the normalized choice");
    info->add_option("--trials", info_a.trials, "Random frames to compare");
    info->add_option("--radius", info_a.radius, "Length of the state vector");
    add_common(info, info_c, true);

    DimwitArgs dimwit_a;
    auto* dimwit = app.add_subcommand("dimwit", "Histogram of single-axis projections of uniform ball states");
    dimwit->add_option("--dim", dimwit_a.dim, "Ball dimension D")->required();
    dimwit->add_option("--samples", dimwit_a.samples, "Number of sampled states");
    dimwit->add_option("--bins", dimwit_a.bins, "Histogram bins");
    dimwit->add_option("--radius", dimwit_a.radius, "Ball radius R");
    dimwit->add_flag("--fit", dimwit_a.fit, "Also fit D by maximum likelihood");
    add_common(dimwit, dimwit_c, true, "csv");

    FitArgs fit_a;
    auto* fit = app.add_subcommand("fit", "Fit D to a histogram CSV");
    fit->add_option("--from", fit_a.from, "Histogram CSV (bin_lo,bin_hi,count)")->required();
    fit->add_option("--radius", fit_a.radius, "Ball radius; defaults to the last bin edge");
    add_common(fit, fit_c, false);

    PurityArgs purity_a;
    auto* purity = app.add_subcommand("purity", "Projected qubit length under repeated rotation");
    purity->add_option("--s", purity_a.s, "Theory level of the closed system");
    purity->add_option("--steps", purity_a.steps, "Rotation steps");
    purity->add_option("--theta", purity_a.theta, "Use a planar rotation by this angle instead of a random one");
    add_common(purity, purity_c, true, "csv");

    HalfdiscArgs halfdisc_a;
    auto* halfdisc = app.add_subcommand("halfdisc", "Disc versus half-disc: one axis versus two");
    halfdisc->add_option("--samples", halfdisc_a.samples, "Samples per region");
    add_common(halfdisc, halfdisc_c, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*table) return run_table(table_a, table_c);
        if (*query) return run_query(query_a, query_c);
        if (*classical) return run_classical(classical_a, classical_c);
        if (*info) {
            require_seed(info, info_c);
            return run_info(info_a, info_c);
        }
        if (*dimwit) {
            require_seed(dimwit, dimwit_c);
            return run_dimwit(dimwit_a, dimwit_c);
        }
        if (*fit) return run_fit(fit_a, fit_c);
        if (*purity) {
            if (!purity_a.theta) require_seed(purity, purity_c);
            return run_purity(purity_a, purity_c);
        }
        if (*halfdisc) {
            require_seed(halfdisc, halfdisc_c);
            return run_halfdisc(halfdisc_a, halfdisc_c);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

// Command-line entry point for the tangle library.  One subcommand per module
// surface: validate / canon for serialization, move / walk / replay for the
// rewrite engine, min for the splitting measures, smooth / bridge for
// smoothings, matrix for the integer-matrix calculus, fan-cut / close /
// verify for the surgery and bound harness, bracket for the polynomial, and
// render for diagnostic SVG pictures.
//
// Exit codes: 0 success, 1 verdict failure, 2 usage or parse error.
// Artifacts (TDF text, traces, matrices, JSON records, SVG) go to stdout or
// --out; informational summaries go to stderr and honour --quiet.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tangle/bracket.hpp"
#include "tangle/core.hpp"
#include "tangle/dual.hpp"
#include "tangle/fan.hpp"
#include "tangle/matrix.hpp"
#include "tangle/moves.hpp"
#include "tangle/render.hpp"
#include "tangle/smoothing.hpp"
#include "tangle/tdf.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerdictFail = 1;
constexpr int kUsage = 2;

std::string g_out;
bool g_quiet = false;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw tangle::Error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int write_artifact(const std::string& text) {
    if (g_out.empty()) {
        std::cout << text;
        return kOk;
    }
    std::ofstream f(g_out, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot write " << g_out << "\n";
        return kUsage;
    }
    f << text;
    return kOk;
}

void info(const std::string& line) {
    if (!g_quiet) std::cerr << line << "\n";
}

tangle::Diagram load_diagram(const std::string& path) { return tangle::parse(read_file(path)); }

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw tangle::Error("empty entry in list '" + text + "'");
        size_t used = 0;
        int v = std::stoi(item, &used);
        if (used != item.size()) throw tangle::Error("bad integer '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace tangle;

    CLI::App app{"tangle diagram toolkit"};
    app.require_subcommand(1);
    app.add_option("--out", g_out, "write the artifact to this file instead of stdout");
    app.add_flag("--quiet", g_quiet, "suppress informational messages");
    std::string g_format = "tdf";
    app.add_option("--format", g_format, "artifact text format")
        ->check(CLI::IsMember({"tdf"}));

    std::vector<std::pair<CLI::App*, std::function<int()>>> actions;
    auto cmd = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
        CLI::App* s = parent->add_subcommand(name, desc);
        s->fallthrough();
        return s;
    };

    // ---- validate ----------------------------------------------------------
    {
        auto* s = cmd(&app, "validate", "check a diagram file and report problems");
        auto path = std::make_shared<std::string>();
        s->add_option("tdf", *path, "diagram file")->required();
        actions.push_back({s, [path]() {
                               Diagram d = load_diagram(*path);
                               ValidationReport r = validate(d);
                               if (r.ok()) {
                                   info("ok");
                                   return kOk;
                               }
                               std::cout << r.to_string();
                               return kVerdictFail;
                           }});
    }

    // ---- canon -------------------------------------------------------------
    {
        auto* s = cmd(&app, "canon", "re-emit a diagram under canonical numbering");
        auto path = std::make_shared<std::string>();
        s->add_option("tdf", *path, "diagram file")->required();
        actions.push_back({s, [path]() {
                               Diagram d = load_diagram(*path);
                               return write_artifact(emit(canonicalize(d)));
                           }});
    }

    // ---- move --------------------------------------------------------------
    {
        auto* s = cmd(&app, "move", "apply move specs to a diagram");
        auto path = std::make_shared<std::string>();
        auto specs = std::make_shared<std::vector<std::string>>();
        auto ruleset = std::make_shared<std::string>("star");
        s->add_option("tdf", *path, "diagram file")->required();
        s->add_option("spec", *specs, "move specs, applied in order")->required();
        s->add_option("--ruleset", *ruleset, "move system")
            ->check(CLI::IsMember(Ruleset::names()));
        actions.push_back({s, [path, specs, ruleset]() {
                               Diagram d = load_diagram(*path);
                               std::vector<MoveSite> sites;
                               for (const auto& sp : *specs) sites.push_back(parse_move(sp));
                               const Ruleset& rs = Ruleset::by_name(*ruleset);
                               try {
                                   for (const auto& m : sites) d = apply_move(d, m, rs);
                               } catch (const Error& ex) {
                                   std::cerr << "error: " << ex.what() << "\n";
                                   return kVerdictFail;
                               }
                               return write_artifact(emit(d));
                           }});
    }

    // ---- walk --------------------------------------------------------------
    {
        auto* s = cmd(&app, "walk", "run a seeded random walk and print its trace");
        auto path = std::make_shared<std::string>();
        auto steps = std::make_shared<int>(0);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto ruleset = std::make_shared<std::string>("star");
        auto cap = std::make_shared<int>(18);
        s->add_option("tdf", *path, "seed diagram file")->required();
        s->add_option("--steps", *steps, "number of steps")->required();
        s->add_option("--seed", *seed, "random seed")->required();
        s->add_option("--ruleset", *ruleset, "move system")
            ->check(CLI::IsMember(Ruleset::names()));
        s->add_option("--max-crossings", *cap, "crossing budget");
        actions.push_back({s, [path, steps, seed, ruleset, cap]() {
                               Diagram d = load_diagram(*path);
                               MoveTrace tr =
                                   random_walk(d, *steps, *seed, Ruleset::by_name(*ruleset), {}, *cap);
                               int moved = 0;
                               for (const auto& st : tr.steps) moved += st.noop ? 0 : 1;
                               info("walk: " + std::to_string(moved) + "/" +
                                    std::to_string(tr.steps.size()) + " steps moved");
                               return write_artifact(write_trace(tr));
                           }});
    }

    // ---- replay ------------------------------------------------------------
    {
        auto* s = cmd(&app, "replay", "re-run a trace file and check its hashes");
        auto path = std::make_shared<std::string>();
        s->add_option("trace", *path, "trace file")->required();
        actions.push_back({s, [path]() {
                               MoveTrace tr = parse_trace(read_file(*path));
                               std::string why;
                               if (replay_trace(tr, &why)) {
                                   info("ok");
                                   return kOk;
                               }
                               std::cout << why << "\n";
                               return kVerdictFail;
                           }});
    }

    // ---- min ---------------------------------------------------------------
    {
        auto* s = cmd(&app, "min", "minimal intersection measures");
        auto path = std::make_shared<std::string>();
        auto ray = std::make_shared<std::string>();
        auto vert = std::make_shared<bool>(false);
        auto ij = std::make_shared<std::vector<int>>();
        auto mat = std::make_shared<bool>(false);
        s->add_option("tdf", *path, "diagram file")->required();
        s->add_option("--ray", *ray, "ray cost against one half")
            ->check(CLI::IsMember({"plus", "minus"}));
        s->add_flag("--vert", *vert, "vertical splitting cost");
        s->add_option("--ij", *ij, "splitting cost between regions i and j")->expected(2);
        s->add_flag("--matrix", *mat, "full region-to-region cost matrix");
        actions.push_back({s, [path, ray, vert, ij, mat]() {
                               int modes = int(!ray->empty()) + int(*vert) + int(!ij->empty()) +
                                           int(*mat);
                               if (modes != 1) {
                                   std::cerr << "error: pick exactly one of --ray, --vert, --ij, "
                                                "--matrix\n";
                                   return kUsage;
                               }
                               Diagram d = load_diagram(*path);
                               std::ostringstream out;
                               if (!ray->empty()) {
                                   HalfTag t = (*ray == "plus") ? HalfTag::Plus : HalfTag::Minus;
                                   out << min_ray(d, t) << "\n";
                               } else if (*vert) {
                                   out << min_vert(d) << "\n";
                               } else if (!ij->empty()) {
                                   out << min_ij(d, (*ij)[0], (*ij)[1]) << "\n";
                               } else {
                                   auto v = v_matrix(d);
                                   out << v.size() << "\n";
                                   for (const auto& row : v) {
                                       for (size_t j = 0; j < row.size(); ++j)
                                           out << (j ? " " : "") << row[j];
                                       out << "\n";
                                   }
                               }
                               return write_artifact(out.str());
                           }});
    }

    // ---- smooth ------------------------------------------------------------
    {
        auto* s = cmd(&app, "smooth", "smooth one crossing or all of them");
        auto path = std::make_shared<std::string>();
        auto crossing = std::make_shared<int>(-1);
        auto pairing = std::make_shared<int>(0);
        auto maximal = std::make_shared<bool>(false);
        s->add_option("tdf", *path, "diagram file")->required();
        auto* copt = s->add_option("--crossing", *crossing, "crossing id to smooth");
        s->add_option("--pairing", *pairing, "0 joins slots (0,1)(2,3); 1 joins (1,2)(3,0)")
            ->check(CLI::IsMember({0, 1}));
        s->add_flag("--maximal", *maximal, "smooth every crossing");
        actions.push_back({s, [path, crossing, pairing, maximal, copt]() {
                               if (*maximal == (copt->count() > 0)) {
                                   std::cerr
                                       << "error: pick exactly one of --crossing, --maximal\n";
                                   return kUsage;
                               }
                               Diagram d = load_diagram(*path);
                               Diagram r = *maximal
                                               ? maximal_smoothing(d)
                                               : smooth_crossing(d, {*crossing, *pairing});
                               return write_artifact(emit(r));
                           }});
    }

    // ---- bridge ------------------------------------------------------------
    {
        auto* s = cmd(&app, "bridge", "extract the bridge of a left-right diagram");
        auto path = std::make_shared<std::string>();
        s->add_option("tdf", *path, "diagram file")->required();
        actions.push_back({s, [path]() {
                               Diagram d = load_diagram(*path);
                               auto [dstar, b] = extract_bridge(d);
                               std::cout << "bridge strands: " << b.size() << "\n";
                               return write_artifact(emit(dstar));
                           }});
    }

    // ---- matrix ------------------------------------------------------------
    {
        auto* s = cmd(&app, "matrix", "symmetric matrix calculus");
        s->require_subcommand(1);
        {
            auto* c = cmd(s, "check-star", "verify the row-sum and parity property");
            auto path = std::make_shared<std::string>();
            c->add_option("matrix", *path, "matrix file")->required();
            actions.push_back({c, [path]() {
                                   SymMatrix e = parse_matrix(read_file(*path));
                                   StarReport r = check_star(e);
                                   if (r.ok) {
                                       info("ok");
                                       return kOk;
                                   }
                                   for (const auto& v : r.violations) std::cout << v << "\n";
                                   return kVerdictFail;
                               }});
        }
        {
            auto* c = cmd(s, "zigzag", "print the descent path");
            auto path = std::make_shared<std::string>();
            c->add_option("matrix", *path, "matrix file")->required();
            actions.push_back({c, [path]() {
                                   SymMatrix e = parse_matrix(read_file(*path));
                                   std::vector<int> p;
                                   try {
                                       p = zigzag(e);
                                   } catch (const Error& ex) {
                                       std::cerr << "error: " << ex.what() << "\n";
                                       return kVerdictFail;
                                   }
                                   std::ostringstream out;
                                   for (size_t i = 0; i < p.size(); ++i)
                                       out << (i ? " " : "") << p[i];
                                   out << "\n";
                                   return write_artifact(out.str());
                               }});
        }
        {
            auto* c = cmd(s, "xi-mu", "print the weighted total and the strand count");
            auto path = std::make_shared<std::string>();
            c->add_option("matrix", *path, "matrix file")->required();
            actions.push_back({c, [path]() {
                                   SymMatrix e = parse_matrix(read_file(*path));
                                   std::ostringstream out;
                                   out << "xi " << xi(e) << "\n"
                                       << "mu " << mu(e) << "\n";
                                   return write_artifact(out.str());
                               }});
        }
        {
            auto* c = cmd(s, "verify-key", "check xi >= mu + k - 1 over a matrix population");
            auto n = std::make_shared<int>(0);
            auto max_entry = std::make_shared<int>(2);
            auto samples = std::make_shared<int>(0);
            auto seed = std::make_shared<std::uint64_t>(0);
            c->add_option("--n", *n, "matrix order (even)")->required();
            c->add_option("--max-entry", *max_entry, "entry bound");
            c->add_option("--samples", *samples, "random sample count (0: exhaustive)");
            auto* sopt = c->add_option("--seed", *seed, "random seed");
            actions.push_back({c, [n, max_entry, samples, seed, sopt]() {
                                   if (*samples > 0 && sopt->count() == 0) {
                                       std::cerr << "error: --samples needs --seed\n";
                                       return kUsage;
                                   }
                                   long long checked = 0, failed = 0;
                                   auto judge = [&](const SymMatrix& e) {
                                       ++checked;
                                       if (!key_lemma_check(e).holds) ++failed;
                                   };
                                   if (*samples > 0) {
                                       std::mt19937_64 rng(*seed);
                                       for (int i = 0; i < *samples; ++i)
                                           judge(sample_star(*n, *max_entry, rng));
                                   } else {
                                       enumerate_star(*n, *max_entry, judge);
                                   }
                                   std::cout << "checked " << checked << "\n"
                                             << "failed " << failed << "\n";
                                   return failed == 0 ? kOk : kVerdictFail;
                               }});
        }
    }

    // ---- fan-cut -----------------------------------------------------------
    {
        auto* s = cmd(&app, "fan-cut", "cut a composite open along a splitting ray");
        auto path = std::make_shared<std::string>();
        auto rayspec = std::make_shared<std::string>("auto");
        auto em = std::make_shared<bool>(false);
        auto ep = std::make_shared<bool>(false);
        auto ee = std::make_shared<bool>(false);
        s->add_option("tdf", *path, "composite diagram file")->required();
        s->add_option("--ray", *rayspec, "'auto' or comma-separated crossed edge ids");
        s->add_flag("--emit-sminus", *em, "emit the lower piece");
        s->add_flag("--emit-splus", *ep, "emit the upper piece");
        s->add_flag("--emit-e", *ee, "emit the region matrix");
        actions.push_back({s, [path, rayspec, em, ep, ee]() {
                               Diagram t = load_diagram(*path);
                               std::vector<int> edges;
                               if (*rayspec != "auto") edges = parse_int_list(*rayspec);
                               CutPair cp;
                               try {
                                   cp = (*rayspec == "auto")
                                            ? fan_cut(t)
                                            : fan_cut(t, splitting_ray_from_edges(t, edges));
                               } catch (const Error& ex) {
                                   std::cerr << "error: " << ex.what() << "\n";
                                   return kVerdictFail;
                               }
                               std::ostringstream rayjoin;
                               for (size_t i = 0; i < cp.ray.edges.size(); ++i)
                                   rayjoin << (i ? "," : "") << cp.ray.edges[i];
                               info("k=" + std::to_string(cp.k) + " l=" + std::to_string(cp.l) +
                                    " ray=" + rayjoin.str());
                               std::ostringstream out;
                               int emits = int(*em) + int(*ep) + int(*ee);
                               if (*em) {
                                   if (emits > 1) out << "== s-minus ==\n";
                                   out << emit(cp.s_minus);
                               }
                               if (*ep) {
                                   if (emits > 1) out << "== s-plus ==\n";
                                   out << emit(cp.s_plus);
                               }
                               if (*ee) {
                                   if (emits > 1) out << "== e-matrix ==\n";
                                   out << format_matrix(e_matrix(cp.s_minus, cp.s_plus));
                               }
                               return write_artifact(out.str());
                           }});
    }

    // ---- close -------------------------------------------------------------
    {
        auto* s = cmd(&app, "close", "close one half back into a knot diagram");
        auto path = std::make_shared<std::string>();
        auto half = std::make_shared<std::string>();
        auto flip = std::make_shared<bool>(false);
        s->add_option("tdf", *path, "composite diagram file")->required();
        s->add_option("--half", *half, "which half survives")
            ->check(CLI::IsMember({"upper", "lower"}))
            ->required();
        s->add_flag("--flip-arc", *flip,
                    "flip the closing arc's layer (default: under for upper, over for lower)");
        actions.push_back({s, [path, half, flip]() {
                               Diagram t = load_diagram(*path);
                               bool upper = (*half == "upper");
                               bool arc_over = upper ? *flip : !*flip;
                               Diagram k = upper ? close_upper(t, arc_over)
                                                 : close_lower(t, arc_over);
                               info("crossings: " + std::to_string(crossing_count(k)));
                               return write_artifact(emit(k));
                           }});
    }

    // ---- verify ------------------------------------------------------------
    {
        auto* s = cmd(&app, "verify", "bound verdicts");
        s->require_subcommand(1);
        {
            auto* c = cmd(s, "hybrid", "hybrid-crossing bound report for one composite");
            auto path = std::make_shared<std::string>();
            c->add_option("tdf", *path, "composite diagram file")->required();
            actions.push_back({c, [path]() {
                                   Diagram t = load_diagram(*path);
                                   BoundReport r;
                                   try {
                                       r = hybrid_bound_check(t);
                                   } catch (const Error& ex) {
                                       std::cerr << "error: " << ex.what() << "\n";
                                       return kVerdictFail;
                                   }
                                   std::cout << bound_report_json(r) << "\n";
                                   return r.ok() ? kOk : kVerdictFail;
                               }});
        }
        {
            auto* c = cmd(s, "main", "crossing-number inequality over seeded walks");
            auto k0 = std::make_shared<std::string>();
            auto k1 = std::make_shared<std::string>();
            auto c0 = std::make_shared<long long>(0);
            auto c1 = std::make_shared<long long>(0);
            auto walks = std::make_shared<int>(1);
            auto steps = std::make_shared<int>(10);
            auto seed = std::make_shared<std::uint64_t>(0);
            auto ruleset = std::make_shared<std::string>("star");
            auto cap = std::make_shared<int>(18);
            auto threads = std::make_shared<int>(0);
            c->add_option("--k0", *k0, "first factor diagram file")->required();
            c->add_option("--k1", *k1, "second factor diagram file")->required();
            c->add_option("--c0", *c0, "claimed crossing number of the first factor")->required();
            c->add_option("--c1", *c1, "claimed crossing number of the second factor")->required();
            c->add_option("--walks", *walks, "number of walks")->required();
            c->add_option("--steps", *steps, "steps per walk")->required();
            c->add_option("--seed", *seed, "random seed")->required();
            c->add_option("--ruleset", *ruleset, "move system")
                ->check(CLI::IsMember(Ruleset::names()));
            c->add_option("--max-crossings", *cap, "crossing budget per walk");
            c->add_option("--threads", *threads, "worker threads (0: hardware)");
            actions.push_back(
                {c, [k0, k1, c0, c1, walks, steps, seed, ruleset, cap, threads]() {
                     MainRunConfig cfg;
                     cfg.k0 = load_diagram(*k0);
                     cfg.k1 = load_diagram(*k1);
                     cfg.c0 = *c0;
                     cfg.c1 = *c1;
                     cfg.walks = *walks;
                     cfg.steps = *steps;
                     cfg.seed = *seed;
                     cfg.ruleset = *ruleset;
                     cfg.max_crossings = *cap;
                     cfg.threads = *threads;
                     std::vector<std::vector<MainStepReport>> rows;
                     try {
                         rows = main_inequality_run(cfg);
                     } catch (const Error& ex) {
                         std::cerr << "error: " << ex.what() << "\n";
                         return kVerdictFail;
                     }
                     std::ostringstream out;
                     bool all_ok = true;
                     for (int w = 0; w < int(rows.size()); ++w)
                         for (const auto& r : rows[w]) {
                             out << main_report_json(r, w) << "\n";
                             all_ok &= r.chi_sum_ok && r.hybrid_ge_ok && r.main_ge_ok;
                         }
                     int rc = write_artifact(out.str());
                     if (rc != kOk) return rc;
                     return all_ok ? kOk : kVerdictFail;
                 }});
        }
    }

    // ---- bracket -----------------------------------------------------------
    {
        auto* s = cmd(&app, "bracket", "state-sum polynomial of a diagram");
        auto path = std::make_shared<std::string>();
        auto close = std::make_shared<bool>(false);
        auto norm = std::make_shared<bool>(false);
        s->add_option("tdf", *path, "diagram file")->required();
        s->add_flag("--closure", *close, "close the strand before evaluating");
        s->add_flag("--normalized", *norm, "writhe-normalized polynomial (closed diagrams)");
        actions.push_back({s, [path, close, norm]() {
                               Diagram d = load_diagram(*path);
                               if (*close) d = closure(d);
                               LaurentPoly p = *norm ? normalized(d) : bracket(d);
                               return write_artifact(p.to_string() + "\n");
                           }});
    }

    // ---- render ------------------------------------------------------------
    {
        auto* s = cmd(&app, "render", "diagnostic SVG picture");
        auto path = std::make_shared<std::string>();
        s->add_option("tdf", *path, "diagram file")->required();
        actions.push_back({s, [path]() {
                               Diagram d = load_diagram(*path);
                               return write_artifact(render_svg(d));
                           }});
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return kUsage;
    }

    for (const auto& [sub, fn] : actions) {
        if (!sub->parsed()) continue;
        try {
            return fn();
        } catch (const Error& ex) {
            std::cerr << "error: " << ex.what() << "\n";
            // Unreadable or unparsable inputs are usage errors; anything that
            // got past loading already returned a verdict above.
            return kUsage;
        }
    }
    std::cerr << "error: no subcommand\n";
    return kUsage;
}

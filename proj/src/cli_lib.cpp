#include "chainreb/cli_lib.hpp"

#include "chainreb/circle.hpp"
#include "chainreb/farber.hpp"
#include "chainreb/nilpotent.hpp"
#include "chainreb/norm.hpp"
#include "chainreb/pseudodet.hpp"
#include "chainreb/smith.hpp"
#include "chainreb/stack.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chainreb::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

} // namespace

Config Config::parse_text(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw parse_error("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw parse_error("config line " + std::to_string(line_no) + ": empty key");
        cfg.values[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open config file " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_text(buf.str());
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw parse_error("config is missing required key '" + key + "'");
    return it->second;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : std::stoll(it->second);
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : std::stod(it->second);
}

ChainComplex random_two_step_complex(Rng& rng, index_t n0, index_t n1, index_t n2,
                                     index_t entry_bound) {
    IntMatrix d1(n0, n1);
    std::vector<std::pair<index_t, index_t>> ends(static_cast<std::size_t>(n1));
    for (index_t e = 0; e < n1; ++e) {
        index_t a = static_cast<index_t>(rng.below(static_cast<std::uint64_t>(n0)));
        index_t b = static_cast<index_t>(rng.below(static_cast<std::uint64_t>(n0)));
        ends[static_cast<std::size_t>(e)] = {a, b};
        d1.add_at(b, e, Int(1));
        d1.add_at(a, e, Int(-1));
    }
    IntMatrix d2(n1, n2);
    for (index_t f = 0; f < n2; ++f) {
        index_t len = 2 + static_cast<index_t>(rng.below(4));
        index_t start = static_cast<index_t>(rng.below(static_cast<std::uint64_t>(n0)));
        index_t at = start;
        std::vector<std::pair<index_t, int>> walk;
        for (index_t s = 0; s < len; ++s) {
            index_t tries = 0;
            while (tries++ < 60) {
                index_t e = static_cast<index_t>(rng.below(static_cast<std::uint64_t>(n1)));
                auto [a, b] = ends[static_cast<std::size_t>(e)];
                if (a == at) {
                    walk.emplace_back(e, 1);
                    at = b;
                    break;
                }
                if (b == at) {
                    walk.emplace_back(e, -1);
                    at = a;
                    break;
                }
            }
        }
        if (at != start) {
            auto forward = walk;
            for (auto it = forward.rbegin(); it != forward.rend(); ++it)
                walk.emplace_back(it->first, -it->second);
        }
        for (const auto& [e, s] : walk) {
            Int cur = d2.get(e, f);
            if (abs_int(cur + s) <= entry_bound) d2.add_at(e, f, Int(s));
        }
    }
    // dropping oversized increments can break closure; repair by removing the
    // offending columns' excess against the exact boundary
    IntMatrix check = d1 * d2;
    for (index_t f = 0; f < n2; ++f) {
        bool bad = false;
        for (index_t r = 0; r < n0; ++r)
            if (check.get(r, f) != 0) bad = true;
        if (bad)
            for (index_t e = 0; e < n1; ++e) d2.set(e, f, Int(0));
    }
    return ChainComplex({n0, n1, n2}, {std::move(d1), std::move(d2)});
}

IntMatrix random_sparse_matrix(Rng& rng, index_t rows, index_t cols, index_t bound, double density) {
    IntMatrix m(rows, cols);
    for (index_t r = 0; r < rows; ++r)
        for (index_t c = 0; c < cols; ++c)
            if (rng.unit() < density) {
                std::int64_t v = rng.range(-bound, bound);
                if (v != 0) m.set(r, c, Int(v));
            }
    return m;
}

namespace {

constexpr const char* kSchema =
    "family,subgroup,index,degree,cells_src,cells_tgt,betti_q,betti_f2,log_tors,gabber_bound,"
    "ratio_tors,ratio_bound,kappa_min,flags";

struct Row {
    std::string family, subgroup, flags;
    Int index = 1;
    index_t degree = 0;
    index_t cells_src = 0, cells_tgt = 0;
    index_t betti_q = 0, betti_f2 = 0;
    double log_tors = 0, gabber = 0, ratio_tors = 0, ratio_bound = 0, kappa = 0;
};

std::string emit_rows(const std::vector<Row>& rows, const std::string& format) {
    if (format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            nlohmann::ordered_json o;
            o["family"] = r.family;
            o["subgroup"] = r.subgroup;
            o["index"] = r.index.str();
            o["degree"] = r.degree;
            o["cells_src"] = r.cells_src;
            o["cells_tgt"] = r.cells_tgt;
            o["betti_q"] = r.betti_q;
            o["betti_f2"] = r.betti_f2;
            o["log_tors"] = fmt(r.log_tors);
            o["gabber_bound"] = fmt(r.gabber);
            o["ratio_tors"] = fmt(r.ratio_tors);
            o["ratio_bound"] = fmt(r.ratio_bound);
            o["kappa_min"] = fmt(r.kappa);
            o["flags"] = r.flags;
            arr.push_back(std::move(o));
        }
        return arr.dump(2) + "\n";
    }
    std::string out = std::string("# schema: chainreb-report-v1 ") + kSchema + "\n" + kSchema + "\n";
    for (const auto& r : rows) {
        out += r.family + ',' + r.subgroup + ',' + r.index.str() + ',' + std::to_string(r.degree) +
               ',' + std::to_string(r.cells_src) + ',' + std::to_string(r.cells_tgt) + ',' +
               std::to_string(r.betti_q) + ',' + std::to_string(r.betti_f2) + ',' + fmt(r.log_tors) +
               ',' + fmt(r.gabber) + ',' + fmt(r.ratio_tors) + ',' + fmt(r.ratio_bound) + ',' +
               fmt(r.kappa, "%.6g") + ',' + r.flags + '\n';
    }
    return out;
}

std::string torsion_flags(const HomologyResult& h) {
    if (h.torsion_factors.empty()) return "ok";
    if (h.torsion_factors.size() <= 3) {
        std::string out = "ok t=";
        for (std::size_t i = 0; i < h.torsion_factors.size(); ++i) {
            if (i) out += 'x';
            out += h.torsion_factors[i].str();
        }
        return out;
    }
    return "ok t#" + std::to_string(h.torsion_factors.size());
}

ResourceCaps caps_from(const Config& cfg) {
    ResourceCaps caps;
    caps.max_entry_bits = static_cast<std::uint64_t>(cfg.get_int("caps.bits", 1 << 16));
    caps.max_minor_count = static_cast<std::uint64_t>(cfg.get_int("caps.minors", 1000000));
    caps.max_norm_iterations = static_cast<std::uint64_t>(cfg.get_int("caps.iters", 10000));
    return caps;
}

// One (subgroup, degree) batch of rows from a verified rebuilding.
void rows_for_rebuilding(std::vector<Row>& rows, const std::string& family,
                         const std::string& subgroup, const Int& index, const Rebuilding& reb,
                         double quality_scale, const ResourceCaps& caps) {
    QualityReport q = quality(reb, quality_scale, caps);
    const double idx = static_cast<double>(index);
    for (index_t j = 0; j <= reb.alpha; ++j) {
        Row row;
        row.family = family;
        row.subgroup = subgroup;
        row.index = index;
        row.degree = j;
        row.cells_src = reb.source.dim(j);
        row.cells_tgt = reb.target.dim(j);
        auto h = homology(reb.source, j, {2}, caps);
        row.betti_q = h.betti_rational;
        row.betti_f2 = h.betti_mod_p.empty() ? h.betti_rational : h.betti_mod_p[0].second;
        row.log_tors = h.log_torsion;
        row.gabber = (j < reb.target.top_degree()) ? gabber_bound(reb.target, j, caps) : 0.0;
        row.ratio_tors = row.log_tors / idx;
        row.ratio_bound = row.gabber / idx;
        row.kappa = q.kappa_min;
        row.flags = torsion_flags(h);
        if (j == reb.target.top_degree()) row.flags += " top";
        rows.push_back(std::move(row));
    }
}

RunResult run_torsion_growth(const Config& cfg) {
    const std::string family = cfg.require("family");
    const std::string format = cfg.get("format", "csv");
    ResourceCaps caps = caps_from(cfg);
    std::vector<Row> rows;
    int exit_code = 0;
    if (family == "circle") {
        const index_t n_min = cfg.get_int("n_min", 8);
        const index_t n_max = cfg.get_int("n_max", 2048);
        const double t_scale = cfg.get_double("T", 4.0);
        for (index_t n = n_min; n <= n_max; n *= 2) {
            try {
                Rebuilding reb = circle_rebuilding(n, t_scale);
                rows_for_rebuilding(rows, family, std::to_string(n) + "Z", Int(n), reb, t_scale, caps);
            } catch (const resource_limit_error&) {
                rows.push_back({family, std::to_string(n) + "Z", "cap", Int(n)});
            }
        }
    } else if (family == "torus") {
        const index_t d = cfg.get_int("d", 2);
        const index_t n_min = cfg.get_int("n_min", 2);
        const index_t n_max = cfg.get_int("n_max", 20);
        UnipotentTower tower = UnipotentTower::free_abelian(d);
        for (index_t n = n_min; n <= n_max; ++n) {
            SubgroupSpec sub;
            for (index_t j = 0; j < d; ++j)
                sub.levels.push_back({n, std::vector<Int>(static_cast<std::size_t>(j), Int(0))});
            std::string name = "diag(" + std::to_string(n) + ")^" + std::to_string(d);
            try {
                Rebuilding reb = rebuild_unipotent(tower, sub);
                rows_for_rebuilding(rows, family, name, sub.index(), reb,
                                    static_cast<double>(sub.index()), caps);
            } catch (const resource_limit_error&) {
                rows.push_back({family, name, "cap", sub.index()});
            }
        }
    } else if (family == "heisenberg") {
        const index_t n_min = cfg.get_int("n_min", 2);
        const index_t n_max = cfg.get_int("n_max", 8);
        UnipotentTower tower = UnipotentTower::heisenberg();
        for (index_t n = n_min; n <= n_max; ++n) {
            SubgroupSpec sub;
            sub.levels.push_back({n, {}});
            sub.levels.push_back({n, {Int(0)}});
            sub.levels.push_back({n, {Int(0), Int(0)}});
            std::string name = "heis(" + std::to_string(n) + ")";
            try {
                Rebuilding reb = rebuild_unipotent(tower, sub);
                rows_for_rebuilding(rows, family, name, sub.index(), reb,
                                    static_cast<double>(sub.index()), caps);
            } catch (const resource_limit_error&) {
                rows.push_back({family, name, "cap", sub.index()});
            }
        }
    } else {
        throw parse_error("unknown sweep family '" + family + "'");
    }
    return {emit_rows(rows, format), exit_code};
}

RunResult run_gabber_fuzz(const Config& cfg) {
    const std::uint64_t seed = static_cast<std::uint64_t>(
        std::stoll(cfg.require("seed"))); // seeded families must pin their seed
    const index_t count = cfg.get_int("count", 1000);
    const index_t size_max = cfg.get_int("size_max", 30);
    const index_t entry_bound = cfg.get_int("entry_bound", 5);
    const index_t matrix_count = cfg.get_int("matrix_count", 100);
    ResourceCaps caps = caps_from(cfg);
    Rng rng(seed);
    std::vector<Row> rows;
    int failures = 0;
    for (index_t i = 0; i < count; ++i) {
        index_t n0 = 4 + static_cast<index_t>(rng.below(static_cast<std::uint64_t>(size_max - 3)));
        index_t n1 = 4 + static_cast<index_t>(rng.below(static_cast<std::uint64_t>(size_max - 3)));
        index_t n2 = 1 + static_cast<index_t>(rng.below(static_cast<std::uint64_t>(size_max)));
        ChainComplex c = random_two_step_complex(rng, n0, n1, n2, entry_bound);
        for (index_t j = 0; j <= 1; ++j) {
            GabberReport rep = check_gabber(c, j, caps);
            Row row;
            row.family = "random-complex";
            row.subgroup = "seed" + std::to_string(seed) + "#" + std::to_string(i);
            row.degree = j;
            row.cells_src = c.dim(j);
            row.log_tors = rep.log_torsion;
            row.gabber = rep.bound;
            row.flags = rep.holds ? "ok" : "FAIL";
            if (!rep.holds) ++failures;
            rows.push_back(std::move(row));
        }
    }
    for (index_t i = 0; i < matrix_count; ++i) {
        IntMatrix f = random_sparse_matrix(rng, 8, 6, 3, 0.7);
        auto rep = check_cokernel_bound(f, caps);
        Row row;
        row.family = "random-matrix";
        row.subgroup = "seed" + std::to_string(seed) + "#" + std::to_string(i);
        row.log_tors = std::log(static_cast<double>(rep.torsion_order));
        row.gabber = 0.5 * std::log(static_cast<double>(rep.pseudo_det_squared));
        row.flags = rep.holds ? "ok" : "FAIL";
        if (!rep.holds) ++failures;
        rows.push_back(std::move(row));
    }
    return {emit_rows(rows, cfg.get("format", "csv")), failures == 0 ? 0 : 1};
}

RunResult run_quality_regression(const Config& cfg) {
    ResourceCaps caps = caps_from(cfg);
    std::vector<std::string> lines;
    bool pass = true;
    auto record = [&](const std::string& name, double measured, double limit) {
        bool ok = measured <= limit;
        if (!ok) pass = false;
        lines.push_back(name + "," + fmt(measured, "%.6g") + "," + fmt(limit, "%.6g") + "," +
                        (ok ? "pass" : "FAIL"));
    };
    {
        const index_t n = cfg.get_int("circle.n", 1000);
        const double t = cfg.get_double("circle.T", 10.0);
        Rebuilding reb = circle_rebuilding(n, t);
        double c_max = cfg.get_double("circle.c_max", 4.0);
        double worst = 0.0;
        for (index_t j = 0; j <= 1; ++j) {
            worst = std::max(worst, operator_norm(reb.g.component(j), 1e-2, caps).upper);
            worst = std::max(worst, operator_norm(reb.h.component(j), 1e-2, caps).upper);
        }
        worst = std::max(worst, operator_norm(reb.rho.component(0), 1e-2, caps).upper);
        record("circle.map_norms_over_T_plus_1", worst / (t + 1.0), c_max);
        record("circle.boundary_norm", operator_norm(reb.target.boundary(1), 1e-2, caps).upper,
               cfg.get_double("circle.boundary_max", 2.0));
        record("circle.cells_ratio", static_cast<double>(reb.target.dim(0)) * t / static_cast<double>(n),
               cfg.get_double("circle.cells_max", 2.0));
    }
    {
        const index_t n = cfg.get_int("torus.n", 10);
        SubgroupSpec sub;
        sub.levels.push_back({n, {}});
        sub.levels.push_back({n, {Int(0)}});
        Rebuilding reb = rebuild_unipotent(UnipotentTower::free_abelian(2), sub);
        QualityReport q = quality(reb, static_cast<double>(sub.index()), caps);
        record("torus.kappa_min", q.kappa_min, cfg.get_double("torus.kappa_max", 2.2));
    }
    {
        const index_t n_max = cfg.get_int("heisenberg.n_max", 8);
        double worst = 0.0;
        for (index_t n = 2; n <= n_max; ++n) {
            SubgroupSpec sub;
            sub.levels.push_back({n, {}});
            sub.levels.push_back({n, {Int(0)}});
            sub.levels.push_back({n, {Int(0), Int(0)}});
            Rebuilding reb = rebuild_unipotent(UnipotentTower::heisenberg(), sub);
            QualityReport q = quality(reb, static_cast<double>(sub.index()), caps);
            worst = std::max(worst, q.kappa_min);
        }
        record("heisenberg.kappa_min_sweep", worst, cfg.get_double("heisenberg.kappa_max", 3.0));
    }
    std::string report = "# quality regression: name,measured,limit,verdict\n";
    for (const auto& l : lines) report += l + "\n";
    return {report, pass ? 0 : 1};
}

RunResult run_farber(const Config& cfg) {
    const index_t n_max = cfg.get_int("n_max", 8);
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    Rng rng(seed);
    std::vector<std::string> lines;
    bool pass = true;
    const std::vector<Word> s{Word::parse("x")};
    const std::vector<std::string> lambda{"x", "z"};
    for (index_t n = 2; n <= n_max; ++n) {
        for (int kind = 0; kind < 2; ++kind) {
            PermutationAction action =
                kind == 0 ? heisenberg_mod_regular(n) : heisenberg_mod_cosets(n);
            const std::string name =
                (kind == 0 ? "heis_regular(" : "heis_cosets(") + std::to_string(n) + ")";
            for (index_t num = 1; num <= 4; ++num) {
                Rat delta(num, 4);
                Rat threshold = delta * delta / Rat(static_cast<index_t>(s.size()));
                bool inside = in_neighborhood(action, s, threshold);
                Rat frac = intersection_statistic(action, lambda, s, delta);
                bool ok = !inside || frac >= Rat(1) - delta;
                if (!ok) pass = false;
                std::stringstream row;
                row << name << ",delta=" << delta << ",inV=" << (inside ? 1 : 0)
                    << ",fraction=" << frac << "," << (ok ? "pass" : "FAIL");
                lines.push_back(row.str());
            }
            // conjugation invariance spot checks
            const std::vector<std::string> names = action.generator_names();
            for (int trial = 0; trial < 5; ++trial) {
                Word w;
                index_t len = 1 + static_cast<index_t>(rng.below(3));
                for (index_t i = 0; i < len; ++i)
                    w.letters.push_back({names[rng.below(names.size())], rng.unit() < 0.5});
                Word conj;
                conj.letters.push_back({names[rng.below(names.size())], false});
                Word conjugated;
                conjugated.letters = conj.letters;
                for (const auto& l : w.letters) conjugated.letters.push_back(l);
                Word::Letter back = conj.letters[0];
                back.inverse = true;
                conjugated.letters.push_back(back);
                bool ok = fixed_point_ratio(action, w) == fixed_point_ratio(action, conjugated);
                if (!ok) {
                    pass = false;
                    lines.push_back(name + ",conj_invariance,FAIL:" + w.str());
                }
            }
        }
    }
    std::string report = "# farber: action,delta,inV,fraction,verdict\n";
    for (const auto& l : lines) report += l + "\n";
    return {report, pass ? 0 : 1};
}

RunResult run_homology(const std::vector<std::string>& args) {
    if (args.empty()) throw parse_error("homology needs a chain complex file");
    std::vector<std::int64_t> primes{2, 3};
    std::string format = "csv";
    std::string file = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--primes" && i + 1 < args.size()) {
            primes.clear();
            std::stringstream ss(args[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) primes.push_back(std::stoll(tok));
        } else if (args[i] == "--format" && i + 1 < args.size()) {
            format = args[++i];
        }
    }
    std::ifstream is(file);
    if (!is) throw parse_error("cannot open " + file);
    ChainComplex c = ChainComplex::read(is);
    std::vector<Row> rows;
    for (index_t j = 0; j <= c.top_degree(); ++j) {
        auto h = homology(c, j, primes);
        Row row;
        row.family = "file";
        row.subgroup = file;
        row.degree = j;
        row.cells_src = c.dim(j);
        row.betti_q = h.betti_rational;
        row.betti_f2 = h.betti_mod_p.empty() ? 0 : h.betti_mod_p[0].second;
        row.log_tors = h.log_torsion;
        row.gabber = j < c.top_degree() ? gabber_bound(c, j) : 0.0;
        row.flags = torsion_flags(h);
        if (h.truncated) row.flags += " top";
        rows.push_back(std::move(row));
    }
    return {emit_rows(rows, format), 0};
}

RunResult run_rebuild(const std::vector<std::string>& args) {
    if (args.empty()) throw parse_error("rebuild needs a family: circle|torus|heisenberg");
    const std::string family = args[0];
    std::string out_file, format = "csv";
    std::vector<std::string> positional;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--out" && i + 1 < args.size())
            out_file = args[++i];
        else if (args[i] == "--format" && i + 1 < args.size())
            format = args[++i];
        else
            positional.push_back(args[i]);
    }
    Rebuilding reb;
    std::string name;
    Int index(1);
    double scale = 1.0;
    if (family == "circle") {
        if (positional.size() < 2) throw parse_error("rebuild circle <N> <T>");
        index_t n = std::stoll(positional[0]);
        double t = std::stod(positional[1]);
        reb = circle_rebuilding(n, t);
        name = std::to_string(n) + "Z";
        index = n;
        scale = t;
    } else if (family == "torus") {
        if (positional.size() < 2) throw parse_error("rebuild torus <d> <N>");
        index_t d = std::stoll(positional[0]);
        index_t n = std::stoll(positional[1]);
        SubgroupSpec sub;
        for (index_t j = 0; j < d; ++j)
            sub.levels.push_back({n, std::vector<Int>(static_cast<std::size_t>(j), Int(0))});
        reb = rebuild_unipotent(UnipotentTower::free_abelian(d), sub);
        name = "diag(" + std::to_string(n) + ")^" + std::to_string(d);
        index = sub.index();
        scale = static_cast<double>(index);
    } else if (family == "heisenberg") {
        if (positional.empty()) throw parse_error("rebuild heisenberg <N>");
        index_t n = std::stoll(positional[0]);
        SubgroupSpec sub;
        sub.levels.push_back({n, {}});
        sub.levels.push_back({n, {Int(0)}});
        sub.levels.push_back({n, {Int(0), Int(0)}});
        reb = rebuild_unipotent(UnipotentTower::heisenberg(), sub);
        name = "heis(" + std::to_string(n) + ")";
        index = sub.index();
        scale = static_cast<double>(index);
    } else {
        throw parse_error("unknown rebuild family '" + family + "'");
    }
    int exit_code = verify(reb).empty() ? 0 : 1;
    if (!out_file.empty()) {
        std::ofstream os(out_file);
        write_rebuilding(os, reb);
    }
    std::vector<Row> rows;
    rows_for_rebuilding(rows, family, name, index, reb, scale, {});
    return {emit_rows(rows, format), exit_code};
}

void apply_caps_flag(Config& cfg, const std::string& spec) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t eq = item.find('=');
        if (eq == std::string::npos) throw parse_error("--caps expects k=v[,k=v...]");
        cfg.values["caps." + item.substr(0, eq)] = item.substr(eq + 1);
    }
}

} // namespace

RunResult run_command(const std::vector<std::string>& args) {
    try {
        if (args.empty())
            return {"usage: chainreb homology|rebuild|sweep|gabber-fuzz|farber|quality-regression ...\n",
                    2};
        const std::string verb = args[0];
        std::vector<std::string> rest(args.begin() + 1, args.end());
        if (verb == "homology") return run_homology(rest);
        if (verb == "rebuild") return run_rebuild(rest);
        // config-driven verbs: first positional is the config file, flags may
        // override individual keys
        if (verb == "sweep" || verb == "gabber-fuzz" || verb == "farber" ||
            verb == "quality-regression") {
            Config cfg;
            std::string out_file;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                if (rest[i] == "--seed" && i + 1 < rest.size())
                    cfg.values["seed"] = rest[++i];
                else if (rest[i] == "--format" && i + 1 < rest.size())
                    cfg.values["format"] = rest[++i];
                else if (rest[i] == "--caps" && i + 1 < rest.size())
                    apply_caps_flag(cfg, rest[++i]);
                else if (rest[i] == "--out" && i + 1 < rest.size())
                    out_file = rest[++i];
                else {
                    Config file_cfg = Config::parse_file(rest[i]);
                    for (auto& [k, v] : file_cfg.values)
                        if (!cfg.has(k)) cfg.values[k] = v;
                }
            }
            RunResult result;
            if (verb == "sweep")
                result = run_torsion_growth(cfg);
            else if (verb == "gabber-fuzz")
                result = run_gabber_fuzz(cfg);
            else if (verb == "farber")
                result = run_farber(cfg);
            else
                result = run_quality_regression(cfg);
            if (!out_file.empty()) {
                std::ofstream os(out_file);
                os << result.report;
            }
            return result;
        }
        return {"unknown verb '" + verb + "'\n", 2};
    } catch (const parse_error& e) {
        return {std::string("error: ") + e.what() + "\n", 2};
    } catch (const std::exception& e) {
        return {std::string("error: ") + e.what() + "\n", 1};
    }
}

} // namespace chainreb::cli

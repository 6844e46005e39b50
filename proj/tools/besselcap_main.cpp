// besselcap: batch front end for the weighted-orthant potential toolkit.
// Subcommands map one-to-one onto library operations; flags are uniform
// "--key value" pairs so that JSON job files can drive the same handlers.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "besselcap/besselcap.hpp"
#include "besselcap/io.hpp"

using namespace besselcap;

namespace {

using Params = std::map<std::string, std::string>;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double get_num(const Params& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw io::ParseError("field '" + key + "' is missing");
    return io::detail::parse_number(it->second, key);
}

double get_num(const Params& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : io::detail::parse_number(it->second, key);
}

int get_int(const Params& p, const std::string& key, int dflt) {
    return static_cast<int>(get_num(p, key, dflt));
}

std::string get_str(const Params& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw io::ParseError("field '" + key + "' is missing");
    return it->second;
}

std::string get_str(const Params& p, const std::string& key, const std::string& dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

bool has(const Params& p, const std::string& key) { return p.count(key) > 0; }

MultiIndexA get_multiindex(const Params& p) {
    std::string spec = get_str(p, "a");
    std::vector<double> ws;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) ws.push_back(io::detail::parse_number(tok, "a"));
    if (ws.empty()) throw io::ParseError("field 'a': no weights given");
    return MultiIndexA::from_weights(ws);
}

RadialKernel get_kernel(const Params& p, const MultiIndexA& A) {
    if (has(p, "kernel")) return io::kernel_from_json(io::load_json(get_str(p, "kernel")), A);
    std::string type = get_str(p, "type", "bessel");
    io::json j;
    j["type"] = type;
    if (type == "bessel") j["nu"] = get_num(p, "nu");
    if (type == "riesz") j["beta"] = get_num(p, "beta");
    if (type == "custom") j["table"] = get_str(p, "table");
    return io::kernel_from_json(j, A);
}

GaugeFunction get_gauge(const Params& p) {
    if (has(p, "gauge")) return io::gauge_from_json(io::load_json(get_str(p, "gauge")));
    if (has(p, "gauge-power")) return GaugeFunction::power(get_num(p, "gauge-power"));
    throw io::ParseError("field 'gauge': provide --gauge file.json or --gauge-power c");
}

CantorSpec get_cantor(const Params& p) {
    if (has(p, "spec")) return io::cantor_from_json(io::load_json(get_str(p, "spec")));
    if (has(p, "geometric"))
        return CantorSpec::geometric_spec(get_int(p, "n", 1), get_num(p, "q0", 0.0),
                                          get_num(p, "l0", 1.0), get_num(p, "geometric"),
                                          get_int(p, "levels", 12));
    throw io::ParseError("field 'spec': provide --spec file.json or --geometric lambda");
}

void provenance(std::ostream& out, const std::string& cmd, const Params& p) {
    out << "# besselcap " << kVersion << "\n";
    out << "# cmd: " << cmd;
    for (const auto& [k, v] : p) out << " --" << k << " " << v;
    out << "\n";
    out << "# seed: " << get_str(p, "seed", "0") << "\n";
}

// ---- subcommand handlers ------------------------------------------------

int run_kernel(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    RadialKernel k = get_kernel(p, A);
    std::vector<PointPlus> pts = io::read_points_csv(get_str(p, "points"));
    provenance(out, "kernel", p);
    for (std::size_t d = 0; d < A.dim(); ++d) out << "x" << (d + 1) << ",";
    out << "value\n";
    for (const PointPlus& x : pts) {
        for (double c : x.x) out << fmt(c) << ",";
        out << fmt(k(x.norm())) << "\n";
    }
    return 0;
}

int run_convolve(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    std::vector<std::string> axes;
    {
        std::stringstream ss(get_str(p, "f-axes"));
        std::string tok;
        while (std::getline(ss, tok, ',')) axes.push_back(tok);
    }
    GridFunction f = io::read_grid_function(axes, get_str(p, "f-values"));
    RadialKernel k = get_kernel(p, A);
    std::vector<PointPlus> pts = io::read_points_csv(get_str(p, "points"));
    provenance(out, "convolve", p);
    for (std::size_t d = 0; d < A.dim(); ++d) out << "x" << (d + 1) << ",";
    out << "value\n";
    for (const PointPlus& x : pts) {
        double v = convolve(f, [&](const PointPlus& t) { return k(t.norm()); }, x, A);
        for (double c : x.x) out << fmt(c) << ",";
        out << fmt(v) << "\n";
    }
    return 0;
}

int run_maximal(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    DiscreteMeasure mu = io::read_measure_csv(get_str(p, "measure"));
    std::vector<PointPlus> pts = io::read_points_csv(get_str(p, "points"));
    provenance(out, "maximal", p);
    for (std::size_t d = 0; d < A.dim(); ++d) out << "x" << (d + 1) << ",";
    out << "value\n";
    for (const PointPlus& x : pts) {
        double v;
        if (has(p, "d")) {
            double d = get_num(p, "d");
            v = has(p, "trunc") ? truncated_maximal(mu, x, d, get_num(p, "trunc"), A)
                                : fractional_maximal(mu, x, d, A);
        } else {
            v = maximal(mu, x, A);
        }
        for (double c : x.x) out << fmt(c) << ",";
        out << fmt(v) << "\n";
    }
    return 0;
}

int run_wolff_energy(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    WolffParams params(A, get_num(p, "nu"), get_num(p, "p"));
    params.k_max = get_int(p, "kmax", params.k_max);
    params.r_min = get_num(p, "rmin", params.r_min);
    params.delta = get_num(p, "delta", params.delta);
    DiscreteMeasure mu = io::read_measure_csv(get_str(p, "measure"));
    WolffEnergy we = wolff_energy(mu, params);
    provenance(out, "wolff-energy", p);
    bool with_pe = get_str(p, "with-potential", "0") != "0";
    out << "wolff_energy,divergent" << (with_pe ? ",potential_energy,ratio" : "") << "\n";
    out << fmt(we.value) << "," << (we.divergent ? 1 : 0);
    int code = 0;
    if (with_pe) {
        WolffEnergy pe = potential_energy(mu, params);
        out << "," << fmt(pe.value) << "," << fmt(we.value > 0.0 ? pe.value / we.value : 0.0);
        code = std::max(code, pe.divergent ? 3 : 0);
    }
    out << "\n";
    return std::max(code, we.divergent ? 3 : 0);
}

int run_capacity(const std::string& which, const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    double nu = get_num(p, "nu"), pexp = get_num(p, "p");
    CompactSetSample K = io::set_from_json(io::load_json(get_str(p, "set")));
    K.validate();
    CapacitySolveOpts opts;
    opts.iterations = get_int(p, "iters", opts.iterations);
    opts.mesh_offset = get_num(p, "mesh-offset", opts.mesh_offset);
    provenance(out, "capacity " + which, p);
    if (which == "primal") {
        RadialKernel G = RadialKernel::bessel(A, nu);
        double hi = get_num(p, "grid-hi", K.box_hi.empty() ? 4.0 : K.box_hi[0] + 2.5);
        std::size_t cells = static_cast<std::size_t>(get_int(p, "grid-cells", 128));
        std::vector<std::vector<double>> axes(A.dim(),
                                              GridFunction::uniform_axis(0.0, hi, cells + 1));
        double v = capacity_primal_upper(K, G, pexp, A, axes, opts);
        out << "method,estimate,samples,cells\n";
        out << "primal_upper," << fmt(v) << "," << K.samples.size() << "," << cells << "\n";
        return 0;
    }
    if (which == "dual") {
        RadialKernel G = RadialKernel::bessel(A, nu);
        double v = capacity_dual_lower(K, G, pexp, A, opts);
        out << "method,estimate,samples\n";
        out << "dual_lower," << fmt(v) << "," << K.samples.size() << "\n";
        return 0;
    }
    if (which == "wolff") {
        WolffParams params(A, nu, pexp);
        CapacityEstimate est = capacity_wolff(K, params, opts);
        out << "method,lower,iterations,notes\n";
        out << "wolff," << fmt(est.lower) << "," << est.iterations << "," << est.notes << "\n";
        return 0;
    }
    if (which == "covering") {
        WolffParams params(A, nu, pexp);
        CoveringBound cb = capacity_covering_upper(K, params);
        out << "method,bound,classification,terms\n";
        out << "covering," << fmt(cb.value) << ","
            << (cb.divergent_integral ? "zero" : "positive") << "," << cb.terms.size() << "\n";
        return 0;
    }
    throw io::ParseError("field 'capacity': unknown estimator '" + which + "'");
}

int run_cantor_classify(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    CantorSpec spec = get_cantor(p);
    SeriesClassification c =
        classify_capacity_series(spec, A, get_num(p, "nu"), get_num(p, "p"));
    provenance(out, "cantor classify", p);
    out << "verdict,limit_ratio,levels\n";
    out << to_string(c.verdict) << "," << fmt(c.limit_ratio) << "," << c.terms.size() << "\n";
    return 0;
}

int run_cantor_construct(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    GaugeFunction h = get_gauge(p);
    Construction c = construct_prescribed(h, A, get_int(p, "n", 1), get_int(p, "levels", 8));
    provenance(out, "cantor construct", p);
    out << "k,l_k,h_l_k,residual\n";
    for (std::size_t k = 1; k < c.spec.lengths.size(); ++k) {
        out << k << "," << fmt(c.spec.lengths[k]) << "," << fmt(c.h_values[k - 1]) << ","
            << fmt(c.residuals[k - 1]) << "\n";
    }
    return 0;
}

int run_hausdorff_content(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    DyadicSetRep E = io::dyadic_from_json(io::load_json(get_str(p, "set")));
    GaugeFunction h = get_gauge(p);
    double rho = has(p, "rho") ? get_num(p, "rho") : std::numeric_limits<double>::infinity();
    double v = hausdorff_content(E, h, A, rho);
    provenance(out, "hausdorff content", p);
    out << "content\n" << fmt(v) << "\n";
    return 0;
}

int run_hausdorff_frostman(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    (void)A;
    DyadicSetRep E = io::dyadic_from_json(io::load_json(get_str(p, "set")));
    GaugeFunction h = get_gauge(p);
    DiscreteMeasure mu = frostman_measure(E, h, get_int(p, "levels", std::max(1, E.level - 1)));
    provenance(out, "hausdorff frostman", p);
    io::write_measure_csv(out, mu);
    return 0;
}

int run_blip(const Params& p, std::ostream& out) {
    std::vector<PointPlus> pts = io::read_points_csv(get_str(p, "points"));
    std::string map = get_str(p, "map", "identity");
    double factor = get_num(p, "factor", 2.0);
    double L;
    if (map == "identity") {
        L = b_lipschitz_constant([](const PointPlus& x) { return x; }, pts);
    } else if (map == "scale") {
        L = b_lipschitz_constant(
            [factor](const PointPlus& x) {
                std::vector<double> y = x.x;
                for (double& c : y) c *= factor;
                return PointPlus(y);
            },
            pts);
    } else {
        throw io::ParseError("field 'map': unknown map '" + map + "'");
    }
    provenance(out, "blip", p);
    out << "map,constant\n" << map << "," << fmt(L) << "\n";
    return 0;
}

int run_lb(const Params& p, std::ostream& out) {
    MultiIndexA A = get_multiindex(p);
    double lo = get_num(p, "lo", 0.5), hi = get_num(p, "hi", 1.5);
    int base = get_int(p, "points", 9), levels = get_int(p, "levels", 3);
    std::vector<double> res = fundamental_solution_residuals(
        A, std::vector<double>(A.dim(), lo), std::vector<double>(A.dim(), hi),
        static_cast<std::size_t>(base), levels);
    provenance(out, "lb", p);
    out << "level,residual,order\n";
    for (std::size_t l = 0; l < res.size(); ++l) {
        out << l << "," << fmt(res[l]) << ",";
        out << (l == 0 ? std::string("") : fmt(std::log2(res[l - 1] / res[l]))) << "\n";
    }
    return 0;
}

int dispatch(const std::vector<std::string>& cmd, const Params& p, std::ostream& out) {
    if (cmd.empty()) throw io::ParseError("field 'subcommand' is missing");
    const std::string& c0 = cmd[0];
    if (c0 == "kernel") return run_kernel(p, out);
    if (c0 == "convolve") return run_convolve(p, out);
    if (c0 == "maximal") return run_maximal(p, out);
    if (c0 == "wolff-energy") return run_wolff_energy(p, out);
    if (c0 == "capacity" && cmd.size() > 1) return run_capacity(cmd[1], p, out);
    if (c0 == "cantor" && cmd.size() > 1) {
        if (cmd[1] == "classify") return run_cantor_classify(p, out);
        if (cmd[1] == "construct") return run_cantor_construct(p, out);
    }
    if (c0 == "hausdorff" && cmd.size() > 1) {
        if (cmd[1] == "content") return run_hausdorff_content(p, out);
        if (cmd[1] == "frostman") return run_hausdorff_frostman(p, out);
    }
    if (c0 == "blip") return run_blip(p, out);
    if (c0 == "lb") return run_lb(p, out);
    throw io::ParseError("field 'subcommand': unknown command '" + c0 + "'");
}

struct JobRow {
    std::vector<std::string> cmd;
    Params params;
};

int run_job_file(const std::string& path, std::ostream& out) {
    io::json j = io::load_json(path);
    std::string sub = io::detail::require<std::string>(j, "subcommand");
    std::vector<std::string> cmd;
    {
        std::stringstream ss(sub);
        std::string tok;
        while (ss >> tok) cmd.push_back(tok);
    }
    Params base;
    if (j.contains("args"))
        for (auto& [k, v] : j.at("args").items())
            base[k] = v.is_string() ? v.get<std::string>() : v.dump();
    if (j.contains("seed")) base["seed"] = std::to_string(j.at("seed").get<long long>());

    std::vector<JobRow> rows{{cmd, base}};
    if (j.contains("sweep")) {
        for (auto& [key, values] : j.at("sweep").items()) {
            std::vector<JobRow> expanded;
            for (const JobRow& row : rows) {
                for (const auto& v : values) {
                    JobRow r = row;
                    r.params[key] = v.is_string() ? v.get<std::string>() : v.dump();
                    expanded.push_back(std::move(r));
                }
            }
            rows.swap(expanded);
        }
    }

    int jobs = 1;
    if (const char* env = std::getenv("BESSELCAP_JOBS")) jobs = std::atoi(env);
    if (j.contains("jobs")) jobs = j.at("jobs").get<int>();
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(rows.size())));

    std::vector<std::string> outputs(rows.size());
    std::vector<int> codes(rows.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= rows.size()) return;
            std::ostringstream os;
            try {
                codes[i] = dispatch(rows[i].cmd, rows[i].params, os);
            } catch (const std::exception& e) {
                os << "# error: " << e.what() << "\n";
                codes[i] = 2;
            }
            outputs[i] = os.str();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int code = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << "# --- row " << i;
        for (const auto& [k, v] : rows[i].params) out << " " << k << "=" << v;
        out << " ---\n";
        out << outputs[i];
        code = std::max(code, codes[i]);
    }
    return code;
}

const char* kUsage = R"(besselcap: nonlinear potential theory with Bessel convolution

usage: besselcap <subcommand> [--key value ...]

subcommands:
  kernel            evaluate a radial kernel at points      (--type --nu|--beta --a --points)
  convolve          kernel convolution of a grid function   (--f-axes --f-values --a --points)
  maximal           (fractional/truncated) maximal measure  (--measure --a [--d] [--trunc] --points)
  wolff-energy      Wolff and potential energies            (--measure --a --nu --p [--with-potential 1])
  capacity primal|dual|wolff|covering                       (--set set.json --a --nu --p)
  cantor classify   capacity verdict for a Cantor set       (--geometric l | --spec f.json; --n --a --p --nu)
  cantor construct  prescribed-gauge Cantor construction    (--gauge-power c | --gauge f.json; --a --n --levels)
  hausdorff content|frostman                                (--set dyadic.json; --gauge-power c; --a)
  blip              empirical B-Lipschitz constant          (--points --map identity|scale [--factor])
  lb                Laplace-Bessel residual study           (--a [--lo --hi --points --levels])

global flags: -o/--output FILE, --seed N, --job FILE.json (batch mode, --jobs N or BESSELCAP_JOBS)
exit codes: 0 ok, 2 bad input/precondition, 3 numerical divergence flag
)";

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "-h" || args[0] == "--help") {
        std::cout << kUsage;
        return args.empty() ? 2 : 0;
    }
    if (args[0] == "--version") {
        std::cout << "besselcap " << kVersion << "\n";
        return 0;
    }

    std::string output_path;
    std::string job_path;
    std::vector<std::string> cmd;
    Params params;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "-o" || a == "--output") {
            if (i + 1 >= args.size()) {
                std::cerr << "error: field 'output': missing value\n";
                return 2;
            }
            output_path = args[++i];
        } else if (a == "--job") {
            if (i + 1 >= args.size()) {
                std::cerr << "error: field 'job': missing value\n";
                return 2;
            }
            job_path = args[++i];
        } else if (a.rfind("--", 0) == 0) {
            std::string key = a.substr(2);
            if (i + 1 >= args.size()) {
                std::cerr << "error: field '" << key << "': missing value\n";
                return 2;
            }
            params[key] = args[++i];
        } else {
            cmd.push_back(a);
        }
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!output_path.empty()) {
        file.open(output_path);
        if (!file) {
            std::cerr << "error: field 'output': cannot open " << output_path << "\n";
            return 2;
        }
        out = &file;
    }

    try {
        if (!job_path.empty()) return run_job_file(job_path, *out);
        return dispatch(cmd, params, *out);
    } catch (const io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConstructionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const RefineGridError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

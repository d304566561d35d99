#include "toda/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "toda/determinants.hpp"
#include "toda/errors.hpp"
#include "toda/gutzwiller.hpp"
#include "toda/nlie.hpp"
#include "toda/oracle.hpp"
#include "toda/quantize.hpp"

#ifndef TODA_VERSION
#define TODA_VERSION "unknown"
#endif

namespace toda::cli {

const char* version() { return TODA_VERSION; }

std::string to_csv(const std::vector<double>& lambda, const std::vector<double>& ln_y)
{
    std::ostringstream os;
    os.precision(17);
    os << "lambda,ln_y\n";
    for (std::size_t i = 0; i < lambda.size(); ++i) os << lambda[i] << ',' << ln_y[i] << '\n';
    return os.str();
}

namespace {

const std::set<std::string> modes{"check", "nlie", "quantize", "spectrum", "oracle-n2"};

struct Numerics {
    std::optional<double> lambda_max;
    std::optional<int> grid_points;
    double tol = 1e-12;
    int depth = 0;
    double tail_tol = 1e-13;
    int max_iter = 40;
};

struct Config {
    ModelParams params;
    std::vector<cplx> tau, delta;
    std::vector<int> n;
    double momentum = 0.0;
    int count = 4;
    Numerics num;
};

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ValidationError(where + "." + it.key() + ": unknown key");
}

double number(const Json& j, const std::string& field)
{
    if (!j.is_number()) throw ValidationError(field + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(field + ": must be finite");
    return v;
}

int integer(const Json& j, const std::string& field)
{
    if (!j.is_number_integer()) throw ValidationError(field + ": expected an integer");
    return j.get<int>();
}

// a root is either a number or [re, im]
std::vector<cplx> roots(const Json& j, const std::string& field)
{
    if (!j.is_array()) throw ValidationError(field + ": expected an array");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        if (j[i].is_array()) {
            if (j[i].size() != 2) throw ValidationError(f + ": complex entries are [re, im]");
            out.emplace_back(number(j[i][0], f + "[0]"), number(j[i][1], f + "[1]"));
        } else {
            out.emplace_back(number(j[i], f), 0.0);
        }
    }
    return out;
}

Config parse(const std::string& mode, const Json& j)
{
    reject_unknown(j, {"mode", "model", "tau", "delta", "n", "P", "count", "numerics"}, "config");
    if (j.contains("mode") && j["mode"] != mode)
        throw ValidationError("config.mode: does not match the requested mode '" + mode + "'");
    if (!j.contains("model")) throw ValidationError("config.model: missing");
    const Json& m = j["model"];
    reject_unknown(m, {"N", "hbar", "g", "kappa"}, "config.model");
    for (const char* k : {"N", "hbar", "g", "kappa"})
        if (!m.contains(k)) throw ValidationError(std::string("config.model.") + k + ": missing");
    Config c;
    c.params.n_particles = integer(m["N"], "config.model.N");
    c.params.hbar = number(m["hbar"], "config.model.hbar");
    c.params.g = number(m["g"], "config.model.g");
    c.params.kappa = number(m["kappa"], "config.model.kappa");
    try {
        c.params.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config.model: ") + e.what());
    }
    if (j.contains("tau")) c.tau = roots(j["tau"], "config.tau");
    if (j.contains("delta")) c.delta = roots(j["delta"], "config.delta");
    if (j.contains("n")) {
        if (!j["n"].is_array()) throw ValidationError("config.n: expected an array");
        for (std::size_t i = 0; i < j["n"].size(); ++i)
            c.n.push_back(integer(j["n"][i], "config.n[" + std::to_string(i) + "]"));
    }
    if (j.contains("P")) c.momentum = number(j["P"], "config.P");
    if (j.contains("count")) c.count = integer(j["count"], "config.count");
    if (j.contains("numerics")) {
        const Json& nj = j["numerics"];
        reject_unknown(nj, {"lambda_max", "grid_points", "tol", "truncation_depth", "tail_tol", "max_iter"},
                       "config.numerics");
        if (nj.contains("lambda_max")) c.num.lambda_max = number(nj["lambda_max"], "config.numerics.lambda_max");
        if (nj.contains("grid_points")) c.num.grid_points = integer(nj["grid_points"], "config.numerics.grid_points");
        if (nj.contains("tol")) c.num.tol = number(nj["tol"], "config.numerics.tol");
        if (nj.contains("truncation_depth"))
            c.num.depth = integer(nj["truncation_depth"], "config.numerics.truncation_depth");
        if (nj.contains("tail_tol")) c.num.tail_tol = number(nj["tail_tol"], "config.numerics.tail_tol");
        if (nj.contains("max_iter")) c.num.max_iter = integer(nj["max_iter"], "config.numerics.max_iter");
        if (!(c.num.tol > 0.0)) throw ValidationError("config.numerics.tol: must be positive");
        if (!(c.num.tail_tol > 0.0)) throw ValidationError("config.numerics.tail_tol: must be positive");
        if (c.num.depth < 0) throw ValidationError("config.numerics.truncation_depth: must be >= 0");
        if (c.num.grid_points && *c.num.grid_points < 3)
            throw ValidationError("config.numerics.grid_points: must be >= 3");
        if (c.num.lambda_max && !(*c.num.lambda_max > 0.0))
            throw ValidationError("config.numerics.lambda_max: must be positive");
    }

    const auto need = [&](bool have, const char* what) {
        if (!have) throw ValidationError(std::string("config.") + what + ": required by mode '" + mode + "'");
    };
    const auto n_size = static_cast<std::size_t>(c.params.n_particles);
    if (mode == "check") {
        need(!c.tau.empty(), "tau");
        if (c.tau.size() != n_size) throw ValidationError("config.tau: must have N entries");
        try {
            SpectralPolynomial(c.tau).validate(c.params);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("config.tau: ") + e.what());
        }
    } else if (mode == "nlie") {
        need(!c.delta.empty(), "delta");
        if (c.delta.size() != n_size) throw ValidationError("config.delta: must have N entries");
        HillZeros z;
        z.deltas = c.delta;
        try {
            z.validate(c.params);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("config.delta: ") + e.what());
        }
    } else if (mode == "quantize" || mode == "spectrum") {
        need(!c.n.empty(), "n");
        if (c.n.size() != n_size) throw ValidationError("config.n: must have N entries");
        if (!(c.params.kappa > 0.0)) throw ValidationError("config.model.kappa: quantization needs kappa > 0");
    } else if (mode == "oracle-n2") {
        if (c.params.n_particles != 2) throw ValidationError("config.model.N: oracle-n2 needs N = 2");
        if (!(c.params.kappa > 0.0)) throw ValidationError("config.model.kappa: oracle-n2 needs kappa > 0");
        if (c.count < 1 || c.count > 20) throw ValidationError("config.count: must be in 1..20");
    }
    return c;
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json complex_list(const std::vector<cplx>& v)
{
    Json a = Json::array();
    for (auto z : v) a.push_back(complex_json(z));
    return a;
}

class Residuals {
public:
    void add(const std::string& name, double value, double threshold)
    {
        const bool pass = std::isfinite(value) && value <= threshold;
        ok_ = ok_ && pass;
        table_.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}});
    }
    bool ok() const { return ok_; }
    const Json& table() const { return table_; }

private:
    Json table_ = Json::array();
    bool ok_ = true;
};

TruncationConfig truncation(const Numerics& n)
{
    TruncationConfig cfg;
    cfg.depth = n.depth;
    cfg.tail_tol = n.tail_tol;
    return cfg;
}

Grid grid_for(const Config& c, const HillZeros& z)
{
    if (!c.num.lambda_max && !c.num.grid_points) return default_grid(z, c.params);
    const Grid base = default_grid(z, c.params);
    const double L = c.num.lambda_max.value_or(base.lambda_max);
    const double h = c.num.grid_points ? 2.0 * L / (*c.num.grid_points - 1) : base.spacing;
    return make_grid(L, h);
}

Json nlie_certificate(const NlieSolution& s)
{
    const auto& c = s.certificate;
    return {{"iterations", c.iterations},
            {"continuation_steps", c.continuation_steps},
            {"rho_over_j", c.rho_over_j},
            {"contraction_regime", c.contraction_regime},
            {"contraction_violations", c.contraction_violations},
            {"max_observed_ratio", c.max_observed_ratio},
            {"max_contraction_bound", c.max_contraction_bound},
            {"anderson_used", c.anderson_used},
            {"grid_halving_delta", c.grid_halving_delta},
            {"outer_ln_y", c.outer_ln_y},
            {"fixed_point_residual", s.residual},
            {"lambda_max", s.grid.lambda_max},
            {"grid_points", s.grid.count},
            {"spacing", s.grid.spacing}};
}

void certify_nlie(const NlieSolution& s, double tol, Residuals& r)
{
    r.add("nlie_grid_halving", s.certificate.grid_halving_delta, 10.0 * tol);
    if (s.certificate.contraction_regime)
        r.add("nlie_contraction_violations", s.certificate.contraction_violations, 0.0);
}

// Deterministic sample of points in the open strip |Im| < hbar/2.
std::vector<cplx> strip_points(int count, double re_half, double hbar, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> re(-re_half, re_half), im(-0.45 * hbar, 0.45 * hbar);
    std::vector<cplx> pts;
    for (int i = 0; i < count; ++i) {
        const double x = re(gen);
        pts.emplace_back(x, im(gen));
    }
    return pts;
}

double max_abs_re(const std::vector<cplx>& v)
{
    double m = 0.0;
    for (auto z : v) m = std::max(m, std::abs(z.real()));
    return m;
}

void run_check(const Config& c, Json& result, Json& certs, Residuals& r, std::string& csv, bool verbose)
{
    const ModelParams& p = c.params;
    const double hb = p.hbar;
    const TruncationConfig cfg = truncation(c.num);
    const SpectralPolynomial t(c.tau);
    const double span = max_abs_re(c.tau) + 2.0 * hb;

    // Hill determinant: K+- route against the brute-force doubly-infinite truncation
    double hill_rel = 0.0;
    for (auto l : strip_points(20, span, hb, 1)) {
        const cplx h = hill(l, t, p, cfg);
        const cplx b = hill_brute(l, t, p, 4000);
        hill_rel = std::max(hill_rel, std::abs(h - b) / std::max(std::abs(b), 1e-300));
    }
    r.add("hill_vs_brute", hill_rel, 1e-8);

    const HillZeros z = hill_zeros(t, p, cfg);
    double fact = 0.0;
    for (auto l : strip_points(10, span, hb, 2)) {
        const cplx f = hill_factorized(l, t.roots(), z.deltas, hb);
        fact = std::max(fact, std::abs(hill(l, t, p, cfg) - f) / std::max(std::abs(f), 1e-300));
    }
    r.add("hill_factorization", fact, 1e-8);
    cplx sum_tau = 0.0;
    for (auto v : c.tau) sum_tau += v;
    r.add("momentum_sum", std::abs(z.total_momentum() - sum_tau.real()), 1e-8);
    result["delta"] = complex_list(z.deltas);
    certs["hill_zeros"] = {{"contour_count", z.contour_count}, {"max_residual", z.max_residual}};
    if (verbose) std::cerr << "check: Hill zeros found (" << z.deltas.size() << ")\n";

    const QPair qp{t, p, cfg};
    double bp = 0.0, bm = 0.0, wr = 0.0, qper = 0.0;
    for (auto l : strip_points(20, span, hb, 3)) {
        bp = std::max(bp, baxter_residual(l, qp, QSign::Plus));
        bm = std::max(bm, baxter_residual(l, qp, QSign::Minus));
    }
    for (auto l : strip_points(10, span, hb, 4)) {
        wr = std::max(wr, wronskian_residual(l, qp));
        if (p.kappa > 0.0) qper = std::max(qper, wronskian_quasi_periodicity_residual(l, qp));
    }
    r.add("baxter_q_plus", bp, 1e-7);
    r.add("baxter_q_minus", bm, 1e-7);
    r.add("wronskian", wr, 1e-7);
    if (p.kappa > 0.0) r.add("wronskian_quasi_periodicity", qper, 1e-8);

    NlieOptions opt;
    opt.tol = c.num.tol;
    opt.verbose = verbose;
    const NlieSolution sol = solve_nlie(z, p, grid_for(c, z), opt);
    certs["nlie"] = nlie_certificate(sol);
    certify_nlie(sol, opt.tol, r);
    double ysup = 0.0;
    for (std::size_t i = 0; i < sol.grid.count; ++i) {
        const double y = y_from_determinants(sol.grid.nodes[i], t, z.deltas, p, cfg);
        ysup = std::max(ysup, std::abs(std::log(y) - sol.ln_y[i]));
    }
    r.add("nlie_vs_determinants", ysup, 1e-7);
    csv = to_csv(sol.grid.nodes, sol.ln_y);

    double qw = 0.0, dp = 0.0, dm = 0.0;
    for (auto l : strip_points(10, span, hb, 5)) qw = std::max(qw, quantum_wronskian_residual(l.real(), sol));
    for (auto l : strip_points(20, span, hb, 6)) {
        dp = std::max(dp, q_delta_baxter_residual(l, QSign::Plus, sol, t));
        dm = std::max(dm, q_delta_baxter_residual(l, QSign::Minus, sol, t));
    }
    r.add("quantum_wronskian", qw, 1e-7);
    r.add("baxter_q_delta_plus", dp, 1e-7);
    r.add("baxter_q_delta_minus", dm, 1e-7);

    const int n = p.n_particles;
    const NewtonSums ns = newton_sums_certified(sol, n);
    const auto exact = power_sums(c.tau, n);
    double nerr = 0.0;
    for (int k = 0; k < n; ++k) nerr = std::max(nerr, std::abs(ns.values[k] - exact[k].real()) / std::max(1.0, std::abs(exact[k])));
    r.add("newton_round_trip", nerr, 1e-6);
    r.add("newton_tail_error", ns.tail_error, 1e-9);
    result["newton_sums"] = ns.values;
    Json ex = Json::array();
    for (auto e : exact) ex.push_back(e.real());
    result["power_sums_tau"] = ex;
}

void run_nlie(const Config& c, Json& result, Json& certs, Residuals& r, std::string& csv, bool verbose)
{
    HillZeros z;
    z.deltas = c.delta;
    NlieOptions opt;
    opt.tol = c.num.tol;
    opt.verbose = verbose;
    const NlieSolution sol = solve_nlie(z, c.params, grid_for(c, z), opt);
    certs["nlie"] = nlie_certificate(sol);
    certify_nlie(sol, opt.tol, r);
    r.add("nlie_fixed_point", sol.residual, opt.tol);
    result["lambda"] = sol.grid.nodes;
    result["ln_y"] = sol.ln_y;
    csv = to_csv(sol.grid.nodes, sol.ln_y);
}

QuantizeOptions quantize_options(const Config& c, bool verbose)
{
    QuantizeOptions o;
    o.nlie_tol = c.num.tol;
    o.max_iter = c.num.max_iter;
    o.verbose = verbose;
    return o;
}

Json candidate_json(const QuantizationCandidate& q)
{
    Json d = Json::array();
    for (auto v : q.deltas.deltas) d.push_back(v.real());
    return {{"delta", d},
            {"zeta_phase", q.zeta_phase},
            {"winding", q.winding},
            {"converged", q.converged},
            {"iterations", q.iterations},
            {"history", q.history}};
}

void run_quantize(const Config& c, bool full, Json& result, Json& certs, Residuals& r, std::string& csv,
                  bool verbose)
{
    QuantizationProblem q{c.params, c.n, c.momentum};
    const QuantizeOptions opt = quantize_options(c, verbose);
    const QuantizationCandidate cand = solve_quantization(q, std::nullopt, opt);
    result["candidate"] = candidate_json(cand);
    const NlieSolution sol = solve_nlie_for(cand, q, opt, true);
    certs["nlie"] = nlie_certificate(sol);
    certify_nlie(sol, opt.nlie_tol, r);
    csv = to_csv(sol.grid.nodes, sol.ln_y);

    const auto f = quantization_residual(cand, q, sol);
    for (std::size_t k = 0; k < f.size(); ++k) r.add("quantization_F" + std::to_string(k + 1), std::abs(f[k]), 1e-8);
    r.add("momentum", std::abs(cand.deltas.total_momentum() - c.momentum), 1e-8);
    result["residuals_F"] = f;
    if (!full) return;

    const SpectrumResult s = reconstruct_spectrum(cand, q, sol);
    result["tau"] = complex_list(s.tau);
    result["newton_sums"] = s.newton_sums;
    result["elementary_symmetric"] = s.elementary_symmetric;
    result["energy"] = s.energy;
    result["yang_value"] = s.yang_value;

    const TruncationConfig cfg = truncation(c.num);
    const QPair qp{SpectralPolynomial(s.tau), c.params, cfg};
    for (std::size_t k = 0; k < cand.deltas.deltas.size(); ++k)
        r.add("q_residue_" + std::to_string(k + 1), q_small_residue(k, qp, cand.zeta_phase, cand.deltas.deltas), 1e-7);
    const auto grad = yang_gradient(cand, q, opt);
    double crit = 0.0;
    for (double g : grad) crit = std::max(crit, std::abs(g));
    r.add("yang_criticality", crit, 1e-5);
    result["yang_gradient"] = grad;
}

void run_oracle(const Config& c, Json& result, Json& certs)
{
    const OracleSpectrum s = n2_relative_spectrum(c.params, c.momentum, c.count);
    result["energies"] = s.energies;
    result["relative_energies"] = s.relative;
    certs["oracle"] = {{"half_width", s.half_width},
                       {"grid_points", s.points},
                       {"refinement_delta", s.refinement_delta},
                       {"width_delta", s.width_delta},
                       {"boundary_amplitude", s.boundary_amplitude}};
}

}  // namespace

RunResult run(const std::string& mode, const Json& config, bool verbose)
{
    RunResult out;
    Json& doc = out.document;
    doc["version"] = version();
    doc["mode"] = mode;
    doc["config"] = config;
    Json result = Json::object(), certs = Json::object();
    Residuals r;
    try {
        if (!modes.count(mode)) throw ValidationError("mode: unknown mode '" + mode + "'");
        const Config c = parse(mode, config);
        if (mode == "check") run_check(c, result, certs, r, out.csv, verbose);
        else if (mode == "nlie") run_nlie(c, result, certs, r, out.csv, verbose);
        else if (mode == "quantize") run_quantize(c, false, result, certs, r, out.csv, verbose);
        else if (mode == "spectrum") run_quantize(c, true, result, certs, r, out.csv, verbose);
        else run_oracle(c, result, certs);
        out.exit_code = r.ok() ? Ok : Consistency;
        if (!r.ok()) doc["error"] = "identity residual above threshold";
    } catch (const ValidationError& e) {
        out.exit_code = Validation;
        doc["error"] = e.what();
    } catch (const DomainError& e) {
        out.exit_code = Validation;
        doc["error"] = e.what();
    } catch (const SolverError& e) {
        out.exit_code = NonConvergence;
        doc["error"] = e.what();
    } catch (const TruncationError& e) {
        out.exit_code = NonConvergence;
        doc["error"] = e.what();
    } catch (const DiscretizationError& e) {
        out.exit_code = NonConvergence;
        doc["error"] = e.what();
    } catch (const std::exception& e) {
        out.exit_code = Consistency;
        doc["error"] = e.what();
    }
    doc["status"] = out.exit_code == Ok ? "ok" : "error";
    doc["exit_code"] = out.exit_code;
    doc["residuals"] = r.table();
    doc["certificates"] = certs;
    doc["result"] = result;
    return out;
}

}  // namespace toda::cli

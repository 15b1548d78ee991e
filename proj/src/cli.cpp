#include "nlsball/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "nlsball/asymptotics.hpp"
#include "nlsball/errors.hpp"
#include "nlsball/evolve.hpp"
#include "nlsball/verify.hpp"

namespace nlsball {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* csv_version = "nlsball-csv-1";
constexpr const char* json_version = "nlsball-json-1";

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    int x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    return x;
}

int parse_sign(const std::string& v) {
    if (v == "focusing" || v == "+1" || v == "1") return 1;
    if (v == "defocusing" || v == "-1") return -1;
    throw ConfigError("key 'sign': expected focusing, defocusing, +1 or -1, got '" + v + "'");
}

std::string num(double x, int digits = 12) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field>& fields() {
#define NLSBALL_DOUBLE(name) \
    {#name, {[](RunConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, [](const RunConfig& c) { return num(c.name, 17); }}}
#define NLSBALL_INT(name) \
    {#name, {[](RunConfig& c, const std::string& v) { c.name = parse_int(#name, v); }, [](const RunConfig& c) { return std::to_string(c.name); }}}
    static const std::map<std::string, Field> table = {
        NLSBALL_INT(N),
        NLSBALL_DOUBLE(p),
        {"sign", {[](RunConfig& c, const std::string& v) { c.sign = parse_sign(v); },
                  [](const RunConfig& c) { return std::string(c.sign > 0 ? "focusing" : "defocusing"); }}},
        NLSBALL_DOUBLE(d_min),
        NLSBALL_DOUBLE(d_max),
        NLSBALL_INT(count),
        NLSBALL_DOUBLE(alpha_max),
        NLSBALL_INT(nodes),
        NLSBALL_DOUBLE(grading),
        NLSBALL_DOUBLE(ode_tolerance),
        NLSBALL_DOUBLE(bisection_tolerance),
        NLSBALL_DOUBLE(band),
        NLSBALL_INT(eig_samples),
        NLSBALL_INT(l_max),
        NLSBALL_INT(spectrum_points),
        NLSBALL_DOUBLE(spectrum_lambda_max),
        NLSBALL_DOUBLE(lambda),
        NLSBALL_DOUBLE(delta),
        NLSBALL_DOUBLE(T),
        NLSBALL_DOUBLE(dt),
        NLSBALL_DOUBLE(sample_interval),
        NLSBALL_DOUBLE(sup_cap),
        {"output", {[](RunConfig& c, const std::string& v) { c.output = v; }, [](const RunConfig& c) { return c.output; }}},
    };
#undef NLSBALL_DOUBLE
#undef NLSBALL_INT
    return table;
}

ShootConfig shoot_config(const RunConfig& c) {
    ShootConfig s;
    s.n_nodes = c.nodes;
    s.grading = c.grading;
    s.ode_tolerance = c.ode_tolerance;
    s.bisection_tolerance = c.bisection_tolerance;
    validate(s);
    return s;
}

void csv_header(std::ostream& out, const std::vector<std::string>& columns) {
    out << csv_version << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
}

void csv_row(std::ostream& out, const std::vector<double>& values, const std::string& tail = {}) {
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << num(values[i]);
    if (!tail.empty()) out << ',' << tail;
    out << '\n';
}

Branch traced(const RunConfig& c, const ProblemParams& params, double d_max) {
    return trace(params, log_lambda_grid(params, c.sign, c.d_min, d_max, c.count), c.sign, shoot_config(c));
}

void partial_footer(const Branch& b, std::ostream& out, std::ostream& err) {
    if (!b.partial) return;
    out << "# partial branch: stopped at lambda=" << num(b.failed_lambda) << ": " << b.failure << '\n';
    err << "warning: partial branch (" << b.points.size() << " points): " << b.failure << '\n';
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const BlowUpError& e) {
        err << "blow-up: " << e.what() << '\n';
        return exit_blowup;
    } catch (const ParameterError& e) {
        err << "parameter error: " << e.what() << '\n';
        return exit_parameter;
    } catch (const ScopeError& e) {
        err << "parameter error: " << e.what() << '\n';
        return exit_parameter;
    } catch (const DomainError& e) {
        err << "parameter error: " << e.what() << '\n';
        return exit_parameter;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
}

}  // namespace

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown key '" + key + "'");
    it->second.set(config, value);
}

RunConfig parse_config(std::istream& in, RunConfig base) {
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
        set_config_value(base, key, trim(line.substr(eq + 1)));
    }
    return base;
}

std::string format_config(const RunConfig& config) {
    std::string s;
    for (const auto& [key, f] : fields()) s += key + " = " + f.get(config) + "\n";
    return s;
}

void validate_config(const RunConfig& c) {
    make_params(c.N, c.p);
    if (c.sign != 1 && c.sign != -1) throw ParameterError("sign must be +1 or -1");
    if (!(c.d_min > 0.0) || !(c.d_max > c.d_min)) throw ParameterError("need 0 < d_min < d_max");
    if (c.count < 2) throw ParameterError("count must be >= 2");
    if (c.nodes < 17) throw ParameterError("nodes must be >= 17");
    if (!(c.band > 0.0)) throw ParameterError("band must be positive");
    if (c.eig_samples < 2) throw ParameterError("eig_samples must be >= 2");
    if (c.l_max < 1) throw ParameterError("l_max must be >= 1");
    if (c.spectrum_points < 1) throw ParameterError("spectrum_points must be >= 1");
    if (!(c.alpha_max > 0.0)) throw ParameterError("alpha_max must be positive");
    if (!(c.dt > 0.0) || !(c.T >= c.dt)) throw ParameterError("need dt > 0 and T >= dt");
    if (!(c.sample_interval > 0.0) || !(c.sup_cap > 0.0)) throw ParameterError("sample_interval and sup_cap must be positive");
    if (!std::isfinite(c.delta) || !std::isfinite(c.lambda)) throw ParameterError("delta and lambda must be finite");
    shoot_config(c);
}

int cmd_eig(const RunConfig& c, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (c.eig_samples < 2 || c.nodes < 17) throw ParameterError("need eig_samples >= 2 and nodes >= 17");
        // The exponent plays no role here; any admissible one validates N.
        const ProblemParams params = make_params(c.N, 1.0 + 1.0 / std::max(c.N, 1));
        const EigenPair eig = principal_eigenpair(params, make_grid(params, c.nodes, 1.0));
        ojson j;
        j["schema"] = json_version;
        j["command"] = "eig";
        j["N"] = c.N;
        j["nodes"] = c.nodes;
        j["lambda1"] = eig.lambda1;
        j["lambda1_discrete"] = eig.lambda1_discrete;
        ojson samples = ojson::array();
        for (int k = 0; k < c.eig_samples; ++k) {
            const double r = static_cast<double>(k) / (c.eig_samples - 1);
            samples.push_back({{"r", r}, {"phi", k + 1 == c.eig_samples ? 0.0 : eig.phi1.evaluate(r)}});
        }
        j["phi1_samples"] = samples;
        out << j.dump(2) << '\n';
        return static_cast<int>(exit_ok);
    });
}

int cmd_branch(const RunConfig& c, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate_config(c);
        const ProblemParams params = make_params(c.N, c.p);
        const Branch b = classify_stability(traced(c, params, c.d_max), c.band);
        csv_header(out, {"alpha", "lambda", "mu", "M_alpha", "ur1", "rho", "energy", "stability"});
        for (const auto& pt : b.points) {
            csv_row(out, {pt.alpha, pt.lambda, pt.mu, pt.M_alpha, pt.ur1, pt.rho, pt.energy}, to_string(pt.stability));
        }
        partial_footer(b, out, err);
        return static_cast<int>(exit_ok);
    });
}

int cmd_figure1(const RunConfig& c, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (c.N != 3 || c.p != 3.0 || c.sign != 1) throw ParameterError("figure1 is defined for the focusing branch with N = 3, p = 3");
        validate_config(c);
        const ProblemParams params = make_params(3, 3.0);
        const WholeSpaceGroundState Z = solve_whole_space(params);
        // alpha / lambda stays below its limit 3, so lambda = alpha_max / 2.5 overshoots alpha_max.
        const double d_max = std::max(c.alpha_max / 2.5 + ball_lambda1(3), 2.0 * c.d_min);
        const Branch b = traced(c, params, d_max);
        std::vector<BranchPoint> pts;
        for (const auto& pt : b.points) {
            if (pt.alpha <= c.alpha_max) pts.push_back(pt);
        }
        if (!b.partial && !pts.empty() && pts.back().alpha < c.alpha_max) pts.push_back(point_at_alpha(b, c.alpha_max));
        csv_header(out, {"alpha", "mu", "mu_asymptote"});
        for (const auto& pt : pts) csv_row(out, {pt.alpha, pt.mu, std::sqrt(3.0) * Z.mass / std::sqrt(pt.alpha)});
        partial_footer(b, out, err);
        return static_cast<int>(exit_ok);
    });
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate_config(c);
        const ProblemParams params = make_params(c.N, c.p);
        const Branch b = traced(c, params, c.d_max);
        const IdentityReport rep = derivative_identities(b);
        const auto flux = boundary_flux_check(b);

        const std::map<std::string, double> thresholds = {
            {"pohozaev", 1e-5}, {"identity", 1e-3}, {"M_prime", 1e-2}, {"flux", 1e-2}};
        double max_poh = 0.0, max_id = 0.0, max_mp = 0.0, max_flux = 0.0;
        ojson points = ojson::array();
        for (std::size_t i = 0; i < rep.points.size(); ++i) {
            const IdentityRecord& r = rep.points[i];
            max_poh = std::max(max_poh, std::abs(r.pohozaev_res));
            if (r.centered) {
                max_id = std::max({max_id, std::abs(r.uv_res), std::abs(r.grad_uv_res), std::abs(r.upv_res), std::abs(r.mu_prime_identity_res)});
                max_mp = std::max(max_mp, std::abs(r.M_prime_res));
                max_flux = std::max(max_flux, std::abs(flux[i].residual));
            }
            points.push_back({{"alpha", r.alpha},
                              {"lambda", b.points[i].lambda},
                              {"mu", b.points[i].mu},
                              {"centered", r.centered},
                              {"pohozaev", r.pohozaev_res},
                              {"multiplier", r.multiplier_res},
                              {"uv", r.uv_res},
                              {"grad_uv", r.grad_uv_res},
                              {"upv", r.upv_res},
                              {"mu_prime_identity", r.mu_prime_identity_res},
                              {"M_prime", r.M_prime_res},
                              {"flux", flux[i].residual}});
        }

        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < b.points.size(); ++i) {
            if (b.sign < 0 || b.points[i].lambda <= c.spectrum_lambda_max) eligible.push_back(i);
        }
        std::vector<std::size_t> chosen;
        const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(c.spectrum_points), eligible.size());
        for (std::size_t k = 0; k < want; ++k) {
            const std::size_t idx = want == 1 ? 0 : k * (eligible.size() - 1) / (want - 1);
            chosen.push_back(eligible[idx]);
        }
        ojson spectrum = ojson::array();
        bool spectrum_ok = true;
        for (std::size_t i : chosen) {
            const SpectrumReport s = linearized_spectrum(b.points[i], c.l_max);
            const bool ok = b.sign > 0 ? (s.radial_negative == 1 && s.total_negative == 1 && s.min_abs_eigenvalue > 0.0)
                                       : s.total_negative == 0;
            spectrum_ok = spectrum_ok && ok;
            ojson sectors = ojson::array();
            for (const auto& sec : s.sectors) {
                sectors.push_back({{"ell", sec.ell}, {"multiplicity", sec.multiplicity}, {"negative", sec.negative_count}, {"eigenvalues", sec.eigenvalues}});
            }
            spectrum.push_back({{"alpha", b.points[i].alpha},
                                {"lambda", b.points[i].lambda},
                                {"radial_negative", s.radial_negative},
                                {"total_negative", s.total_negative},
                                {"gap", s.min_abs_eigenvalue},
                                {"ok", ok},
                                {"sectors", sectors}});
        }

        ojson failures = ojson::array();
        if (!(max_poh < thresholds.at("pohozaev"))) failures.push_back("pohozaev");
        if (!(max_id < thresholds.at("identity"))) failures.push_back("identity");
        if (!(max_mp < thresholds.at("M_prime"))) failures.push_back("M_prime");
        if (!(max_flux < thresholds.at("flux"))) failures.push_back("flux");
        if (!spectrum_ok) failures.push_back("spectrum");
        if (b.partial) failures.push_back("partial_branch");

        ojson j;
        j["schema"] = json_version;
        j["command"] = "verify";
        j["N"] = c.N;
        j["p"] = c.p;
        j["sign"] = c.sign;
        j["points"] = b.points.size();
        j["partial"] = b.partial;
        if (b.partial) j["failure"] = b.failure;
        j["thresholds"] = thresholds;
        j["max"] = {{"pohozaev", max_poh}, {"identity", max_id}, {"M_prime", max_mp}, {"flux", max_flux}};
        j["spectrum_lambda_max"] = c.spectrum_lambda_max;
        j["spectrum"] = spectrum;
        j["identities"] = points;
        j["pass"] = failures.empty();
        j["failures"] = failures;
        out << j.dump(2) << '\n';
        if (!failures.empty()) {
            err << "verify: thresholds exceeded:";
            for (const auto& f : failures) err << ' ' << f.get<std::string>();
            err << '\n';
            return static_cast<int>(exit_numeric);
        }
        return static_cast<int>(exit_ok);
    });
}

int cmd_probe(const RunConfig& c, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate_config(c);
        if (c.sign != 1) throw ScopeError("probe needs a focusing point");
        const ProblemParams params = make_params(c.N, c.p);
        const BranchPoint pt = point_at_lambda(params, c.lambda, 1, shoot_config(c));
        EvolveConfig ec;
        ec.sample_interval = c.sample_interval;
        ec.sup_cap = c.sup_cap;
        csv_header(out, {"t", "mass", "energy", "orbit_distance"});
        ec.on_sample = [&](const EvolutionRecord& r) {
            csv_row(out, {r.times.back(), r.mass.back(), r.energy.back(), r.orbit_distance.back()});
        };
        try {
            const EvolutionRecord rec = stability_probe(pt, c.delta, c.T, c.dt, ec);
            out << "# max_orbit_distance," << num(rec.max_orbit_distance) << '\n';
        } catch (const BlowUpError& e) {
            out << "# blow-up," << num(e.time) << ',' << e.what() << '\n';
            throw;
        } catch (const StepSizeError& e) {
            out << "# step-size failure," << num(e.dt) << ',' << e.what() << '\n';
            throw;
        }
        return static_cast<int>(exit_ok);
    });
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"eig", "branch", "figure1", "verify", "probe"};
    return names;
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err) {
    if (name == "eig") return cmd_eig(config, out, err);
    if (name == "branch") return cmd_branch(config, out, err);
    if (name == "figure1") return cmd_figure1(config, out, err);
    if (name == "verify") return cmd_verify(config, out, err);
    if (name == "probe") return cmd_probe(config, out, err);
    err << "unknown command '" << name << "'\n";
    return exit_parameter;
}

}  // namespace nlsball

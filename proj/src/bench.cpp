#include "cospricer/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "cospricer/errors.hpp"
#include "cospricer/numerics.hpp"

namespace cospricer::bench {
namespace {

using nlohmann::json;

constexpr std::string_view kExperimentNames[] = {"price",   "range",  "density", "figure1",
                                                  "figure2", "table1", "table2",  "counterexamples"};

double num(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? num(j, key) : fallback;
}

int int_or(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("key '") + key + "' must be an integer");
    return j.at(key).get<int>();
}

ModelSpec parse_model(const std::string& type, const json& p) {
    switch (model_kind_from_string(type)) {
        case ModelKind::BS: return ModelSpec::black_scholes(num(p, "sigma"));
        case ModelKind::Laplace: return ModelSpec::laplace(num(p, "sigma"));
        case ModelKind::Heston:
            return ModelSpec::heston(num(p, "kappa"), num(p, "eta"), num(p, "theta"), num(p, "v0"), num(p, "rho"));
        case ModelKind::VG: return ModelSpec::variance_gamma(num(p, "sigma"), num(p, "theta"), num(p, "nu"));
        case ModelKind::CGMY: return ModelSpec::cgmy(num(p, "C"), num(p, "G"), num(p, "M"), num(p, "Y"));
        case ModelKind::MJD: {
            // log1p_mean_jump = log(1 + kappa) avoids typing e^x - 1 by hand.
            const double kappa =
                p.contains("log1p_mean_jump") ? std::expm1(num(p, "log1p_mean_jump")) : num(p, "mean_jump");
            return ModelSpec::merton(num(p, "sigma"), num(p, "intensity"), kappa, num(p, "jump_vol"));
        }
    }
    throw ConfigError("unknown model type " + type);
}

CatalogEntry parse_entry(const json& j) {
    if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError("model entry without a name");
    const auto name = j.at("name").get<std::string>();
    try {
        if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError("missing model type");
        const json params = j.value("params", json::object());
        const double strike = num(j, "strike");
        CarrMadanConfig cm;
        if (j.contains("carr_madan")) {
            const auto& c = j.at("carr_madan");
            cm.alpha = num_or(c, "alpha", cm.alpha);
            cm.u_max = num_or(c, "u_max", cm.u_max);
            cm.n_points = int_or(c, "n_points", cm.n_points);
        }
        std::optional<double> reference;
        if (j.contains("reference")) reference = num(j, "reference");
        return CatalogEntry{name,
                            parse_model(j.at("type").get<std::string>(), params),
                            MarketContext(num(j, "S0"), num_or(j, "r", 0.0), num(j, "T")),
                            strike,
                            option_kind_from_string(j.value("option", std::string("call"))),
                            reference,
                            num_or(j, "K_bound", strike),
                            cm};
    } catch (const ConfigError& e) {
        throw ConfigError("model '" + name + "': " + e.what());
    } catch (const Error& e) {
        throw ConfigError("model '" + name + "': " + e.what());
    }
}

template <class T>
std::vector<T> list_or(const json& j, const char* key, std::vector<T> fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_array()) throw ConfigError(std::string("key '") + key + "' must be an array");
    return j.at(key).get<std::vector<T>>();
}

std::string fmt_opt(const std::optional<int>& v) { return v ? std::to_string(*v) : "-"; }

std::string fmt_opt(const std::optional<double>& v) { return v ? format_number(*v) : "na"; }

double reference_of(const CatalogEntry& e) {
    if (e.reference) return *e.reference;
    return reference_price(e.model, e.market, e.strike, e.kind, e.carr_madan);
}

std::optional<double> oracle_of(const CatalogEntry& e) {
    try {
        return reference_price(e.model, e.market, e.strike, e.kind, e.carr_madan);
    } catch (const Error&) {
        return std::nullopt;
    }
}

TruncationRange markov_for(const ExperimentConfig& cfg, const CatalogEntry& e, double eps, int n) {
    return markov_range(e.model, e.market, ToleranceSpec(eps, e.K_bound), n, DefaultMomentProvider(),
                        cfg.sigma_safety);
}

double price_at(const CatalogEntry& e, const TruncationRange& r, int N) {
    return price(e.model, e.market, e.strike, e.kind, r, N).price;
}

// Minimal M with K_bound * P(|X| > M) <= eps / 2.
std::optional<double> quantile_M(const CatalogEntry& e, double eps) {
    const double target = eps / (2.0 * e.K_bound);
    if (e.model.kind() == ModelKind::Laplace) {
        const double b = e.model.as<LaplaceParams>().sigma / std::numbers::sqrt2;
        return -b * std::log(target);
    }
    if (e.model.kind() != ModelKind::BS) return std::nullopt;
    const double s = e.model.as<BlackScholesParams>().sigma * std::sqrt(e.market.maturity());
    double lo = 0.0, hi = 100.0 * s;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (2.0 * numerics::normal_cdf(-mid / s) > target ? lo : hi) = mid;
    }
    return hi;
}

struct LongRow {
    std::string key;
    std::string quantity;
    std::string value;
};

void write_long(std::ostream& out, const std::vector<LongRow>& rows) {
    out << "case,quantity,value\n";
    for (const auto& r : rows) out << r.key << ',' << r.quantity << ',' << r.value << '\n';
}

// --------------------------------------------------------------------------

int run_price(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log) {
    const auto& e = cfg.entry(cfg.model);
    BenchRow row;
    row.model = e.name;
    row.epsilon = cfg.epsilon;
    row.n_c = cfg.n_c;
    row.n_M = cfg.n;
    const auto rc = cumulant_range(e.model, e.market, cfg.n_c);
    const auto rm = markov_for(cfg, e, cfg.epsilon, cfg.n);
    row.L_c = rc.L;
    row.L_M = rm.L;
    int code = 0;
    if (cfg.N) {
        row.N_c = row.N_M = *cfg.N;
        row.price_c = price_at(e, rc, *cfg.N);
        row.price_M = price_at(e, rm, *cfg.N);
    } else {
        auto adaptive = [&](const TruncationRange& r, std::optional<int>& N, double& p) {
            try {
                const auto res = adaptive_N(e.model, e.market, e.strike, e.kind, r, cfg.epsilon);
                N = res.N_used;
                p = res.price;
            } catch (const NoConvergence& ex) {
                log << "non-convergence (" << to_string(r.provenance) << "): " << ex.what() << '\n';
                p = NAN;
                code = 2;
            }
        };
        adaptive(rc, row.N_c, row.price_c);
        adaptive(rm, row.N_M, row.price_M);
    }
    row.reference = reference_of(e);
    row.reference_oracle = oracle_of(e);
    if (cfg.timing) {
        if (row.N_c) row.t_c = time_price_us(e, rc, *row.N_c, cfg.timing_repetitions);
        if (row.N_M) row.t_M = time_price_us(e, rm, *row.N_M, cfg.timing_repetitions);
    }
    write_rows(csv, {row});
    log << e.name << ": cumulants " << format_number(row.price_c) << " (L=" << format_number(row.L_c)
        << "), markov " << format_number(row.price_M) << " (L=" << format_number(row.L_M)
        << "), difference " << format_number(row.price_M - row.price_c) << ", reference "
        << format_number(row.reference) << '\n';
    return code;
}

int run_range(const ExperimentConfig& cfg, std::ostream& csv) {
    std::vector<TableRowSpec> specs = cfg.rows;
    if (specs.empty()) specs.push_back({cfg.model, cfg.epsilon, cfg.n_c, cfg.n});
    csv << "model,epsilon,n_c,n_M,L_c,M_M,L_M\n";
    for (const auto& s : specs) {
        const auto& e = cfg.entry(s.model);
        const auto rc = cumulant_range(e.model, e.market, s.n_c);
        const auto rm = markov_for(cfg, e, s.epsilon, s.n_M);
        csv << e.name << ',' << format_number(s.epsilon) << ',' << s.n_c << ',' << s.n_M << ','
            << format_number(rc.L) << ',' << format_number(rm.M) << ',' << format_number(rm.L) << '\n';
    }
    return 0;
}

int run_density(const ExperimentConfig& cfg, std::ostream& csv) {
    const auto& e = cfg.entry(cfg.model);
    const auto rc = cumulant_range(e.model, e.market, cfg.n_c);
    const auto rm = markov_for(cfg, e, cfg.epsilon, cfg.n);
    const CenteredCf phi(e.model, e.market);
    const auto ec = cos_coefficients(phi, rc.L, cfg.density_N);
    const auto em = cos_coefficients(phi, rm.L, cfg.density_N);
    auto xs = cfg.xs;
    if (xs.empty())
        for (int i = 0; i <= 200; ++i) xs.push_back(-rm.L + 2.0 * rm.L * i / 200.0);
    csv << "x,density_c,density_M\n";
    for (double x : xs) {
        csv << format_number(x) << ',';
        csv << (std::abs(x) <= rc.L ? format_number(density(ec, x)) : "na") << ',';
        csv << (std::abs(x) <= rm.L ? format_number(density(em, x)) : "na") << '\n';
    }
    return 0;
}

int run_figure1(const ExperimentConfig& cfg, std::ostream& csv) {
    csv << "model,epsilon,K_bound,n,mu_n,M,quantile_M\n";
    const std::vector<std::string> names =
        cfg.rows.empty() ? std::vector<std::string>{cfg.model} : [&] {
            std::vector<std::string> v;
            for (const auto& r : cfg.rows) v.push_back(r.model);
            return v;
        }();
    const DefaultMomentProvider provider;
    for (const auto& name : names) {
        const auto& e = cfg.entry(name);
        const ToleranceSpec tol(cfg.epsilon, e.K_bound);
        const auto q = quantile_M(e, cfg.epsilon);
        for (int n : cfg.moment_orders) {
            const double mu = provider.central_moment(e.model, e.market, n).value;
            csv << e.name << ',' << format_number(cfg.epsilon) << ',' << format_number(e.K_bound) << ',' << n
                << ',' << format_number(mu) << ',' << format_number(markov_M(tol, mu, n)) << ','
                << fmt_opt(q) << '\n';
        }
    }
    return 0;
}

int run_figure2(const ExperimentConfig& cfg, std::ostream& csv) {
    const auto& e = cfg.entry(cfg.model);
    const double reference = reference_of(e);
    csv << "panel,epsilon,range,R,L,N_min,t_us\n";
    auto emit = [&](const char* panel, double eps, std::string_view kind, double R, const TruncationRange& r) {
        const auto mn = minimal_N(e, r, reference, eps, cfg.N_step, cfg.N_max);
        std::optional<double> t;
        if (cfg.timing && mn.N) t = time_price_us(e, r, *mn.N, cfg.timing_repetitions);
        csv << panel << ',' << format_number(eps) << ',' << kind << ',' << (R > 0 ? format_number(R) : "na")
            << ',' << format_number(r.L) << ',' << fmt_opt(mn.N) << ',' << fmt_opt(t) << '\n';
    };
    const auto rc = cumulant_range(e.model, e.market, cfg.n_c);
    for (double eps : cfg.epsilons) {
        emit("A", eps, "cumulants", 0.0, rc);
        emit("A", eps, "markov", 0.0, markov_for(cfg, e, eps, cfg.n));
    }
    const double sd = std::sqrt(DefaultMomentProvider().central_moment(e.model, e.market, 2).value);
    for (double mult : cfg.range_multiples) {
        const double R = mult * sd;
        emit("B", cfg.epsilon, "manual", mult, TruncationRange::manual(R));
    }
    return 0;
}

int run_table2(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log) {
    const auto& e = cfg.entry(cfg.model);
    const auto rc = cumulant_range(e.model, e.market, cfg.n_c);
    const auto rm = markov_for(cfg, e, cfg.epsilon, cfg.n);
    double reference = reference_of(e);
    if (cfg.reference_N) {
        const auto wide = TruncationRange::manual(std::floor(10.0 * rm.L));
        const double recomputed = price_at(e, wide, *cfg.reference_N);
        log << "reference (catalog) " << format_number(reference) << ", recomputed on [-" << format_number(wide.L)
            << ", " << format_number(wide.L) << "] with N=" << *cfg.reference_N << ": "
            << format_number(recomputed) << '\n';
        reference = recomputed;
    }
    const auto pm = price_curve(e.model, e.market, e.strike, e.kind, rm, cfg.table2_N);
    const auto pc = price_curve(e.model, e.market, e.strike, e.kind, rc, cfg.table2_N);
    csv << "N,L_M,L_c,price_M,price_c,reference,markov_abs_error,cumulants_abs_error,markov_rel_bps,"
           "cumulants_rel_bps\n";
    for (std::size_t i = 0; i < cfg.table2_N.size(); ++i) {
        const double am = std::abs(pm[i] - reference), ac = std::abs(pc[i] - reference);
        csv << cfg.table2_N[i] << ',' << format_number(rm.L) << ',' << format_number(rc.L) << ','
            << format_number(pm[i]) << ',' << format_number(pc[i]) << ',' << format_number(reference) << ','
            << format_number(am) << ',' << format_number(ac) << ',' << format_number(1e4 * am / reference)
            << ',' << format_number(1e4 * ac / reference) << '\n';
    }
    return 0;
}

int run_counterexamples(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log) {
    std::vector<LongRow> out;
    auto put = [&](const std::string& key, const std::string& q, const std::string& v) { out.push_back({key, q, v}); };
    for (const auto& s : cfg.rows) {
        const auto& e = cfg.entry(s.model);
        const int N = cfg.N.value_or(4000);
        const auto rc = cumulant_range(e.model, e.market, s.n_c);
        const auto rm = markov_for(cfg, e, s.epsilon, s.n_M);
        const double ref = reference_of(e);
        const std::string key = e.name + "/n_c=" + std::to_string(s.n_c);
        const double pc = price_at(e, rc, N), pm = price_at(e, rm, N);
        put(key, "epsilon", format_number(s.epsilon));
        put(key, "N", std::to_string(N));
        put(key, "L_c", format_number(rc.L));
        put(key, "L_M", format_number(rm.L));
        put(key, "price_c", format_number(pc));
        put(key, "price_M", format_number(pm));
        put(key, "reference", format_number(ref));
        put(key, "abs_error_c", format_number(std::abs(pc - ref)));
        put(key, "abs_error_M", format_number(std::abs(pm - ref)));
        put(key, "cumulants_within_eps", std::abs(pc - ref) <= s.epsilon ? "1" : "0");
        put(key, "markov_within_eps", std::abs(pm - ref) <= s.epsilon ? "1" : "0");
        if (e.model.kind() == ModelKind::MJD) {
            const auto& p = e.model.as<MertonParams>();
            const double jump = std::log1p(p.mean_jump) - 0.5 * p.jump_vol * p.jump_vol;
            put(key, "jump_log_mean", format_number(jump));
            put(key, "jump_inside_cumulants_range", std::abs(jump) <= rc.L ? "1" : "0");
            put(key, "jump_inside_markov_range", std::abs(jump) <= rm.L ? "1" : "0");
        }
        if (e.model.kind() == ModelKind::CGMY) {
            const auto cm = price_curve(e.model, e.market, e.strike, e.kind, rm, cfg.table2_N);
            const auto cc = price_curve(e.model, e.market, e.strike, e.kind, rc, cfg.table2_N);
            for (std::size_t i = 0; i < cfg.table2_N.size(); ++i) {
                const auto tag = "table2_N=" + std::to_string(cfg.table2_N[i]);
                put(key, tag + "_markov_abs_error", format_number(std::abs(cm[i] - ref)));
                put(key, tag + "_cumulants_abs_error", format_number(std::abs(cc[i] - ref)));
            }
        }
        log << key << ": cumulants error " << format_number(std::abs(pc - ref)) << ", markov error "
            << format_number(std::abs(pm - ref)) << '\n';
    }
    write_long(csv, out);
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment experiment_from_string(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kExperimentNames); ++i)
        if (kExperimentNames[i] == name) return static_cast<Experiment>(i);
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

const CatalogEntry& ExperimentConfig::entry(std::string_view name) const {
    for (const auto& e : catalog)
        if (e.name == name) return e;
    throw ConfigError("model '" + std::string(name) + "' not in catalog");
}

ExperimentConfig parse_config(const json& doc, Experiment experiment) {
    try {
        if (!doc.is_object()) throw ConfigError("config root must be an object");
        ExperimentConfig cfg;
        cfg.experiment = experiment;
        for (const auto& m : doc.value("models", json::array())) cfg.catalog.push_back(parse_entry(m));
        for (const auto& r : doc.value("rows", json::array()))
            cfg.rows.push_back({r.at("model").get<std::string>(), num(r, "epsilon"), int_or(r, "n_c", 4),
                                int_or(r, "n_M", 8)});
        cfg.model = doc.value("model", std::string());
        cfg.epsilon = num_or(doc, "epsilon", cfg.epsilon);
        cfg.n = int_or(doc, "n", cfg.n);
        cfg.n_c = int_or(doc, "n_c", cfg.n_c);
        if (doc.contains("N")) cfg.N = int_or(doc, "N", 0);
        cfg.N_step = int_or(doc, "N_step", cfg.N_step);
        cfg.N_max = int_or(doc, "N_max", cfg.N_max);
        cfg.sigma_safety = num_or(doc, "sigma_safety", cfg.sigma_safety);
        if (doc.contains("timing")) {
            const auto& t = doc.at("timing");
            cfg.timing = t.value("enabled", cfg.timing);
            cfg.timing_repetitions = int_or(t, "repetitions", cfg.timing_repetitions);
        }
        cfg.epsilons = list_or<double>(doc, "epsilons", {});
        cfg.range_multiples = list_or<double>(doc, "range_multiples", {});
        cfg.moment_orders = list_or<int>(doc, "moment_orders", cfg.moment_orders);
        cfg.xs = list_or<double>(doc, "x", {});
        cfg.density_N = int_or(doc, "density_N", cfg.density_N);
        cfg.table2_N = list_or<int>(doc, "table2_N", cfg.table2_N);
        if (doc.contains("reference_N")) cfg.reference_N = int_or(doc, "reference_N", 0);

        if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
        for (double eps : cfg.epsilons)
            if (!(eps > 0.0)) throw ConfigError("epsilons must be > 0");
        for (const auto& r : cfg.rows) {
            if (!(r.epsilon > 0.0)) throw ConfigError("row epsilon must be > 0");
            cfg.entry(r.model);
        }
        if (cfg.N && *cfg.N < 1) throw ConfigError("N must be >= 1");
        if (cfg.N_step < 1 || cfg.N_max < cfg.N_step) throw ConfigError("need 1 <= N_step <= N_max");
        if (cfg.timing_repetitions < 1) throw ConfigError("timing repetitions must be >= 1");
        const bool single = experiment == Experiment::price || experiment == Experiment::density ||
                            experiment == Experiment::figure2 || experiment == Experiment::table2;
        if (single) cfg.entry(cfg.model);
        if ((experiment == Experiment::table1 || experiment == Experiment::counterexamples) && cfg.rows.empty())
            throw ConfigError(std::string(to_string(experiment)) + " needs a non-empty 'rows' list");
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig load_config(const std::string& path, Experiment experiment) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return parse_config(doc, experiment);
}

MinimalN minimal_N(const CatalogEntry& e, const TruncationRange& range, double reference, double epsilon,
                   int step, int N_max) {
    if (step < 1 || N_max < step) throw InvalidArgument("minimal_N: need 1 <= step <= N_max");
    int from = step;
    int horizon = std::min(2000, N_max);
    for (;;) {
        horizon -= horizon % step;
        std::vector<int> Ns;
        for (int n = step; n <= horizon; n += step) Ns.push_back(n);
        const auto p = price_curve(e.model, e.market, e.strike, e.kind, range, Ns);
        for (std::size_t i = static_cast<std::size_t>(from / step - 1); i < Ns.size(); ++i) {
            if (std::abs(p[i] - reference) > epsilon) continue;
            MinimalN out{Ns[i], horizon, std::nullopt};
            try {
                out.limit = adaptive_N(e.model, e.market, e.strike, e.kind, range, epsilon).price;
            } catch (const NoConvergence&) {
                return out;
            }
            // A transient crossing on the way to a wrong limit is not convergence.
            if (std::abs(*out.limit - reference) > epsilon) out.N.reset();
            return out;
        }
        if (horizon >= N_max) return {std::nullopt, horizon, std::nullopt};
        from = horizon + step;
        horizon = std::min(2 * horizon, N_max);
    }
}

double time_price_us(const CatalogEntry& e, const TruncationRange& range, int N, int reps) {
    std::vector<double> us(static_cast<std::size_t>(reps));
    volatile double sink = price_at(e, range, N);  // warm cache
    for (auto& t : us) {
        const auto t0 = std::chrono::steady_clock::now();
        sink = price_at(e, range, N);
        t = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
    }
    (void)sink;
    std::nth_element(us.begin(), us.begin() + reps / 2, us.end());
    return us[static_cast<std::size_t>(reps / 2)];
}

BenchRow run_row(const ExperimentConfig& cfg, const TableRowSpec& spec) {
    const auto& e = cfg.entry(spec.model);
    BenchRow row;
    row.model = e.name;
    row.epsilon = spec.epsilon;
    row.n_c = spec.n_c;
    row.n_M = spec.n_M;
    const auto rc = cumulant_range(e.model, e.market, spec.n_c);
    const auto rm = markov_for(cfg, e, spec.epsilon, spec.n_M);
    row.L_c = rc.L;
    row.L_M = rm.L;
    row.reference = reference_of(e);
    row.reference_oracle = oracle_of(e);
    const auto mc = minimal_N(e, rc, row.reference, spec.epsilon, cfg.N_step, cfg.N_max);
    const auto mm = minimal_N(e, rm, row.reference, spec.epsilon, cfg.N_step, cfg.N_max);
    row.N_c = mc.N;
    row.N_M = mm.N;
    row.price_c = price_at(e, rc, mc.N.value_or(mc.horizon));
    row.price_M = price_at(e, rm, mm.N.value_or(mm.horizon));
    if (cfg.timing) {
        if (row.N_c) row.t_c = time_price_us(e, rc, *row.N_c, cfg.timing_repetitions);
        if (row.N_M) row.t_M = time_price_us(e, rm, *row.N_M, cfg.timing_repetitions);
    }
    return row;
}

std::vector<BenchRow> run_table(const ExperimentConfig& cfg) {
    std::vector<BenchRow> rows(cfg.rows.size());
    if (cfg.timing) {
        // Timings are only comparable when rows do not compete for cores.
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = run_row(cfg, cfg.rows[i]);
        return rows;
    }
    std::vector<std::future<BenchRow>> jobs;
    for (const auto& spec : cfg.rows) jobs.push_back(std::async(std::launch::async, run_row, std::cref(cfg), spec));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = jobs[i].get();
    return rows;
}

void write_rows(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "model,eps,n_c,n_M,L_c,L_M,N_c,N_M,t_c,t_M,price_c,price_M,reference,reference_oracle\n";
    for (const auto& r : rows) {
        out << r.model << ',' << format_number(r.epsilon) << ',' << r.n_c << ',' << r.n_M << ','
            << format_number(r.L_c) << ',' << format_number(r.L_M) << ',' << fmt_opt(r.N_c) << ','
            << fmt_opt(r.N_M) << ',' << fmt_opt(r.t_c) << ',' << fmt_opt(r.t_M) << ','
            << format_number(r.price_c) << ',' << format_number(r.price_M) << ',' << format_number(r.reference)
            << ',' << fmt_opt(r.reference_oracle) << '\n';
    }
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log) {
    switch (cfg.experiment) {
        case Experiment::price: return run_price(cfg, csv, log);
        case Experiment::range: return run_range(cfg, csv);
        case Experiment::density: return run_density(cfg, csv);
        case Experiment::figure1: return run_figure1(cfg, csv);
        case Experiment::figure2: return run_figure2(cfg, csv);
        case Experiment::table1: {
            const auto rows = run_table(cfg);
            write_rows(csv, rows);
            for (const auto& r : rows)
                log << r.model << " eps=" << format_number(r.epsilon) << ": L_c=" << format_number(r.L_c)
                    << " L_M=" << format_number(r.L_M) << " N_c=" << fmt_opt(r.N_c) << " N_M=" << fmt_opt(r.N_M)
                    << '\n';
            return 0;
        }
        case Experiment::table2: return run_table2(cfg, csv, log);
        case Experiment::counterexamples: return run_counterexamples(cfg, csv, log);
    }
    return 1;
}

}  // namespace cospricer::bench

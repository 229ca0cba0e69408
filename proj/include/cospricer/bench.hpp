#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cospricer/cos_engine.hpp"
#include "cospricer/models.hpp"
#include "cospricer/oracles.hpp"
#include "cospricer/truncation.hpp"

namespace cospricer::bench {

enum class Experiment { price, range, density, figure1, figure2, table1, table2, counterexamples };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

/// Named model plus the option it is quoted on.
struct CatalogEntry {
    std::string name;
    ModelSpec model;
    MarketContext market;
    double strike;
    OptionKind kind;
    std::optional<double> reference;
    /// Payoff supremum for the Markov rule; the strike unless overridden.
    double K_bound;
    CarrMadanConfig carr_madan;
};

struct TableRowSpec {
    std::string model;
    double epsilon;
    int n_c;
    int n_M;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::price;
    std::vector<CatalogEntry> catalog;
    std::vector<TableRowSpec> rows;

    std::string model;  // single-model experiments
    double epsilon = 1e-7;
    int n = 8;
    int n_c = 4;
    std::optional<int> N;
    int N_step = 10;
    int N_max = 1000000;
    double sigma_safety = 1.0;

    bool timing = true;
    int timing_repetitions = 51;

    std::vector<double> epsilons;          // figure2 panel A, figure1 (first only)
    std::vector<double> range_multiples;   // figure2 panel B, in units of sqrt(mu_2)
    std::vector<int> moment_orders{2, 4, 6, 8, 10, 12};
    std::vector<double> xs;                // density
    int density_N = 4096;
    std::vector<int> table2_N{1000, 2000, 4000, 8000};
    /// table2: recompute the reference with range [-10 L_M, 10 L_M] and this N.
    std::optional<int> reference_N;

    const CatalogEntry& entry(std::string_view name) const;
};

/// Throws ConfigError on malformed input or invalid model parameters.
ExperimentConfig parse_config(const nlohmann::json& doc, Experiment experiment);
ExperimentConfig load_config(const std::string& path, Experiment experiment);

// ---------------------------------------------------------------------------

struct MinimalN {
    std::optional<int> N;         // empty: no convergence to the reference
    int horizon = 0;              // largest N examined
    std::optional<double> limit;  // adaptive_N price, when it converged
};

/// First N on the step grid whose price is within epsilon of `reference`,
/// provided the self-converged price (adaptive_N) is also within epsilon.
/// The scan horizon doubles from 2000 up to N_max.
MinimalN minimal_N(const CatalogEntry& e, const TruncationRange& range, double reference,
                   double epsilon, int step, int N_max);

/// Median wall time of `reps` prices in microseconds.
double time_price_us(const CatalogEntry& e, const TruncationRange& range, int N, int reps);

struct BenchRow {
    std::string model;
    double epsilon = 0.0;
    int n_c = 0;
    int n_M = 0;
    double L_c = 0.0;
    double L_M = 0.0;
    std::optional<int> N_c;
    std::optional<int> N_M;
    std::optional<double> t_c;
    std::optional<double> t_M;
    double price_c = 0.0;
    double price_M = 0.0;
    double reference = 0.0;
    std::optional<double> reference_oracle;
};

BenchRow run_row(const ExperimentConfig& cfg, const TableRowSpec& spec);

std::vector<BenchRow> run_table(const ExperimentConfig& cfg);

void write_rows(std::ostream& out, const std::vector<BenchRow>& rows);

/// Shortest round-trip decimal form.
std::string format_number(double x);

/// Runs cfg.experiment, writes CSV to `csv` and a human summary to `log`.
/// Returns the process exit code (0 ok, 2 non-convergence).
int run_experiment(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);

}  // namespace cospricer::bench

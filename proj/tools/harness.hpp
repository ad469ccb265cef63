#ifndef QUADTWIST_TOOLS_HARNESS_HPP
#define QUADTWIST_TOOLS_HARNESS_HPP

#include <quadtwist/quadrature.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace quadtwist::harness
{

// Invalid or inconsistent configuration.
class ConfigError : public Error
{
public:
    using Error::Error;
};

struct RunConfig
{
    std::string command;
    std::vector<Complex> shifts{0.02, 0.05};
    std::vector<std::uint64_t> big_d{250, 500, 1000, 2000};
    double eta = 1.3;
    std::int64_t ell = 1;
    double a_line = 0.1;
    double ramp = 0.1;
    std::uint64_t prime_cutoff = 10'000;
    // Sieve cutoff; 0 means 4 sqrt(2D).
    double y = 0;
    std::int64_t k_limit = 100'000'000;
    int order = 12;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::size_t max_swap = 1;
    std::vector<std::uint64_t> moduli{1, 3, 9, 15, 45};
    // Imaginary part of s for swap-decay.
    double s_im = 3;
    int points = 11;
    // Overrides every check tolerance when positive.
    double tolerance = 0;
    double budget = 2e10;
    bool timing = false;
};

// Throws ConfigError when a field violates the preconditions of its command.
void validate(const RunConfig &cfg);

nlohmann::ordered_json config_json(const RunConfig &cfg);

// "re,im:re,im"
std::vector<Complex> parse_shifts(const std::string &text);
std::string format_shifts(const std::vector<Complex> &shifts);

// Scientific notation, 17 significant digits.
std::string format_double(double x);

struct Quantity
{
    std::string name;
    Complex value = 0;
    Complex oracle = 0;
    std::string oracle_name;
    double gap = 0;
    double tolerance = 0;
    double truncation = 0;
    bool pass = true;
};

struct Report
{
    RunConfig config;
    std::vector<Quantity> results;
    nlohmann::ordered_json timings = nlohmann::ordered_json::object();
    std::string csv;
    bool pass = true;
};

nlohmann::ordered_json report_json(const Report &r);

Report cmd_compare(const RunConfig &cfg);
Report cmd_verify(const RunConfig &cfg);
Report cmd_swap_decay(const RunConfig &cfg);
Report cmd_poisson_check(const RunConfig &cfg);
Report cmd_identities(const RunConfig &cfg);
Report dispatch(const RunConfig &cfg);

// Number of i with gap[i+1] > gap[i].
int inversions(const std::vector<double> &gaps);

struct Check
{
    std::string name;
    double value = 0;
    double tolerance = 0;
    std::string oracle;
    bool pass = false;
};

struct Suite
{
    std::string name;
    std::vector<Check> checks;
    double runtime_ms = 0;
    bool pass() const;
};

struct SuiteOptions
{
    std::uint64_t seed = 1;
    double tolerance = 0;
    int order = 12;
};

Suite suite_poisson(const SuiteOptions &opt = {});
Suite suite_local_identities(const SuiteOptions &opt = {});
Suite suite_contours(const SuiteOptions &opt = {});
Suite suite_replay(const SuiteOptions &opt = {});
Suite suite_b_continuation(const SuiteOptions &opt = {});

struct DecayFit
{
    std::vector<std::uint64_t> d;
    std::vector<double> magnitude;
    double exponent = 0;
};

// Least-squares slope of log |jswap_magnitude| against log d over prime d near a geometric grid.
DecayFit fit_swap_decay(const std::vector<Complex> &shifts, Complex s, std::size_t j, std::int64_t ell, double d_lo,
                        double d_hi, int points);

} // namespace quadtwist::harness

#endif

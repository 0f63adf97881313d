#include "mvts/environment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "mvts/errors.hpp"

namespace mvts {

namespace {

constexpr std::size_t kPortfolios = 10;
constexpr std::size_t kSectors = 8;

// Rows: portfolios 1..10; columns: mu_1..mu_8 then sigma^2.
constexpr std::array<std::array<double, kSectors + 1>, kPortfolios> kPortfolioTable{{
    {0.15, 0.33, -0.10, 0.08, -0.01, -0.04, 0.01, 0.11, 0.89},
    {0.14, 0.22, 0.15, 0.31, 0.02, 0.43, -0.08, 0.30, 0.66},
    {0.15, 0.24, -0.02, 0.02, 0.38, 0.48, 0.09, 0.32, 0.78},
    {0.43, 0.44, -0.05, -0.08, 0.00, 0.43, -0.04, 0.15, 0.41},
    {0.47, 0.22, 0.32, 0.09, 0.31, 0.40, -0.09, 0.35, 0.34},
    {0.49, 0.35, 0.07, 0.37, -0.04, 0.17, 0.45, 0.08, 0.91},
    {0.07, -0.02, -0.09, 0.31, 0.03, 0.06, 0.19, -0.07, 0.49},
    {0.24, -0.01, 0.25, 0.32, -0.04, 0.15, 0.32, 0.15, 0.97},
    {-0.07, 0.22, 0.30, 0.21, 0.47, 0.25, 0.44, -0.02, 0.70},
    {-0.02, 0.38, 0.14, -0.00, 0.46, 0.11, 0.35, 0.33, 0.66},
}};

}  // namespace

ArmTruth make_arm_truth(Vector mu, double sigma2, NoiseKind noise, bool allow_large_mean) {
    if (mu.empty()) throw InvalidParameter("arm truth: empty mean vector");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw InvalidParameter("arm truth: variance must be positive, got " + std::to_string(sigma2));
    }
    if (!std::all_of(mu.begin(), mu.end(), [](double v) { return std::isfinite(v); })) {
        throw InvalidParameter("arm truth: non-finite mean entry");
    }
    if (!allow_large_mean && norm(mu) > 1.0 + 1e-12) {
        throw InvalidParameter("arm truth: ||mu|| = " + std::to_string(norm(mu)) + " exceeds 1");
    }
    return {std::move(mu), sigma2, noise};
}

std::vector<ArmTruth> builtin_portfolio_truths(NoiseKind noise) {
    std::vector<ArmTruth> truths;
    truths.reserve(kPortfolios);
    for (const auto& row : kPortfolioTable) {
        truths.push_back(make_arm_truth(Vector(row.begin(), row.begin() + kSectors), row[kSectors], noise));
    }
    return truths;
}

std::vector<ArmTruth> read_truths(std::istream& in, NoiseKind noise, bool allow_large_mean) {
    std::vector<ArmTruth> truths;
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::size_t index = 0;
        if (!(fields >> index)) throw ConfigError("truth table line " + std::to_string(line_no) + ": missing arm index");
        if (index != truths.size() + 1) {
            throw ConfigError("truth table line " + std::to_string(line_no) + ": expected arm index " +
                              std::to_string(truths.size() + 1));
        }
        std::vector<double> values;
        double v = 0.0;
        while (fields >> v) values.push_back(v);
        if (!fields.eof()) throw ConfigError("truth table line " + std::to_string(line_no) + ": non-numeric field");
        if (values.size() < 2) {
            throw ConfigError("truth table line " + std::to_string(line_no) + ": need at least one mean entry and sigma2");
        }
        const double sigma2 = values.back();
        values.pop_back();
        if (dim == 0) dim = values.size();
        if (values.size() != dim) {
            throw ConfigError("truth table line " + std::to_string(line_no) + ": inconsistent dimension");
        }
        try {
            truths.push_back(make_arm_truth(std::move(values), sigma2, noise, allow_large_mean));
        } catch (const InvalidParameter& e) {
            throw ConfigError("truth table line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (truths.empty()) throw ConfigError("truth table contains no arms");
    return truths;
}

std::vector<ArmTruth> load_truths(const std::filesystem::path& path, NoiseKind noise, bool allow_large_mean) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth table " + path.string());
    try {
        return read_truths(in, noise, allow_large_mean);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_truths(std::ostream& out, std::span<const ArmTruth> truths) {
    if (truths.empty()) return;
    const std::size_t dim = truths.front().mu.size();
    out << "# arm";
    for (std::size_t j = 1; j <= dim; ++j) out << " mu_" << j;
    out << " sigma2\n";
    const auto flags = out.flags();
    out << std::fixed << std::setprecision(2);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        out << std::setw(2) << i + 1;
        for (double m : truths[i].mu) out << ' ' << std::setw(5) << (m == 0.0 ? 0.0 : m);
        out << ' ' << std::setw(5) << truths[i].sigma2 << '\n';
    }
    out.flags(flags);
}

ContextMatrix gen_contexts(std::size_t arms, std::size_t dim, Sampler& sampler) {
    ContextMatrix contexts(arms, dim);
    for (std::size_t i = 0; i < arms; ++i) {
        auto row = contexts.row(i);
        for (double& v : row) v = 2.0 * sampler.uniform01() - 1.0;
        const double n = norm(row);
        if (n > 1.0) {
            for (double& v : row) v /= n;
        }
    }
    return contexts;
}

double draw_reward(const ArmTruth& truth, std::span<const double> x, Sampler& sampler) {
    if (x.size() != truth.mu.size()) throw InvalidParameter("draw_reward: context dimension mismatch");
    return dot(x, truth.mu) + sample_noise(truth.noise, truth.sigma2, sampler);
}

double mv_value(std::span<const double> x, std::span<const double> mu, double sigma2, double rho) {
    if (x.size() != mu.size()) throw InvalidParameter("mv_value: dimension mismatch");
    return dot(x, mu) - rho * sigma2;
}

std::vector<double> mv_values(const ContextMatrix& contexts, std::span<const ArmTruth> truths, double rho) {
    if (contexts.arms() != truths.size()) throw InvalidParameter("mv_values: arm count mismatch");
    std::vector<double> out(truths.size());
    for (std::size_t i = 0; i < truths.size(); ++i) {
        out[i] = mv_value(contexts.row(i), truths[i].mu, truths[i].sigma2, rho);
    }
    return out;
}

std::size_t optimal_arm(const ContextMatrix& contexts, std::span<const ArmTruth> truths, double rho) {
    const auto values = mv_values(contexts, truths, rho);
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double regret(const ContextMatrix& contexts, std::span<const ArmTruth> truths, double rho, std::size_t chosen) {
    if (chosen >= truths.size()) throw InvalidParameter("regret: arm " + std::to_string(chosen) + " out of range");
    const auto values = mv_values(contexts, truths, rho);
    return *std::max_element(values.begin(), values.end()) - values[chosen];
}

}  // namespace mvts

#include "mvts/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mvts/errors.hpp"

namespace mvts {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("invalid value '" + std::string(text) + "' for key '" + std::string(key) + "'");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("invalid boolean '" + std::string(text) + "' for key '" + std::string(key) + "'");
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<PolicyKind> parse_policy_list(std::string_view text) {
    std::vector<PolicyKind> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (item.empty()) throw ConfigError("empty entry in policies list");
        try {
            out.push_back(parse_policy_kind(item));
        } catch (const InvalidParameter& e) {
            throw ConfigError(e.what());
        }
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig config;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(body.substr(0, eq));
        const auto value = trim(body.substr(eq + 1));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        seen.emplace_back(key);

        if (key == "arms") config.arms = parse_number<std::size_t>(key, value);
        else if (key == "dim") config.dim = parse_number<std::size_t>(key, value);
        else if (key == "horizon") config.horizon = parse_number<std::size_t>(key, value);
        else if (key == "rho") config.rho = parse_number<double>(key, value);
        else if (key == "replications") config.replications = parse_number<std::size_t>(key, value);
        else if (key == "policies") config.policies = parse_policy_list(value);
        else if (key == "noise") {
            const double bound = config.noise.bound;
            try {
                config.noise = parse_noise_kind(value);
            } catch (const InvalidParameter& e) {
                throw ConfigError(e.what());
            }
            config.noise.bound = bound;
        }
        else if (key == "truncation_bound") config.noise.bound = parse_number<double>(key, value);
        else if (key == "master_seed") config.master_seed = parse_number<std::uint64_t>(key, value);
        else if (key == "R") config.R = parse_number<double>(key, value);
        else if (key == "epsilon") config.epsilon = parse_number<double>(key, value);
        else if (key == "delta") config.delta = parse_number<double>(key, value);
        else if (key == "mvts_dn.u") config.dn_u = parse_number<double>(key, value);
        else if (key == "mvts_dn.v") config.dn_v = parse_number<double>(key, value);
        else if (key == "ts_a.v") config.ts_a_v = parse_number<double>(key, value);
        else if (key == "truths") config.truth_source = std::string(value);
        else if (key == "allow_large_mean") config.allow_large_mean = parse_bool(key, value);
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "arms = " << config.arms << '\n'
        << "dim = " << config.dim << '\n'
        << "horizon = " << config.horizon << '\n'
        << "rho = " << format_double(config.rho) << '\n'
        << "replications = " << config.replications << '\n'
        << "policies = ";
    for (std::size_t i = 0; i < config.policies.size(); ++i) {
        out << (i ? "," : "") << to_string(config.policies[i]);
    }
    out << '\n'
        << "noise = " << to_string(config.noise.tag) << '\n'
        << "truncation_bound = " << format_double(config.noise.bound) << '\n'
        << "master_seed = " << config.master_seed << '\n'
        << "R = " << format_double(config.R) << '\n'
        << "epsilon = " << format_double(config.epsilon) << '\n'
        << "delta = " << format_double(config.delta) << '\n';
    if (config.dn_u) out << "mvts_dn.u = " << format_double(*config.dn_u) << '\n';
    if (config.dn_v) out << "mvts_dn.v = " << format_double(*config.dn_v) << '\n';
    if (config.ts_a_v) out << "ts_a.v = " << format_double(*config.ts_a_v) << '\n';
    out << "truths = " << config.truth_source << '\n'
        << "allow_large_mean = " << (config.allow_large_mean ? "true" : "false") << '\n';
    return out.str();
}

void validate(const ExperimentConfig& config) {
    if (config.arms == 0) throw ConfigError("arms must be at least 1");
    if (config.dim == 0) throw ConfigError("dim must be at least 1");
    if (config.horizon == 0) throw ConfigError("horizon must be at least 1");
    if (config.replications == 0) throw ConfigError("replications must be at least 1");
    if (!(config.rho >= 0.0) || !std::isfinite(config.rho)) throw ConfigError("rho must be finite and nonnegative");
    if (config.policies.empty()) throw ConfigError("policies must not be empty");
    for (std::size_t i = 0; i < config.policies.size(); ++i) {
        for (std::size_t j = i + 1; j < config.policies.size(); ++j) {
            if (config.policies[i] == config.policies[j]) {
                throw ConfigError("policy '" + std::string(to_string(config.policies[i])) + "' listed twice");
            }
        }
    }
    if (!(config.noise.bound > 0.0)) throw ConfigError("truncation_bound must be positive");
    for (const auto& override_value : {config.dn_u, config.dn_v, config.ts_a_v}) {
        if (override_value && !(*override_value > 0.0)) throw ConfigError("constant overrides must be positive");
    }
    for (auto kind : config.policies) {
        try {
            (void)resolve_policy(config, kind);
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string(to_string(kind)) + ": " + e.what());
        }
    }
}

std::vector<ArmTruth> resolve_truths(const ExperimentConfig& config) {
    std::vector<ArmTruth> truths;
    if (config.truth_source == "builtin") {
        truths = builtin_portfolio_truths(config.noise);
    } else {
        truths = load_truths(config.truth_source, config.noise, config.allow_large_mean);
    }
    if (truths.size() != config.arms || truths.front().mu.size() != config.dim) {
        throw ConfigError("truth source '" + config.truth_source + "' has K = " + std::to_string(truths.size()) +
                          ", d = " + std::to_string(truths.front().mu.size()) + " but the config asks for K = " +
                          std::to_string(config.arms) + ", d = " + std::to_string(config.dim));
    }
    return truths;
}

PolicyParams resolve_policy(const ExperimentConfig& config, PolicyKind kind) {
    PolicyParams params{.kind = kind, .rho = config.rho};
    if (kind == PolicyKind::mvts_dn) {
        if (config.dn_u && config.dn_v) {
            params.u = *config.dn_u;
            params.v = *config.dn_v;
        } else {
            const auto derived = dn_constants(config.R, config.epsilon, config.delta, config.dim, config.arms);
            params.u = config.dn_u.value_or(derived.u);
            params.v = config.dn_v.value_or(derived.v);
        }
    } else if (kind == PolicyKind::ts_a) {
        params.v = config.ts_a_v ? *config.ts_a_v : ts_a_constant(config.R, config.epsilon, config.delta, config.dim);
    }
    return params;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication, std::string_view tag) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(master_seed ^ mix64(replication)) ^ h);
}

}  // namespace mvts

#include "mvts/records.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <string_view>
#include <system_error>

#include "mvts/errors.hpp"

namespace mvts {

namespace {

void append_real(std::string& line, double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    line.append(buf.data(), ptr);
}

void append_integer(std::string& line, std::size_t v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    line.append(buf.data(), ptr);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

template <typename T>
T parse_field(std::string_view text, std::size_t line_no) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw IoError("records line " + std::to_string(line_no) + ": bad field '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& out, std::span<const RoundRecord> records) {
    std::string line;
    for (const auto& r : records) {
        line.clear();
        append_integer(line, r.replication);
        line += ',';
        append_integer(line, r.round);
        line += ',';
        line += to_string(r.policy);
        line += ',';
        append_integer(line, r.chosen_arm);
        line += ',';
        append_integer(line, r.optimal_arm);
        line += ',';
        append_real(line, r.reward);
        line += ',';
        append_real(line, r.regret);
        line += ',';
        append_real(line, r.cum_regret);
        line += '\n';
        out << line;
    }
}

void write_csv(std::ostream& out, std::span<const RoundRecord> records) {
    write_csv_header(out);
    write_csv_rows(out, records);
}

void write_csv(std::ostream& out, const ExperimentResult& result) {
    write_csv_header(out);
    for (const auto& rep : result.replications) {
        for (const auto& trace : rep.traces) write_csv_rows(out, trace.records);
    }
}

void write_csv(const std::filesystem::path& path, const ExperimentResult& result) {
    auto out = open_for_write(path);
    write_csv(out, result);
    check_written(out, path);
}

std::vector<RoundRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("records: empty input, expected a header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw IoError("records: unexpected header '" + line + "'");

    std::vector<RoundRecord> records;
    std::size_t line_no = 1;
    std::array<std::string_view, 8> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view rest = line;
        std::size_t count = 0;
        for (;;) {
            const auto comma = rest.find(',');
            if (count == fields.size()) {
                throw IoError("records line " + std::to_string(line_no) + ": too many fields");
            }
            fields[count++] = rest.substr(0, comma);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (count != fields.size()) throw IoError("records line " + std::to_string(line_no) + ": expected 8 fields");

        RoundRecord r;
        r.replication = parse_field<std::size_t>(fields[0], line_no);
        r.round = parse_field<std::size_t>(fields[1], line_no);
        try {
            r.policy = parse_policy_kind(fields[2]);
        } catch (const InvalidParameter& e) {
            throw IoError("records line " + std::to_string(line_no) + ": " + e.what());
        }
        r.chosen_arm = parse_field<std::size_t>(fields[3], line_no);
        r.optimal_arm = parse_field<std::size_t>(fields[4], line_no);
        r.reward = parse_field<double>(fields[5], line_no);
        r.regret = parse_field<double>(fields[6], line_no);
        r.cum_regret = parse_field<double>(fields[7], line_no);
        records.push_back(r);
    }
    return records;
}

std::vector<RoundRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_csv(in);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::vector<ReplicationResult> replications_from_records(std::span<const RoundRecord> records,
                                                         std::span<const PolicyKind> policies) {
    // replication -> policy -> (round, cum_regret)
    std::map<std::size_t, std::map<PolicyKind, std::vector<std::pair<std::size_t, double>>>> grouped;
    for (const auto& r : records) {
        if (r.round == 0) continue;
        grouped[r.replication][r.policy].emplace_back(r.round, r.cum_regret);
    }
    std::vector<ReplicationResult> out;
    for (auto& [rep, by_policy] : grouped) {
        ReplicationResult result{.replication = rep, .traces = {}};
        for (auto kind : policies) {
            auto it = by_policy.find(kind);
            if (it == by_policy.end()) {
                throw IoError("records: replication " + std::to_string(rep) + " has no rows for policy " +
                              std::string(to_string(kind)));
            }
            auto& rows = it->second;
            std::sort(rows.begin(), rows.end());
            PolicyTrace trace;
            trace.policy = kind;
            trace.cum_regret.reserve(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].first != i + 1) {
                    throw IoError("records: replication " + std::to_string(rep) + ", policy " +
                                  std::string(to_string(kind)) + " is missing round " + std::to_string(i + 1));
                }
                trace.cum_regret.push_back(rows[i].second);
            }
            result.traces.push_back(std::move(trace));
        }
        out.push_back(std::move(result));
    }
    return out;
}

void emit_plot_data(std::ostream& out, const AggregateCurves& curves) {
    out << "# round";
    for (auto kind : curves.policies) out << ' ' << to_string(kind);
    out << '\n';
    std::string line;
    for (std::size_t t = 0; t < curves.horizon(); ++t) {
        line.clear();
        append_integer(line, t + 1);
        for (const auto& curve : curves.mean_cum_regret) {
            line += ' ';
            append_real(line, curve[t]);
        }
        line += '\n';
        out << line;
    }
}

void emit_plot_data(const std::filesystem::path& path, const AggregateCurves& curves) {
    auto out = open_for_write(path);
    emit_plot_data(out, curves);
    check_written(out, path);
}

void write_metadata(std::ostream& out, const ExperimentConfig& config) {
    out << "# mvts run metadata; parseable as a run config\n"
        << "# reward_noise: independent draws per policy (contexts shared within a replication)\n"
        << "# seeds: derive_seed(master_seed, replication, tag); tags env, <policy>, <policy>/reward\n";
    for (auto kind : config.policies) {
        const auto params = resolve_policy(config, kind);
        out << "# resolved " << to_string(kind) << ": rho=" << params.rho;
        if (kind == PolicyKind::mvts_dn) out << " u=" << params.u << " v=" << params.v;
        if (kind == PolicyKind::ts_a) out << " v=" << params.v;
        out << '\n';
    }
    out << serialize_config(config);
}

void write_metadata(const std::filesystem::path& path, const ExperimentConfig& config) {
    auto out = open_for_write(path);
    write_metadata(out, config);
    check_written(out, path);
}

void render_svg(std::ostream& out, const AggregateCurves& curves, const std::string& title) {
    constexpr double width = 800.0;
    constexpr double height = 500.0;
    constexpr double left = 70.0;
    constexpr double right = 170.0;
    constexpr double top = 40.0;
    constexpr double bottom = 50.0;
    constexpr std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    const std::size_t horizon = curves.horizon();
    double y_max = 0.0;
    for (const auto& curve : curves.mean_cum_regret) {
        for (double v : curve) y_max = std::max(y_max, v);
    }
    if (y_max <= 0.0) y_max = 1.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const auto px = [&](std::size_t round) {
        return left + plot_w * (horizon > 1 ? static_cast<double>(round - 1) / static_cast<double>(horizon - 1) : 0.0);
    };
    const auto py = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << title << "</text>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">round</text>\n"
        << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 " << top + plot_h / 2
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">mean total regret</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = y_max * tick / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << v << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << horizon << "</text>\n";

    const std::size_t stride = std::max<std::size_t>(1, horizon / 500);
    for (std::size_t p = 0; p < curves.policies.size(); ++p) {
        const char* color = colors[p % colors.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t t = 1; t <= horizon; t += stride) {
            out << px(t) << ',' << py(curves.mean_cum_regret[p][t - 1]) << ' ';
        }
        if (horizon > 0) out << px(horizon) << ',' << py(curves.mean_cum_regret[p][horizon - 1]);
        out << "\"/>\n";
        const double ly = top + 16.0 + 18.0 * static_cast<double>(p);
        out << "<line x1=\"" << width - right + 12 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 36
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << width - right + 42 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << to_string(curves.policies[p]) << "</text>\n";
    }
    out << "</svg>\n";
}

void write_run_outputs(const std::filesystem::path& dir, const ExperimentResult& result) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const bool have_records = std::any_of(result.replications.begin(), result.replications.end(), [](const auto& rep) {
        return std::any_of(rep.traces.begin(), rep.traces.end(), [](const auto& t) { return !t.records.empty(); });
    });
    if (have_records) write_csv(dir / "records.csv", result);
    emit_plot_data(dir / "regret.dat", result.curves);
    write_metadata(dir / "metadata.cfg", result.config);
}

}  // namespace mvts

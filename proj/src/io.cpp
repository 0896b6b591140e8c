#include "cfm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "cfm/error.hpp"

namespace cfm::io {

namespace {

void write_fingerprint(std::ostream& out, const std::string& fingerprint) {
    if (!fingerprint.empty()) out << "# " << fingerprint << '\n';
}

bool skippable(std::string_view line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string_view::npos || line[first] == '#';
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == '\r' || s[j] == ',')) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::uint64_t parse_index(std::string_view text, std::size_t line, const char* what) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError(std::string("invalid ") + what + " '" + std::string(text) + "'", line);
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_fraction(double v) {
    std::string s = format_shortest(v);
    if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

double parse_double(std::string_view text, std::size_t line) {
    text = trim(text);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const char* begin = text.data();
    if (!text.empty() && text.front() == '+') ++begin;
    const auto res = std::from_chars(begin, end, v);
    if (text.empty() || res.ec != std::errc() || res.ptr != end)
        throw ParseError("invalid number '" + std::string(text) + "'", line);
    return v;
}

void write_matrix(std::ostream& out, const CirculationMatrix& m, const std::string& fingerprint) {
    write_fingerprint(out, fingerprint);
    out << "cfm " << m.n() << ' ' << m.nnz() << '\n';
    for (AgentIndex j = 0; j < m.n(); ++j) {
        const auto col = m.column(j);
        for (std::size_t k = 0; k < col.rows.size(); ++k)
            out << col.rows[k] + 1 << ' ' << j + 1 << ' ' << format_fraction(col.values[k]) << '\n';
    }
}

void save_matrix(const std::filesystem::path& path, const CirculationMatrix& m, const std::string& fingerprint) {
    auto out = open_out(path);
    write_matrix(out, m, fingerprint);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

CirculationMatrix parse_matrix(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t n = 0;
    std::size_t nnz = 0;
    bool have_header = false;
    std::vector<Triplet> triplets;
    std::unordered_set<std::uint64_t> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto tok = tokens(line);
        if (!have_header) {
            if (tok.size() != 3 || tok[0] != "cfm") throw ParseError("expected header \"cfm <n> <nnz>\"", lineno);
            n = parse_index(tok[1], lineno, "dimension");
            nnz = parse_index(tok[2], lineno, "entry count");
            if (n == 0) throw ParseError("matrix dimension must be >= 1", lineno);
            triplets.reserve(nnz);
            have_header = true;
            continue;
        }
        if (tok.size() != 3) throw ParseError("expected \"i j f_ij\"", lineno);
        const auto i = parse_index(tok[0], lineno, "row index");
        const auto j = parse_index(tok[1], lineno, "column index");
        if (i < 1 || j < 1 || i > n || j > n)
            throw ParseError("index outside 1.." + std::to_string(n), lineno);
        const double f = parse_double(tok[2], lineno);
        if (!std::isfinite(f)) throw ParseError("non-finite fraction", lineno);
        if (triplets.size() == nnz) throw ParseError("more entries than the header's " + std::to_string(nnz), lineno);
        if (!seen.insert((static_cast<std::uint64_t>(i) << 32) | j).second)
            throw ParseError("duplicate entry (" + std::to_string(i) + ", " + std::to_string(j) + ")", lineno);
        triplets.push_back({static_cast<AgentIndex>(i - 1), static_cast<AgentIndex>(j - 1), f});
    }
    if (!have_header) throw ParseError("missing \"cfm <n> <nnz>\" header");
    if (triplets.size() != nnz)
        throw ParseError("header announces " + std::to_string(nnz) + " entries, found " +
                         std::to_string(triplets.size()));
    try {
        return CirculationMatrix::from_triplets(n, std::move(triplets));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

CirculationMatrix read_matrix(std::istream& in) {
    auto m = parse_matrix(in);
    if (!m.is_valid()) throw ValidationError("matrix rejected: " + validate(m).summary());
    return m;
}

CirculationMatrix load_matrix(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return read_matrix(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::vector<double> read_amounts(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        for (auto t : tokens(line)) {
            const double v = parse_double(t, lineno);
            if (!std::isfinite(v) || v < 0.0) throw ParseError("amounts must be finite and >= 0", lineno);
            out.push_back(v);
        }
    }
    return out;
}

std::vector<double> load_amounts(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_amounts(in);
}

void write_full_snapshots(std::ostream& out, const SimulationTrace& trace, const std::string& fingerprint,
                          bool final_only) {
    write_fingerprint(out, fingerprint);
    out << "tau,total";
    for (std::size_t i = 1; i <= trace.n; ++i) out << ",x_" << i;
    out << '\n';
    for (const auto& s : trace.snapshots) {
        if (!s.full() || (final_only && s.tau != trace.steps)) continue;
        out << s.tau << ',' << format_shortest(s.total);
        for (double v : *s.values) out << ',' << format_shortest(v);
        out << '\n';
    }
}

void write_snapshots(std::ostream& out, const SimulationTrace& trace, bool summary_rows, const std::string& fingerprint) {
    if (!summary_rows) {
        for (const auto& s : trace.snapshots)
            if (!s.full()) throw std::logic_error("trace holds summary snapshots; cannot write a full table");
        write_full_snapshots(out, trace, fingerprint);
        return;
    }
    write_fingerprint(out, fingerprint);
    out << "tau,total,gini,top1,top10\n";
    for (const auto& s : trace.snapshots) {
        const SnapshotSummary sum = s.summary ? *s.summary : summarize(*s.values);
        out << s.tau << ',' << format_shortest(s.total) << ','
            << (sum.gini ? format_shortest(*sum.gini) : std::string("undefined")) << ',' << format_shortest(sum.top1)
            << ',' << format_shortest(sum.top10) << '\n';
    }
}

void write_drift(std::ostream& out, const SimulationTrace& trace, const std::string& fingerprint) {
    write_fingerprint(out, fingerprint);
    out << "tau,total,abs_drift,rel_drift\n";
    const double m = trace.monetary_base;
    for (std::size_t t = 0; t < trace.drift.size(); ++t) {
        const double rel = m > 0.0 ? trace.drift[t] / m : 0.0;
        out << t + 1 << ',' << format_shortest(trace.totals[t]) << ',' << format_shortest(trace.drift[t]) << ','
            << format_shortest(rel) << '\n';
    }
}

SnapshotTable read_snapshots(std::istream& in) {
    SnapshotTable table;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto cells = split(line, ',');
        if (!have_header) {
            if (cells.size() < 3 || cells[0] != "tau" || cells[1] != "total")
                throw ParseError("expected a snapshot header starting \"tau,total\"", lineno);
            if (cells[2] == "gini") {
                if (cells.size() != 5) throw ParseError("summary header must be tau,total,gini,top1,top10", lineno);
                table.full = false;
            } else {
                table.full = true;
                table.n = cells.size() - 2;
                for (std::size_t i = 2; i < cells.size(); ++i)
                    if (cells[i] != "x_" + std::to_string(i - 1)) throw ParseError("unexpected column '" + std::string(cells[i]) + "'", lineno);
            }
            columns = cells.size();
            have_header = true;
            continue;
        }
        if (cells.size() != columns)
            throw ParseError("expected " + std::to_string(columns) + " cells, found " + std::to_string(cells.size()), lineno);
        Snapshot s;
        s.tau = parse_index(cells[0], lineno, "tau");
        s.total = parse_double(cells[1], lineno);
        if (table.full) {
            std::vector<double> v;
            v.reserve(table.n);
            for (std::size_t i = 2; i < cells.size(); ++i) v.push_back(parse_double(cells[i], lineno));
            s.values = std::move(v);
        } else {
            SnapshotSummary sum;
            if (cells[2] != "undefined") sum.gini = parse_double(cells[2], lineno);
            sum.top1 = parse_double(cells[3], lineno);
            sum.top10 = parse_double(cells[4], lineno);
            s.summary = sum;
        }
        if (!table.rows.empty() && s.tau <= table.rows.back().tau)
            throw ParseError("snapshot times must be strictly increasing", lineno);
        table.rows.push_back(std::move(s));
    }
    if (!have_header) throw ParseError("empty snapshot file");
    return table;
}

SnapshotTable load_snapshots(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return read_snapshots(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv,
                      const std::string& fingerprint) {
    write_fingerprint(out, fingerprint);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", lineno);
        kv[std::string(trim(std::string_view(line).substr(0, eq)))] = std::string(trim(std::string_view(line).substr(eq + 1)));
    }
    return kv;
}

void write_lorenz(std::ostream& out, const std::vector<analytics::LorenzPoint>& pts, const std::string& fingerprint) {
    write_fingerprint(out, fingerprint);
    out << "population_share,wealth_share\n";
    for (const auto& p : pts) out << format_shortest(p.population) << ',' << format_shortest(p.wealth) << '\n';
}

void write_ccdf(std::ostream& out, const std::vector<analytics::CcdfPoint>& pts, const std::string& fingerprint) {
    write_fingerprint(out, fingerprint);
    out << "level,ccdf\n";
    for (const auto& p : pts) out << format_shortest(p.level) << ',' << format_shortest(p.probability) << '\n';
}

void write_convergence(std::ostream& out, const analytics::ConvergenceReport& r, const std::string& fingerprint) {
    write_fingerprint(out, fingerprint);
    out << "tau,step_distance,reference_distance\n";
    std::map<std::size_t, std::pair<std::string, std::string>> rows;
    for (std::size_t k = 0; k < r.taus.size(); ++k) rows[r.taus[k]].first = format_shortest(r.step_distances[k]);
    for (std::size_t k = 0; k < r.reference_taus.size(); ++k)
        rows[r.reference_taus[k]].second = format_shortest(r.reference_distances[k]);
    for (const auto& [tau, d] : rows) out << tau << ',' << d.first << ',' << d.second << '\n';
}

}  // namespace cfm::io

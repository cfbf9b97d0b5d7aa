#include "votes_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "owb/errors.hpp"

namespace owb::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// RFC 4180-style split: double-quoted fields may contain commas and "".
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!trim(cur).empty()) throw ParseError(line_no, "stray quote inside field");
            cur.clear();
            quoted = was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError(line_no, "unterminated quoted field");
    fields.push_back(was_quoted ? cur : trim(cur));
    return fields;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::size_t intern(std::unordered_map<std::string, std::size_t>& index, std::vector<std::string>& table,
                   const std::string& id) {
    auto [it, inserted] = index.try_emplace(id, table.size());
    if (inserted) table.push_back(id);
    return it->second;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

IngestedPanel ingest(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv(line, line_no);
            break;
        }
    }
    if (header.empty()) throw ParseError(line_no == 0 ? 1 : line_no, "missing header row");
    const std::size_t header_line = line_no;

    auto column = [&](const char* name) {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return k;
        throw ParseError(header_line, std::string("header lacks column '") + name + "'");
    };
    const std::size_t c_persona = column("persona_id");
    const std::size_t c_cluster = column("cluster_id");
    const std::size_t c_round = column("round");
    const std::size_t c_petal = column("petal_id");
    const std::size_t c_value = column("value");

    IdTables ids;
    std::unordered_map<std::string, std::size_t> persona_index, petal_index, cluster_index;
    std::vector<std::size_t> persona_cluster;
    std::vector<std::size_t> max_round;

    struct Record {
        std::size_t persona, round, petal;
        double value;
    };
    std::vector<Record> records;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> seen;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split_csv(line, line_no);
        if (f.size() != header.size())
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                          std::to_string(f.size()));
        if (f[c_persona].empty()) throw ParseError(line_no, "empty persona_id");
        if (f[c_petal].empty()) throw ParseError(line_no, "empty petal_id");
        if (f[c_cluster].empty()) throw ParseError(line_no, "empty cluster_id");

        std::size_t round = 0;
        {
            const auto& s = f[c_round];
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), round);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
                throw ParseError(line_no, "round '" + s + "' is not a nonnegative integer");
        }

        double value = std::numeric_limits<double>::quiet_NaN();
        if (const auto& s = f[c_value]; !s.empty()) {
            const char* begin = s.data();
            if (*begin == '+') ++begin;
            const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
            if (ec != std::errc() || ptr != s.data() + s.size())
                throw ParseError(line_no, "value '" + s + "' is not a number");
        }

        const std::size_t p = intern(persona_index, ids.personas, f[c_persona]);
        const std::size_t j = intern(petal_index, ids.petals, f[c_petal]);
        const std::size_t c = intern(cluster_index, ids.clusters, f[c_cluster]);
        if (p == persona_cluster.size()) {
            persona_cluster.push_back(c);
            max_round.push_back(round);
        } else {
            if (persona_cluster[p] != c)
                throw Error(ErrorCode::inconsistent_cluster,
                            "line " + std::to_string(line_no) + ": persona '" + f[c_persona] +
                                "' appears under clusters '" + ids.clusters[persona_cluster[p]] + "' and '" +
                                f[c_cluster] + "'");
            max_round[p] = std::max(max_round[p], round);
        }
        const auto [it, inserted] = seen.try_emplace({p, round, j}, line_no);
        if (!inserted)
            throw Error(ErrorCode::duplicate_key,
                        "line " + std::to_string(line_no) + ": duplicate record for (" + f[c_persona] + ", " +
                            f[c_round] + ", " + f[c_petal] + "), first seen on line " + std::to_string(it->second));
        records.push_back({p, round, j, value});
    }
    if (records.empty()) throw ParseError(line_no, "no data records");

    const std::size_t np = ids.petals.size();
    std::vector<VoteTensor::Rounds> personas(ids.personas.size());
    for (std::size_t p = 0; p < personas.size(); ++p)
        personas[p].assign(max_round[p] + 1,
                           std::vector<double>(np, std::numeric_limits<double>::quiet_NaN()));
    for (const auto& rec : records) personas[rec.persona][rec.round][rec.petal] = rec.value;

    return IngestedPanel{VoteTensor(np, personas), ClusterMap(persona_cluster), std::move(ids)};
}

IngestedPanel ingest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + path.string() + "'");
    return ingest(in);
}

void write_votes(std::ostream& out, const VoteTensor& tensor, const ClusterMap& clusters, const IdTables& ids) {
    if (ids.personas.size() != tensor.n_personas() || ids.petals.size() != tensor.n_petals())
        throw Error(ErrorCode::invalid_argument, "id tables do not match tensor shape");
    out << "persona_id,cluster_id,round,petal_id,value\n";
    for (std::size_t p = 0; p < tensor.n_personas(); ++p) {
        const std::string persona = quote_if_needed(ids.personas[p]);
        const std::string cluster = quote_if_needed(ids.clusters.at(clusters.cluster_of(p)));
        for (std::size_t r = 0; r < tensor.n_rounds(p); ++r)
            for (std::size_t j = 0; j < tensor.n_petals(); ++j) {
                out << persona << ',' << cluster << ',' << r << ',' << quote_if_needed(ids.petals[j]) << ',';
                if (tensor.observed(p, r, j)) out << format_double(tensor.value(p, r, j));
                out << '\n';
            }
    }
}

IdTables synthetic_ids(std::size_t n_personas, std::size_t n_petals, std::size_t n_clusters) {
    IdTables ids;
    for (std::size_t p = 0; p < n_personas; ++p) ids.personas.push_back("p" + std::to_string(p));
    for (std::size_t j = 0; j < n_petals; ++j) ids.petals.push_back("q" + std::to_string(j));
    for (std::size_t c = 0; c < n_clusters; ++c) ids.clusters.push_back("c" + std::to_string(c));
    return ids;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::invalid_argument, "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::invalid_argument, "write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace owb::cli

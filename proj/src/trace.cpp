#include "pteem/trace.hpp"

namespace pteem {

void write_exchange_matrix_csv(const std::string& path, const std::vector<std::vector<double>>& m) {
    CsvTable csv;
    csv.header.push_back("chain");
    for (std::size_t j = 0; j < m.size(); ++j)
        csv.header.push_back("chain" + std::to_string(j + 1));
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(fmt_int(static_cast<long long>(i) + 1));
        for (double v : m[i]) row.push_back(fmt_real(v));
        csv.rows.push_back(std::move(row));
    }
    write_csv(path, csv);
}

std::vector<std::vector<double>> read_exchange_matrix_csv(const std::string& path) {
    CsvTable csv = read_csv(path);
    std::vector<std::vector<double>> m;
    for (const auto& row : csv.rows) {
        std::vector<double> vals;
        for (std::size_t j = 1; j < row.size(); ++j) vals.push_back(parse_real(row[j]));
        m.push_back(std::move(vals));
    }
    return m;
}

void write_events_csv(const std::string& path, const std::vector<ExchangeEvent>& events) {
    CsvTable csv;
    csv.header = {"iteration", "kind", "chain_i", "chain_k", "ring", "proposed", "accepted"};
    for (const auto& e : events) {
        csv.rows.push_back({fmt_int(e.iteration), move_kind_name(e.kind), fmt_int(e.chain_i),
                            fmt_int(e.chain_k), fmt_int(e.ring), fmt_int(e.proposed ? 1 : 0),
                            fmt_int(e.accepted ? 1 : 0)});
    }
    write_csv(path, csv);
}

std::vector<ExchangeEvent> read_events_csv(const std::string& path) {
    CsvTable csv = read_csv(path);
    std::vector<ExchangeEvent> events;
    for (const auto& row : csv.rows) {
        if (row.size() != 7) throw run_error("events csv: bad row width in " + path);
        ExchangeEvent e;
        e.iteration = parse_int(row[0]);
        if (row[1] == "exchange")
            e.kind = MoveKind::exchange;
        else if (row[1] == "swap")
            e.kind = MoveKind::swap;
        else if (row[1] == "jump")
            e.kind = MoveKind::jump;
        else
            throw run_error("events csv: unknown move kind '" + row[1] + "'");
        e.chain_i = static_cast<int>(parse_int(row[2]));
        e.chain_k = static_cast<int>(parse_int(row[3]));
        e.ring = static_cast<int>(parse_int(row[4]));
        e.proposed = parse_int(row[5]) != 0;
        e.accepted = parse_int(row[6]) != 0;
        events.push_back(e);
    }
    return events;
}

std::vector<std::vector<int>> read_rings_csv(const std::string& path, int* n_chains_out) {
    CsvTable csv = read_csv(path);
    if (csv.header.size() < 2) throw run_error("rings csv: missing chain columns in " + path);
    int n_chains = static_cast<int>(csv.header.size()) - 1;
    if (n_chains_out) *n_chains_out = n_chains;
    std::vector<std::vector<int>> record;
    for (const auto& row : csv.rows) {
        std::vector<int> rings;
        for (std::size_t j = 1; j < row.size(); ++j)
            rings.push_back(static_cast<int>(parse_int(row[j])));
        record.push_back(std::move(rings));
    }
    return record;
}

} // namespace pteem

#include "bincover/io.hpp"

#include <fstream>
#include <sstream>

#include "bincover/errors.hpp"

namespace bincover::io {

namespace {

Rational rational_field(const json& j, const char* where) {
    if (j.is_string()) {
        try {
            return Rational::parse(j.get<std::string>());
        } catch (const std::exception& e) {
            throw ValidationError(std::string(where) + ": " + e.what());
        }
    }
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
    throw ValidationError(std::string(where) + ": expected a \"p/q\" string");
}

std::vector<Rational> rational_array(const json& j, const char* where) {
    if (!j.is_array()) throw ValidationError(std::string(where) + ": expected an array");
    std::vector<Rational> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(rational_field(e, where));
    return out;
}

const json& required(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing field \"") + key + "\"");
    return *it;
}

} // namespace

json distribution_to_json(const DiscreteDistribution& F) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json sizes = json::array(), probs = json::array();
    for (const Rational& s : F.sizes()) sizes.push_back(s.str());
    for (const Rational& p : F.probs()) probs.push_back(p.str());
    j["sizes"] = std::move(sizes);
    j["probs"] = std::move(probs);
    return j;
}

DiscreteDistribution distribution_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("distribution file: expected a JSON object");
    auto sizes = rational_array(required(j, "sizes"), "sizes");
    auto probs = rational_array(required(j, "probs"), "probs");
    return DiscreteDistribution::make(std::move(sizes), std::move(probs),
                                      /*allow_zero_sizes=*/true);
}

json list_to_json(const ItemList& L) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json items = json::array();
    for (const Rational& s : L.items()) items.push_back(s.str());
    j["items"] = std::move(items);
    return j;
}

ItemList list_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("list file: expected a JSON object");
    return ItemList(rational_array(required(j, "items"), "items"));
}

json chain_to_json(const BinLevelChain& chain) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json states = json::array();
    for (const Rational& s : chain.states()) states.push_back(s.str());
    j["states"] = std::move(states);
    json transitions = json::array();
    for (std::size_t u = 0; u < chain.size(); ++u) {
        const auto& row = chain.rows()[u];
        for (const auto& [v, p] : row.open_edges)
            transitions.push_back(json::array({u, v, p.str()}));
        if (row.close_mass.sign() > 0)
            transitions.push_back(json::array({u, 0, row.close_mass.str()}));
    }
    j["transitions"] = std::move(transitions);
    return j;
}

json certificate_to_json(const PerfectPackingCertificate& cert) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "certificate";
    json configs = json::array();
    for (const auto& cfg : cert.configurations) {
        json counts = json::array();
        for (std::uint32_t c : cfg.counts) counts.push_back(c);
        configs.push_back(std::move(counts));
    }
    j["configurations"] = std::move(configs);
    json alphas = json::array();
    for (const Rational& a : cert.coefficients) alphas.push_back(a.str());
    j["coefficients"] = std::move(alphas);
    return j;
}

json refutation_to_json(const PackingRefutation& ref) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "refutation";
    json sep = json::array();
    for (const Rational& y : ref.separator) sep.push_back(y.str());
    j["separator"] = std::move(sep);
    return j;
}

json packing_decision_to_json(const PackingDecision& decision) {
    if (const auto* cert = std::get_if<PerfectPackingCertificate>(&decision))
        return certificate_to_json(*cert);
    return refutation_to_json(std::get<PackingRefutation>(decision));
}

std::string to_canonical_string(const json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, to_canonical_string(j));
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ValidationError("malformed JSON in " + path.string());
    return j;
}

DiscreteDistribution read_distribution_file(const std::filesystem::path& path) {
    return distribution_from_json(read_json_file(path));
}

ItemList read_list_file(const std::filesystem::path& path) {
    return list_from_json(read_json_file(path));
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size())
        throw std::logic_error("CSV row width differs from the header");
    rows_.push_back(std::move(row));
}

namespace {

void append_csv_field(std::string& out, const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\n") != std::string::npos;
    if (!needs_quotes) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void append_csv_line(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        append_csv_field(out, fields[i]);
    }
    out += '\n';
}

} // namespace

std::string CsvTable::str() const {
    std::string out;
    append_csv_line(out, header_);
    for (const auto& row : rows_) append_csv_line(out, row);
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

} // namespace bincover::io

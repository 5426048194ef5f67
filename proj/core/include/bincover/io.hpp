#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bincover/chain.hpp"
#include "bincover/distribution.hpp"
#include "bincover/offline.hpp"

namespace bincover::io {

using json = nlohmann::ordered_json;

// Every writer stamps "schema_version": 1; readers accept any or no version.
inline constexpr int kSchemaVersion = 1;

// Distribution files: {"schema_version":1,"sizes":["1/3","2/3"],"probs":["1/2","1/2"]}.
// Rationals travel as "p/q" strings so files round-trip exactly.
json distribution_to_json(const DiscreteDistribution& F);
DiscreteDistribution distribution_from_json(const json& j);

// List files: {"schema_version":1,"items":["1/3","2/3", ...]}.
json list_to_json(const ItemList& L);
ItemList list_from_json(const json& j);

// Chain dumps: states as level strings ("0" is the closed state), transitions
// as (from, to, "p/q") triples. Closing mass appears as an edge back to 0.
json chain_to_json(const BinLevelChain& chain);

// Certificates: configurations as integer vectors, coefficients as "p/q";
// refutations carry the separating vector.
json certificate_to_json(const PerfectPackingCertificate& cert);
json refutation_to_json(const PackingRefutation& ref);
json packing_decision_to_json(const PackingDecision& decision);

// Canonical serialization used for every JSON artifact: 2-space indent plus
// a trailing newline, insertion-ordered keys. Byte-stable across runs.
std::string to_canonical_string(const json& j);

void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

DiscreteDistribution read_distribution_file(const std::filesystem::path& path);
ItemList read_list_file(const std::filesystem::path& path);

// Minimal CSV emitter. Quotes fields only when needed, CRLF-free, and ends
// with a newline; used by the CLI for report and bounds tables.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> row);
    std::string str() const;

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace bincover::io

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>

#include <bincover/chain.hpp>
#include <bincover/distribution.hpp>
#include <bincover/errors.hpp>
#include <bincover/io.hpp>
#include <bincover/offline.hpp>

#include "test_helpers.hpp"

using namespace bincover;
using bctest::list_of;
using bctest::rat;
using bctest::uniform2;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("bincover_io_test_" + name);
}

struct FileGuard {
    std::filesystem::path path;
    ~FileGuard() { std::filesystem::remove(path); }
};

} // namespace

TEST_CASE("distribution files round trip byte for byte") {
    auto F = uniform2(rat(1, 3), rat(2, 3));
    auto j = io::distribution_to_json(F);
    CHECK(j["schema_version"] == io::kSchemaVersion);
    CHECK(io::distribution_from_json(j) == F);

    auto text = io::to_canonical_string(j);
    CHECK(text.back() == '\n');
    CHECK(io::to_canonical_string(io::distribution_to_json(io::distribution_from_json(j))) ==
          text);

    auto path = temp_file("dist.json");
    FileGuard guard{path};
    io::write_json_file(path, j);
    CHECK(io::read_distribution_file(path) == F);
}

TEST_CASE("distribution parsing rejects malformed files") {
    io::json bad_sum = {{"schema_version", 1},
                        {"sizes", {"1/3", "2/3"}},
                        {"probs", {"1/2", "1/3"}}};
    CHECK_THROWS_AS(io::distribution_from_json(bad_sum), ValidationError);

    io::json duplicate = {{"schema_version", 1},
                          {"sizes", {"1/2", "2/4"}},
                          {"probs", {"1/2", "1/2"}}};
    CHECK_THROWS_AS(io::distribution_from_json(duplicate), ValidationError);

    io::json bad_rational = {{"schema_version", 1},
                             {"sizes", {"1/3", "x"}},
                             {"probs", {"1/2", "1/2"}}};
    CHECK_THROWS_AS(io::distribution_from_json(bad_rational), ValidationError);

    io::json missing = {{"schema_version", 1}, {"sizes", {"1/3"}}};
    CHECK_THROWS_AS(io::distribution_from_json(missing), ValidationError);

    io::json length_mismatch = {{"schema_version", 1},
                                {"sizes", {"1/3", "2/3"}},
                                {"probs", {"1"}}};
    CHECK_THROWS_AS(io::distribution_from_json(length_mismatch), ValidationError);
}

TEST_CASE("malformed json text maps to a validation error") {
    auto path = temp_file("broken.json");
    FileGuard guard{path};
    io::write_text_file(path, "{\"sizes\": [\"1/3\",");
    CHECK_THROWS_AS(io::read_json_file(path), ValidationError);
    CHECK_THROWS_AS(io::read_json_file(temp_file("does_not_exist.json")), ValidationError);
}

TEST_CASE("item list files round trip") {
    auto L = list_of({rat(1, 3), rat(2, 3), rat(0), rat(1)});
    auto j = io::list_to_json(L);
    auto back = io::list_from_json(j);
    CHECK(back.items() == L.items());

    auto path = temp_file("list.json");
    FileGuard guard{path};
    io::write_json_file(path, j);
    CHECK(io::read_list_file(path).items() == L.items());

    io::json bad = {{"schema_version", 1}, {"items", {"1/3", "3/2"}}};
    CHECK_THROWS_AS(io::list_from_json(bad), ValidationError);
}

TEST_CASE("chain dumps carry states and exact transition weights") {
    auto chain = build_chain(uniform2(rat(1, 3), rat(2, 3)));
    auto j = io::chain_to_json(chain);
    REQUIRE(j["states"].size() == 3);
    CHECK(j["states"][0] == "0");
    CHECK(j["states"][1] == "1/3");
    CHECK(j["states"][2] == "2/3");

    // Open edges plus one closing edge per closing state, all "p/q" strings.
    Rational mass_back;
    for (const auto& t : j["transitions"]) {
        REQUIRE(t.size() == 3);
        auto p = Rational::parse(t[2].get<std::string>());
        CHECK(p > rat(0));
        CHECK(p <= rat(1));
        if (t[1].get<int>() == 0) mass_back += p;
    }
    CHECK(mass_back == rat(3, 2)); // closing mass 1/2 from 1/3 plus 1 from 2/3
}

TEST_CASE("packing decisions serialize both verdicts") {
    auto yes = is_perfect_packing(uniform2(rat(1, 3), rat(2, 3)));
    auto jy = io::packing_decision_to_json(yes);
    CHECK(jy["kind"] == "certificate");
    REQUIRE(std::holds_alternative<PerfectPackingCertificate>(yes));
    const auto& cert = std::get<PerfectPackingCertificate>(yes);
    REQUIRE(jy["configurations"].size() == cert.configurations.size());
    REQUIRE(jy["coefficients"].size() == cert.coefficients.size());
    // The serialized mixture re-verifies: sum of alpha_j * config_j = probs.
    Rational mix0, mix1;
    for (size_t j = 0; j < cert.configurations.size(); ++j) {
        auto alpha = Rational::parse(jy["coefficients"][j].get<std::string>());
        mix0 += alpha * rat(jy["configurations"][j][0].get<long>());
        mix1 += alpha * rat(jy["configurations"][j][1].get<long>());
    }
    CHECK(mix0 == rat(1, 2));
    CHECK(mix1 == rat(1, 2));

    auto no = is_perfect_packing(uniform2(rat(2, 5), rat(1, 2)));
    auto jn = io::packing_decision_to_json(no);
    CHECK(jn["kind"] == "refutation");
    CHECK(jn["separator"].size() == 2);
}

TEST_CASE("csv tables quote only when needed") {
    io::CsvTable t({"name", "value"});
    t.add_row({"plain", "1/2"});
    t.add_row({"with,comma", "a\"b"});
    t.add_row({"multi\nline", "x"});
    auto s = t.str();
    CHECK(s == "name,value\n"
               "plain,1/2\n"
               "\"with,comma\",\"a\"\"b\"\n"
               "\"multi\nline\",x\n");
    CHECK_THROWS_AS(t.add_row({"too", "many", "fields"}), std::logic_error);
}

TEST_CASE("text files are written verbatim") {
    auto path = temp_file("plain.txt");
    FileGuard guard{path};
    io::write_text_file(path, "alpha,beta\n1,2\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "alpha,beta\n1,2\n");
}

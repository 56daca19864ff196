#pragma once

// Shared test fixtures: a small codebook and the ingestion stress fixture
// (258 raw rows of which 4 are duplicate submissions and 27 fail the
// eligibility rules, leaving 227).

#include "latentkit/csv.hpp"
#include "latentkit/dataset.hpp"
#include "latentkit/rng.hpp"

#include <string>
#include <vector>

namespace fixtures {

inline latentkit::dataset::Codebook small_codebook() {
    using latentkit::dataset::Codebook;
    using latentkit::dataset::ItemSpec;
    Codebook cb;
    cb.scale_min = 1;
    cb.scale_max = 5;
    cb.items = {
        {"q1", "first", false, std::string("use"), true},
        {"q2", "second", true, std::string("use"), false},
        {"q3", "third", false, std::string("use"), false},
        {"q4", "fourth", false, std::string("eff"), true},
        {"q5", "fifth", true, std::string("eff"), false},
        {"q6", "sixth", false, std::string("eff"), false},
    };
    return cb;
}

inline latentkit::csv::Table ingest_fixture() {
    using latentkit::CounterRng;
    latentkit::csv::Table t;
    t.header = {"email", "eligible", "q1", "q2", "q3", "q4", "q5", "q6"};
    const CounterRng rng(99);
    std::uint64_t c = 0;
    auto value = [&] { return std::to_string(1 + static_cast<int>(rng.uniform(c++) * 5)); };

    int serial = 0;
    auto add_row = [&](bool duplicate_of_first, bool eligible) {
        latentkit::csv::Row row;
        row.push_back(duplicate_of_first ? "r0@example.edu"
                                         : "r" + std::to_string(serial) + "@example.edu");
        ++serial;
        row.push_back(eligible ? "yes" : "no");
        for (int q = 0; q < 6; ++q) row.push_back(value());
        t.rows.push_back(std::move(row));
    };

    add_row(false, true); // r0, the duplicate target
    for (int i = 0; i < 226; ++i) add_row(false, true);
    for (int i = 0; i < 27; ++i) add_row(false, false); // disqualified
    for (int i = 0; i < 4; ++i) add_row(true, true);    // duplicate submissions
    return t;
}

} // namespace fixtures

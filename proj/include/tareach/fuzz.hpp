#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tareach/automaton.hpp"

namespace tareach {

/// Deterministic splitmix64 stream; kept bit-identical across platforms so
/// seeded reports reproduce exactly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
    bool coin() { return next() & 1u; }

private:
    std::uint64_t state_;
};

struct FuzzConfig {
    std::uint64_t seed = 1;
    std::uint32_t automata = 100;
    std::uint32_t max_locations = 3;
    std::uint32_t max_clocks = 2;
    std::uint32_t max_edges = 4;
    std::uint32_t max_constant = 2;
    std::uint32_t queries_per_automaton = 10;
    std::uint32_t denominator_bound = 3;
    std::uint32_t value_bound = 4;
    std::uint32_t witness_walks = 2;

    void validate() const;
};

/// Deterministic function of config.seed. Every location is reachable from
/// location 0 in the location graph (the sample is redrawn otherwise).
TimedAutomaton random_automaton(const FuzzConfig& config);

/// Random rational valuation with denominators and magnitudes from config.
ClockValuation random_valuation(Rng& rng, const FuzzConfig& config, std::uint32_t clocks);

struct Mismatch {
    std::uint64_t seed = 0;
    std::string automaton_json;
    std::string from;
    std::string to;
    std::string source;
    std::string target;
    bool main_result = false;
    bool oracle_result = false;
    bool witness = false;  // the query came from a concrete run, so the
                           // expected answer is reachable
    std::string minimized_json;
};

struct DiffReport {
    std::uint64_t seed = 0;
    std::uint32_t automata = 0;
    std::uint32_t queries = 0;
    std::uint32_t witness_queries = 0;
    std::vector<Mismatch> mismatches;
};

/// Compares the compiled decision procedure against the classic-region
/// oracle on seeded random automata and queries, and additionally replays
/// random concrete walks whose endpoints must be accepted by both. Mismatches
/// are minimized by dropping edges, then shrinking guard constants.
DiffReport differential_test(const FuzzConfig& config);

/// One JSON object per mismatch, then a summary object.
std::string report_to_jsonl(const DiffReport& report);

}  // namespace tareach

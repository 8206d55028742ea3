#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tareach/automaton.hpp"
#include "tareach/rational.hpp"

namespace tareach {

/// One difference bound "xi - xj < c" or "<= c" with c in {-1,0,1}.
/// Encoded in a byte as raw = 2*c + (weak ? 1 : 0), so smaller raw means a
/// tighter bound and bounds add as raw_a + raw_b - ((raw_a | raw_b) & 1).
struct Bound {
    std::int8_t raw = 0;

    static constexpr Bound weak(int value) {
        return {static_cast<std::int8_t>(2 * value + 1)};
    }
    static constexpr Bound strict(int value) {
        return {static_cast<std::int8_t>(2 * value)};
    }

    [[nodiscard]] constexpr int value() const { return raw >> 1; }
    [[nodiscard]] constexpr bool is_strict() const { return (raw & 1) == 0; }

    friend constexpr bool operator==(Bound a, Bound b) { return a.raw == b.raw; }
    friend constexpr bool operator<(Bound a, Bound b) { return a.raw < b.raw; }

    friend constexpr Bound min(Bound a, Bound b) { return a < b ? a : b; }
    friend constexpr Bound operator+(Bound a, Bound b) {
        return {static_cast<std::int8_t>(a.raw + b.raw - ((a.raw | b.raw) & 1))};
    }

    /// True iff "p sat (p < value)" resp. "(p <= value)".
    [[nodiscard]] bool admits(const Rational& p) const {
        const Rational v(value());
        return is_strict() ? p < v : p <= v;
    }
};

/// Unnormalized conjunction of difference constraints over [0,1]^n, row and
/// column 0 being the constant-zero reference coordinate. Starts from the box
/// constraints 0 <= x <= 1 and is tightened via constrain().
class RawZone {
public:
    explicit RawZone(std::uint32_t num_clocks);

    [[nodiscard]] std::uint32_t num_clocks() const { return n_; }
    [[nodiscard]] std::uint32_t dim() const { return n_ + 1; }

    [[nodiscard]] Bound at(std::uint32_t i, std::uint32_t j) const {
        return Bound{m_[i * dim() + j]};
    }
    /// Tightens entry (i,j), indices including the reference coordinate 0.
    void constrain(std::uint32_t i, std::uint32_t j, Bound b);

private:
    friend class BoundedZone;
    std::uint32_t n_;
    std::vector<std::int8_t> m_;
};

/// Canonical (all-pairs-tightest) nonempty zone within [0,1]^n. Two zones
/// denote the same point set iff their matrices are identical, which makes
/// them usable as quotient-state components. Emptiness is out-of-band:
/// canonicalize() returns nullopt instead of ever storing an empty zone.
class BoundedZone {
public:
    /// The singleton {0}^n.
    static BoundedZone zero_point(std::uint32_t num_clocks);

    /// Shortest-path closure; nullopt iff the constraints are unsatisfiable.
    static std::optional<BoundedZone> canonicalize(const RawZone& raw);

    [[nodiscard]] std::uint32_t num_clocks() const { return n_; }
    [[nodiscard]] std::uint32_t dim() const { return n_ + 1; }
    [[nodiscard]] Bound at(std::uint32_t i, std::uint32_t j) const {
        return Bound{m_[i * dim() + j]};
    }
    [[nodiscard]] const std::vector<std::int8_t>& raw_bytes() const { return m_; }

    [[nodiscard]] RawZone to_raw() const;

    friend bool operator==(const BoundedZone& a, const BoundedZone& b) {
        return a.n_ == b.n_ && a.m_ == b.m_;
    }

    [[nodiscard]] std::size_t hash() const;

    /// Sorted tightest-constraint rendering, e.g.
    /// "x-y<=0 & y-x<=0 & x<=1 & y<=1 & -x<=0 & -y<=0".
    [[nodiscard]] std::string to_string(const std::vector<std::string>& clock_names) const;
    [[nodiscard]] std::string to_string() const;

private:
    BoundedZone() : n_(0) {}
    std::uint32_t n_;
    std::vector<std::int8_t> m_;
};

/// {nu + t : nu in Z, t >= 0} intersected with [0,1]^n; a nonempty superset
/// of the input.
BoundedZone time_successor(const BoundedZone& zone);

/// {nu[resets <- 0] : nu in Z}; always nonempty.
BoundedZone zone_reset(const BoundedZone& zone, ClockSet resets);

/// (Z /\ [x=1])[x <- 0]; nullopt iff Z has no point with x = 1.
std::optional<BoundedZone> wrap_face(const BoundedZone& zone, ClockId clock);

/// {nu in Z : int_parts + nu |= guard} where int_parts are capped integer
/// parts (cap means "true integer part exceeds every guard constant"). Each
/// atom either decides wholesale or contributes a fractional constraint.
std::optional<BoundedZone> guard_restrict(const BoundedZone& zone,
                                          std::span<const std::uint32_t> int_parts,
                                          std::uint32_t cap, const Guard& guard);

/// Exact membership of a rational point, reference coordinate excluded.
bool zone_member(const BoundedZone& zone, std::span<const Rational> point);

/// A rational point of the zone agreeing with every pinned coordinate, or
/// nullopt when the pins are not extendable. Pinned values may be arbitrary
/// rationals in [0,1].
std::optional<std::vector<Rational>> zone_find_point(
    const BoundedZone& zone, const std::vector<std::optional<Rational>>& pins);

}  // namespace tareach

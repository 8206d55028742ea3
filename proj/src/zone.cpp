#include "tareach/zone.hpp"

#include <sstream>

namespace tareach {

namespace {

constexpr std::int8_t kWeakZero = 1;  // raw code of "<= 0"

/// Floyd-Warshall tightening in int working space (raw codes can dip below
/// int8 range transiently while a negative cycle collapses).
/// Returns false iff the constraint system is empty.
bool close(std::vector<int>& m, std::uint32_t dim) {
    for (std::uint32_t k = 0; k < dim; ++k) {
        for (std::uint32_t i = 0; i < dim; ++i) {
            const int ik = m[i * dim + k];
            for (std::uint32_t j = 0; j < dim; ++j) {
                const int kj = m[k * dim + j];
                const int sum = ik + kj - ((ik | kj) & 1);
                int& ij = m[i * dim + j];
                if (sum < ij) {
                    ij = sum;
                }
            }
        }
    }
    for (std::uint32_t i = 0; i < dim; ++i) {
        if (m[i * dim + i] < kWeakZero) {
            return false;
        }
        m[i * dim + i] = kWeakZero;
    }
    return true;
}

struct RatBound {
    Rational value;
    bool strict = false;

    [[nodiscard]] bool tighter_than(const RatBound& o) const {
        return value < o.value || (value == o.value && strict && !o.strict);
    }
    friend RatBound operator+(const RatBound& a, const RatBound& b) {
        return {a.value + b.value, a.strict || b.strict};
    }
};

bool rat_close(std::vector<RatBound>& m, std::uint32_t dim) {
    for (std::uint32_t k = 0; k < dim; ++k) {
        for (std::uint32_t i = 0; i < dim; ++i) {
            for (std::uint32_t j = 0; j < dim; ++j) {
                const RatBound sum = m[i * dim + k] + m[k * dim + j];
                if (sum.tighter_than(m[i * dim + j])) {
                    m[i * dim + j] = sum;
                }
            }
        }
    }
    const RatBound zero{Rational(0), false};
    for (std::uint32_t i = 0; i < dim; ++i) {
        if (m[i * dim + i].tighter_than(zero)) {
            return false;
        }
    }
    return true;
}

void rat_pin(std::vector<RatBound>& m, std::uint32_t dim, std::uint32_t coord,
             const Rational& value) {
    RatBound upper{value, false};
    RatBound lower{-value, false};
    if (upper.tighter_than(m[coord * dim])) {
        m[coord * dim] = upper;
    }
    if (lower.tighter_than(m[coord])) {
        m[coord] = lower;
    }
}

}  // namespace

RawZone::RawZone(std::uint32_t num_clocks) : n_(num_clocks) {
    const std::uint32_t d = dim();
    m_.assign(static_cast<std::size_t>(d) * d, Bound::weak(1).raw);
    for (std::uint32_t i = 0; i < d; ++i) {
        m_[i * d + i] = kWeakZero;
        m_[i] = kWeakZero;  // row 0: -x_j <= 0
    }
}

void RawZone::constrain(std::uint32_t i, std::uint32_t j, Bound b) {
    std::int8_t& entry = m_[i * dim() + j];
    entry = min(Bound{entry}, b).raw;
}

BoundedZone BoundedZone::zero_point(std::uint32_t num_clocks) {
    BoundedZone zone;
    zone.n_ = num_clocks;
    const std::uint32_t d = zone.dim();
    zone.m_.assign(static_cast<std::size_t>(d) * d, kWeakZero);
    return zone;
}

std::optional<BoundedZone> BoundedZone::canonicalize(const RawZone& raw) {
    const std::uint32_t d = raw.dim();
    std::vector<int> work(raw.m_.begin(), raw.m_.end());
    if (!close(work, d)) {
        return std::nullopt;
    }
    BoundedZone zone;
    zone.n_ = raw.num_clocks();
    zone.m_.resize(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (work[i] < Bound::weak(-1).raw || work[i] > Bound::weak(1).raw) {
            throw SemanticError("zone bound escaped the 1-bounded range");
        }
        zone.m_[i] = static_cast<std::int8_t>(work[i]);
    }
    return zone;
}

RawZone BoundedZone::to_raw() const {
    RawZone raw(n_);
    for (std::uint32_t i = 0; i < dim(); ++i) {
        for (std::uint32_t j = 0; j < dim(); ++j) {
            raw.constrain(i, j, at(i, j));
        }
    }
    return raw;
}

std::size_t BoundedZone::hash() const {
    std::size_t h = 0xcbf29ce484222325ull ^ n_;
    for (std::int8_t b : m_) {
        h ^= static_cast<std::size_t>(static_cast<std::uint8_t>(b));
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string BoundedZone::to_string(const std::vector<std::string>& clock_names) const {
    auto name = [&](std::uint32_t i) { return clock_names[i - 1]; };
    auto op = [](Bound b) { return b.is_strict() ? "<" : "<="; };
    std::ostringstream out;
    bool first = true;
    auto emit = [&](const std::string& text) {
        if (!first) {
            out << " & ";
        }
        out << text;
        first = false;
    };
    for (std::uint32_t i = 1; i < dim(); ++i) {
        for (std::uint32_t j = 1; j < dim(); ++j) {
            if (i != j) {
                const Bound b = at(i, j);
                emit(name(i) + "-" + name(j) + op(b) + std::to_string(b.value()));
            }
        }
    }
    for (std::uint32_t i = 1; i < dim(); ++i) {
        const Bound b = at(i, 0);
        emit(name(i) + op(b) + std::to_string(b.value()));
    }
    for (std::uint32_t j = 1; j < dim(); ++j) {
        const Bound b = at(0, j);
        emit("-" + name(j) + op(b) + std::to_string(b.value()));
    }
    return out.str();
}

std::string BoundedZone::to_string() const {
    std::vector<std::string> names;
    names.reserve(n_);
    for (std::uint32_t i = 0; i < n_; ++i) {
        names.push_back("x" + std::to_string(i));
    }
    return to_string(names);
}

BoundedZone time_successor(const BoundedZone& zone) {
    RawZone raw(zone.num_clocks());
    for (std::uint32_t i = 0; i < zone.dim(); ++i) {
        for (std::uint32_t j = 0; j < zone.dim(); ++j) {
            if (j == 0 && i != 0) {
                continue;  // upper bounds relax to the box bound x <= 1
            }
            raw.constrain(i, j, zone.at(i, j));
        }
    }
    auto result = BoundedZone::canonicalize(raw);
    if (!result) {
        throw SemanticError("time successor of a nonempty zone became empty");
    }
    return *result;
}

BoundedZone zone_reset(const BoundedZone& zone, ClockSet resets) {
    if (!resets.subset_of(ClockSet::all(zone.num_clocks()))) {
        throw SemanticError("reset of a clock outside the zone");
    }
    RawZone raw(zone.num_clocks());
    auto is_reset = [&](std::uint32_t i) { return i != 0 && resets.contains(i - 1); };
    for (std::uint32_t i = 0; i < zone.dim(); ++i) {
        for (std::uint32_t j = 0; j < zone.dim(); ++j) {
            if (i == j) {
                continue;
            }
            if (is_reset(i) && is_reset(j)) {
                raw.constrain(i, j, Bound::weak(0));
            } else if (is_reset(i)) {
                raw.constrain(i, j, zone.at(0, j));
                raw.constrain(i, 0, Bound::weak(0));
                raw.constrain(0, i, Bound::weak(0));
            } else if (is_reset(j)) {
                raw.constrain(i, j, zone.at(i, 0));
            } else {
                raw.constrain(i, j, zone.at(i, j));
            }
        }
    }
    auto result = BoundedZone::canonicalize(raw);
    if (!result) {
        throw SemanticError("reset of a nonempty zone became empty");
    }
    return *result;
}

std::optional<BoundedZone> wrap_face(const BoundedZone& zone, ClockId clock) {
    RawZone raw = zone.to_raw();
    raw.constrain(0, clock + 1, Bound::weak(-1));  // -x <= -1, i.e. x >= 1
    auto face = BoundedZone::canonicalize(raw);
    if (!face) {
        return std::nullopt;
    }
    return zone_reset(*face, ClockSet::single(clock));
}

std::optional<BoundedZone> guard_restrict(const BoundedZone& zone,
                                          std::span<const std::uint32_t> int_parts,
                                          std::uint32_t cap, const Guard& guard) {
    if (int_parts.size() != zone.num_clocks()) {
        throw SemanticError("integer-part vector does not match the zone dimension");
    }
    for (std::uint32_t u : int_parts) {
        if (u > cap) {
            throw SemanticError("integer part exceeds the cap");
        }
    }
    RawZone raw = zone.to_raw();
    for (const GuardAtom& atom : guard.atoms) {
        const std::uint32_t u = int_parts[atom.clock];
        const std::uint32_t row = atom.clock + 1;
        if (u >= cap) {
            // True integer part exceeds every guard constant: x < k and x = k
            // are false, x > k holds.
            if (atom.op != GuardOp::Gt) {
                return std::nullopt;
            }
            continue;
        }
        const std::int64_t diff =
            static_cast<std::int64_t>(atom.bound) - static_cast<std::int64_t>(u);
        switch (atom.op) {
            case GuardOp::Eq:
                if (diff == 0) {
                    raw.constrain(row, 0, Bound::weak(0));
                    raw.constrain(0, row, Bound::weak(0));
                } else if (diff == 1) {
                    raw.constrain(0, row, Bound::weak(-1));
                } else {
                    return std::nullopt;
                }
                break;
            case GuardOp::Lt:
                if (diff <= 0) {
                    return std::nullopt;
                }
                if (diff == 1) {
                    raw.constrain(row, 0, Bound::strict(1));
                }
                break;
            case GuardOp::Gt:
                if (diff >= 1) {
                    return std::nullopt;
                }
                if (diff == 0) {
                    raw.constrain(0, row, Bound::strict(0));
                }
                break;
        }
    }
    return BoundedZone::canonicalize(raw);
}

bool zone_member(const BoundedZone& zone, std::span<const Rational> point) {
    if (point.size() != zone.num_clocks()) {
        throw SemanticError("point dimension does not match the zone");
    }
    auto coord = [&](std::uint32_t i) { return i == 0 ? Rational(0) : point[i - 1]; };
    for (std::uint32_t i = 0; i < zone.dim(); ++i) {
        for (std::uint32_t j = 0; j < zone.dim(); ++j) {
            if (i != j && !zone.at(i, j).admits(coord(i) - coord(j))) {
                return false;
            }
        }
    }
    return true;
}

std::optional<std::vector<Rational>> zone_find_point(
    const BoundedZone& zone, const std::vector<std::optional<Rational>>& pins) {
    if (pins.size() != zone.num_clocks()) {
        throw SemanticError("pin vector does not match the zone dimension");
    }
    const std::uint32_t dim = zone.dim();
    std::vector<RatBound> m(static_cast<std::size_t>(dim) * dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
        for (std::uint32_t j = 0; j < dim; ++j) {
            const Bound b = zone.at(i, j);
            m[i * dim + j] = RatBound{Rational(b.value()), b.is_strict()};
        }
    }
    for (std::uint32_t x = 0; x < zone.num_clocks(); ++x) {
        if (pins[x]) {
            rat_pin(m, dim, x + 1, *pins[x]);
        }
    }
    if (!rat_close(m, dim)) {
        return std::nullopt;
    }
    std::vector<Rational> point(zone.num_clocks());
    for (std::uint32_t x = 0; x < zone.num_clocks(); ++x) {
        if (pins[x]) {
            point[x] = *pins[x];
            continue;
        }
        const RatBound upper = m[(x + 1) * dim];
        const RatBound lower = m[x + 1];
        Rational value;
        if (!lower.strict) {
            value = -lower.value;
        } else if (!upper.strict) {
            value = upper.value;
        } else {
            value = (-lower.value + upper.value) / Rational(2);
        }
        point[x] = value;
        rat_pin(m, dim, x + 1, value);
        if (!rat_close(m, dim)) {
            throw SemanticError("zone point search lost feasibility");
        }
    }
    return point;
}

}  // namespace tareach

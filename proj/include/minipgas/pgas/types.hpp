#ifndef MINIPGAS_PGAS_TYPES_HPP
#define MINIPGAS_PGAS_TYPES_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <type_traits>

#include "minipgas/error.hpp"

namespace minipgas::pgas {

struct RankId {
    int value = 0;

    constexpr auto operator<=>(const RankId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, RankId r) { return os << r.value; }

enum class ElemKind : std::uint8_t { float64, int32 };

template <typename T>
concept SegmentElement = std::is_same_v<T, double> || std::is_same_v<T, std::int32_t>;

template <SegmentElement T>
constexpr ElemKind kind_of() {
    if constexpr (std::is_same_v<T, double>)
        return ElemKind::float64;
    else
        return ElemKind::int32;
}

constexpr std::size_t elem_size(ElemKind k) { return k == ElemKind::float64 ? 8 : 4; }

using SegmentId = std::uint64_t;

/// Rank-qualified reference to `span` elements starting at `offset` of a shared segment.
///
/// A plain value: safe to copy between ranks and to ship through collectives.
/// The element type is checked against the segment kind whenever the
/// reference is used, so a reference forged with the wrong `T` fails with
/// TypeError rather than reinterpreting memory.
template <SegmentElement T>
struct GlobalRef {
    using value_type = T;

    RankId owner{};
    SegmentId segment = 0;
    std::size_t offset = 0;
    std::size_t span = 0;

    constexpr bool empty() const { return span == 0; }
    constexpr std::size_t size_bytes() const { return span * sizeof(T); }

    /// Sub-range relative to this reference.
    GlobalRef slice(std::size_t rel_offset, std::size_t count) const {
        if (rel_offset + count > span)
            throw ArgumentError("GlobalRef::slice out of range");
        return GlobalRef{owner, segment, offset + rel_offset, count};
    }

    bool overlaps(const GlobalRef& o) const {
        return owner == o.owner && segment == o.segment && offset < o.offset + o.span &&
               o.offset < offset + span;
    }

    constexpr bool operator==(const GlobalRef&) const = default;
};

static_assert(std::is_trivially_copyable_v<GlobalRef<double>>);

} // namespace minipgas::pgas

#endif // MINIPGAS_PGAS_TYPES_HPP

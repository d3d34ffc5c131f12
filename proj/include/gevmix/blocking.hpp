#pragma once

// Seasonal blocking of daily series: meteorological seasons DJF, MAM, JJA,
// SON, with December joining the following winter (a DJF block is anchored
// to December's year). Partial edge blocks are kept and flagged.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevmix/data.hpp"

namespace gevmix {

struct Date {
    int year = 0;
    int month = 0;  // 1..12
    int day = 0;    // 1..31
};

enum class Season { DJF, MAM, JJA, SON };

inline const char* to_string(Season s) {
    switch (s) {
        case Season::DJF: return "DJF";
        case Season::MAM: return "MAM";
        case Season::JJA: return "JJA";
        default: return "SON";
    }
}

inline Season season_of_month(int month) {
    if (month == 12 || month == 1 || month == 2) return Season::DJF;
    if (month <= 5) return Season::MAM;
    if (month <= 8) return Season::JJA;
    return Season::SON;
}

/// The year a date's season block is anchored to: December starts the
/// winter of its own year, January and February belong to the previous
/// December's winter.
inline int anchor_year(const Date& d) {
    if (d.month == 1 || d.month == 2) return d.year - 1;
    return d.year;
}

struct DailyRecord {
    Date date;
    std::optional<double> value;  // empty when recorded as missing
};

/// Threshold below which a block's non-missing-day count marks it partial.
inline constexpr std::size_t kDefaultMinDays = 80;

struct SeasonBlock {
    Season season = Season::DJF;
    int year_key = 0;  // anchor year
    double maximum = 0.0;
    std::size_t count = 0;  // contributing non-missing days
    bool flagged = false;   // under-filled (count < min_days)
};

/// Groups daily records into season blocks and records each block's
/// maximum over non-missing values. Blocks with no usable values are
/// dropped; under-filled ones are flagged, and dropped only when
/// drop_underfilled is set.
inline std::vector<SeasonBlock> seasonal_block_maxima(
    std::span<const DailyRecord> records, std::size_t min_days = kDefaultMinDays,
    bool drop_underfilled = false) {
    if (records.empty()) {
        throw std::invalid_argument("seasonal_block_maxima: no records");
    }
    // key: anchor year and within-year chronological season order
    // (MAM starts in March, ..., DJF starts in December)
    const auto order_of = [](Season s) {
        switch (s) {
            case Season::MAM: return 0;
            case Season::JJA: return 1;
            case Season::SON: return 2;
            default: return 3;
        }
    };
    std::map<std::pair<int, int>, SeasonBlock> blocks;
    for (const auto& rec : records) {
        if (!rec.value) continue;
        const Season season = season_of_month(rec.date.month);
        const int year = anchor_year(rec.date);
        auto& block = blocks[{year, order_of(season)}];
        if (block.count == 0) {
            block.season = season;
            block.year_key = year;
            block.maximum = *rec.value;
        } else {
            block.maximum = std::max(block.maximum, *rec.value);
        }
        ++block.count;
    }
    std::vector<SeasonBlock> out;
    out.reserve(blocks.size());
    for (auto& [key, block] : blocks) {
        block.flagged = block.count < min_days;
        if (drop_underfilled && block.flagged) continue;
        out.push_back(block);
    }
    return out;
}

/// Block maxima with season labels, ready for fitting.
inline BlockMaximaSeries to_series(std::span<const SeasonBlock> blocks) {
    BlockMaximaSeries out;
    out.values.reserve(blocks.size());
    out.group_labels.reserve(blocks.size());
    for (const auto& b : blocks) {
        out.values.push_back(b.maximum);
        out.group_labels.push_back(to_string(b.season));
    }
    return out;
}

}  // namespace gevmix

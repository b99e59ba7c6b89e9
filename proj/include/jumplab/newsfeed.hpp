#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jumplab/timebase.hpp"

namespace jumplab {

struct RawNewsRecord {
    Date date;
    int minute = 0;            // minute precision
    std::string source;
    std::string story_id;
    std::vector<std::string> tickers;
    std::string headline;
};

struct NewsEvent {
    int32_t stock = 0;         // index into the universe ticker list
    BinStamp at;
    std::string source;
    std::string story_id;
};

inline PanelEvent to_panel_event(const NewsEvent& e) { return {e.stock, e.at}; }
std::vector<PanelEvent> to_panel_events(const std::vector<NewsEvent>& events);

/// Per-ticker company-name aliases; matching is case-insensitive substring.
/// An empty table disables name matching (feed ticker tags are trusted).
using AliasTable = std::map<std::string, std::vector<std::string>>;

struct FilterReport {
    size_t n_records = 0;
    size_t n_avalanche_removed = 0;   // later records of a story_id chain
    size_t n_blocklisted = 0;
    size_t n_out_of_session = 0;
    size_t n_unknown_ticker = 0;
    size_t n_no_name_match = 0;
    size_t n_events = 0;
};

/// The relevance pipeline: keep the earliest record per story_id, drop
/// blocklisted headlines, drop out-of-session stamps, and attribute each
/// surviving record to the tagged tickers whose configured company name
/// appears in the headline.
std::vector<NewsEvent> filter_news(std::vector<RawNewsRecord> records,
                                   const std::vector<std::string>& universe,
                                   const TradingCalendar& cal,
                                   const std::vector<std::string>& blocklist,
                                   const AliasTable& aliases,
                                   FilterReport* report = nullptr);

struct DelayHistogram {
    int window = 15;                 // minutes, histogram covers [-window, +window]
    std::vector<int64_t> counts;     // size 2*window+1, index delay+window
    int64_t n_matched = 0;           // all matched pairs
    int64_t n_isolated = 0;          // pairs where both sides pass the silence rule
    double mean_delay() const;       // over isolated pairs
};

struct MergeResult {
    std::vector<NewsEvent> merged;
    DelayHistogram delays;
};

/// Merge a secondary feed into a primary one. Same-ticker events within
/// match_window minutes (same session) pair one-to-one, nearest |delay| first;
/// each pair yields one merged event at the earlier stamp and unmatched
/// secondary events are appended. Only pairs whose two sides are each preceded
/// by >= silence minutes without same-feed same-ticker news enter the delay
/// histogram (delay = t_secondary - t_primary).
MergeResult merge_feeds(const std::vector<NewsEvent>& primary,
                        const std::vector<NewsEvent>& secondary,
                        int match_window = 15, int silence = 30);

// I/O: CSV `timestamp,source,story_id,tickers,headline`, tickers pipe-separated,
// timestamp ISO-8601 to the minute.
std::vector<RawNewsRecord> read_news_csv(const std::string& path);
void write_news_csv(const std::string& path, const std::vector<RawNewsRecord>& records);

// Attributed event stream artifact: CSV `date,time,ticker,source,story_id`.
void write_event_csv(const std::string& path, const std::vector<NewsEvent>& events,
                     const TradingCalendar& cal, const std::vector<std::string>& tickers);
std::vector<NewsEvent> read_event_csv(const std::string& path, const TradingCalendar& cal,
                                      const std::vector<std::string>& tickers);

/// Alias config: lines `TICKER=alias1|alias2`; '#' comments.
AliasTable read_alias_file(const std::string& path);
/// Blocklist config: one case-insensitive substring pattern per line; '#' comments.
std::vector<std::string> read_blocklist_file(const std::string& path);

void write_delay_csv(const std::string& path, const DelayHistogram& h);

} // namespace jumplab

#include "jumplab/newsfeed.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "jumplab/csv.hpp"
#include "jumplab/errors.hpp"

namespace jumplab {

std::vector<PanelEvent> to_panel_events(const std::vector<NewsEvent>& events) {
    std::vector<PanelEvent> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back(to_panel_event(e));
    return out;
}

static std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

static bool contains_ci(const std::string& haystack_lower, const std::string& needle_lower) {
    return haystack_lower.find(needle_lower) != std::string::npos;
}

std::vector<NewsEvent> filter_news(std::vector<RawNewsRecord> records,
                                   const std::vector<std::string>& universe,
                                   const TradingCalendar& cal,
                                   const std::vector<std::string>& blocklist,
                                   const AliasTable& aliases, FilterReport* report) {
    FilterReport rep;
    rep.n_records = records.size();

    // sort defensively by timestamp; stable so file order breaks ties
    std::stable_sort(records.begin(), records.end(),
                     [](const RawNewsRecord& a, const RawNewsRecord& b) {
                         if (a.date != b.date) return a.date < b.date;
                         return a.minute < b.minute;
                     });

    std::unordered_set<std::string> universe_set(universe.begin(), universe.end());
    std::vector<std::string> block_lower;
    block_lower.reserve(blocklist.size());
    for (const auto& p : blocklist) block_lower.push_back(lower(p));

    // lowercase alias lists once
    std::unordered_map<std::string, std::vector<std::string>> alias_lower;
    for (const auto& [ticker, names] : aliases) {
        auto& v = alias_lower[ticker];
        for (const auto& n : names) v.push_back(lower(n));
    }

    std::unordered_set<std::string> seen_story;
    std::vector<NewsEvent> out;
    for (const auto& rec : records) {
        if (rec.story_id.empty()) throw input_error("news record with empty story_id");
        if (!seen_story.insert(rec.story_id).second) {
            ++rep.n_avalanche_removed;  // only the first news from an avalanche
            continue;
        }
        std::string head = lower(rec.headline);
        bool blocked = false;
        for (const auto& p : block_lower)
            if (!p.empty() && contains_ci(head, p)) { blocked = true; break; }
        if (blocked) { ++rep.n_blocklisted; continue; }

        auto day = cal.day_index(rec.date);
        auto bin = day ? cal.bin_of_minute(rec.minute) : std::nullopt;
        if (!day || !bin) { ++rep.n_out_of_session; continue; }

        for (const auto& ticker : rec.tickers) {
            if (!universe_set.count(ticker)) { ++rep.n_unknown_ticker; continue; }
            if (!alias_lower.empty()) {
                auto it = alias_lower.find(ticker);
                bool named = false;
                if (it != alias_lower.end())
                    for (const auto& n : it->second)
                        if (!n.empty() && contains_ci(head, n)) { named = true; break; }
                if (!named) { ++rep.n_no_name_match; continue; }
            }
            size_t stock = size_t(
                std::find(universe.begin(), universe.end(), ticker) - universe.begin());
            out.push_back({int32_t(stock), {*day, *bin}, rec.source, rec.story_id});
        }
    }
    rep.n_events = out.size();
    if (report) *report = rep;
    return out;
}

double DelayHistogram::mean_delay() const {
    double sum = 0;
    int64_t n = 0;
    for (int d = -window; d <= window; ++d) {
        int64_t c = counts[size_t(d + window)];
        sum += double(d) * double(c);
        n += c;
    }
    return n ? sum / double(n) : 0.0;
}

namespace {

// silence flag per event: >= `silence` minutes since the previous same-ticker
// event in the same feed (previous day counts as silent)
std::vector<uint8_t> silence_flags(const std::vector<const NewsEvent*>& evs, int silence) {
    std::vector<uint8_t> ok(evs.size(), 1);
    for (size_t i = 1; i < evs.size(); ++i) {
        const auto& prev = evs[i - 1]->at;
        const auto& cur = evs[i]->at;
        if (prev.day == cur.day && cur.bin - prev.bin < silence) ok[i] = 0;
    }
    return ok;
}

} // namespace

MergeResult merge_feeds(const std::vector<NewsEvent>& primary,
                        const std::vector<NewsEvent>& secondary, int match_window,
                        int silence) {
    if (match_window < 0 || silence < 0)
        throw input_error("merge_feeds: negative window");
    MergeResult res;
    res.delays.window = match_window;
    res.delays.counts.assign(size_t(2 * match_window + 1), 0);

    // group per ticker, preserving time order within each feed
    std::unordered_map<int32_t, std::vector<const NewsEvent*>> pri, sec;
    for (const auto& e : primary) pri[e.stock].push_back(&e);
    for (const auto& e : secondary) sec[e.stock].push_back(&e);
    for (auto& [k, v] : pri)
        std::stable_sort(v.begin(), v.end(),
                         [](auto* a, auto* b) { return a->at < b->at; });
    for (auto& [k, v] : sec)
        std::stable_sort(v.begin(), v.end(),
                         [](auto* a, auto* b) { return a->at < b->at; });

    std::vector<const NewsEvent*> extra;  // unmatched secondary

    // iterate tickers in deterministic order
    std::vector<int32_t> tickers;
    for (const auto& [t, v] : sec) tickers.push_back(t);
    std::sort(tickers.begin(), tickers.end());

    std::vector<NewsEvent> merged = primary;

    for (int32_t ticker : tickers) {
        const auto& ss = sec[ticker];
        auto pit = pri.find(ticker);
        if (pit == pri.end()) {
            for (auto* e : ss) extra.push_back(e);
            continue;
        }
        const auto& ps = pit->second;
        auto psil = silence_flags(ps, silence);
        auto ssil = silence_flags(ss, silence);

        // candidate pairs within the window and the same session,
        // greedily matched nearest |delay| first
        struct Cand { int adelay, delay; size_t pi, si; };
        std::vector<Cand> cands;
        for (size_t si = 0; si < ss.size(); ++si)
            for (size_t pi = 0; pi < ps.size(); ++pi) {
                if (ps[pi]->at.day != ss[si]->at.day) continue;
                int delay = ss[si]->at.bin - ps[pi]->at.bin;
                if (std::abs(delay) > match_window) continue;
                cands.push_back({std::abs(delay), delay, pi, si});
            }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.adelay != b.adelay) return a.adelay < b.adelay;
            if (a.pi != b.pi) return a.pi < b.pi;
            return a.si < b.si;
        });
        std::vector<uint8_t> pused(ps.size(), 0), sused(ss.size(), 0);
        for (const auto& c : cands) {
            if (pused[c.pi] || sused[c.si]) continue;
            pused[c.pi] = sused[c.si] = 1;
            ++res.delays.n_matched;
            if (psil[c.pi] && ssil[c.si]) {
                ++res.delays.n_isolated;
                ++res.delays.counts[size_t(c.delay + match_window)];
            }
            if (c.delay < 0) {
                // the secondary ran the story first: merged event keeps the
                // earlier stamp; locate the primary event in the output
                size_t base = size_t(ps[c.pi] - primary.data());
                merged[base].at = ss[c.si]->at;
            }
        }
        for (size_t si = 0; si < ss.size(); ++si)
            if (!sused[si]) extra.push_back(ss[si]);
    }

    for (auto* e : extra) merged.push_back(*e);
    std::stable_sort(merged.begin(), merged.end(), [](const NewsEvent& a, const NewsEvent& b) {
        if (a.at != b.at) return a.at < b.at;
        return a.stock < b.stock;
    });
    res.merged = std::move(merged);
    return res;
}

// ------------------------------------------------------------------- I/O ----

static bool parse_minute_stamp(std::string_view s, Date& d, int& minute) {
    // "YYYY-MM-DDTHH:MM"
    if (s.size() != 16 || s[10] != 'T') return false;
    return parse_date(s.substr(0, 10), d) && parse_hhmm(s.substr(11, 5), minute);
}

std::vector<RawNewsRecord> read_news_csv(const std::string& path) {
    std::string text = csv::read_file(path);
    std::vector<RawNewsRecord> out;
    csv::for_each_line(text, [&](size_t lineno, std::string_view line) {
        if (lineno == 1) {
            if (line != "timestamp,source,story_id,tickers,headline")
                throw input_error(path +
                                  ": expected header timestamp,source,story_id,tickers,headline");
            return;
        }
        if (line.empty()) return;
        auto f = csv::split_line(line);
        if (f.size() != 5)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected 5 fields");
        RawNewsRecord r;
        if (!parse_minute_stamp(f[0], r.date, r.minute))
            throw input_error(path + ":" + std::to_string(lineno) + ": bad timestamp");
        r.source = f[1];
        r.story_id = f[2];
        if (r.story_id.empty())
            throw input_error(path + ":" + std::to_string(lineno) + ": empty story_id");
        std::string_view ts = f[3];
        while (!ts.empty()) {
            size_t bar = ts.find('|');
            std::string_view tk = bar == std::string_view::npos ? ts : ts.substr(0, bar);
            if (!tk.empty()) r.tickers.emplace_back(tk);
            if (bar == std::string_view::npos) break;
            ts.remove_prefix(bar + 1);
        }
        r.headline = f[4];
        out.push_back(std::move(r));
    });
    return out;
}

void write_news_csv(const std::string& path, const std::vector<RawNewsRecord>& records) {
    std::string out = "timestamp,source,story_id,tickers,headline\n";
    for (const auto& r : records) {
        out += format_date(r.date);
        out += 'T';
        out += format_hhmm(r.minute);
        out += ',';
        out += csv::quote(r.source);
        out += ',';
        out += csv::quote(r.story_id);
        out += ',';
        std::string joined;
        for (size_t i = 0; i < r.tickers.size(); ++i) {
            if (i) joined += '|';
            joined += r.tickers[i];
        }
        out += csv::quote(joined);
        out += ',';
        out += csv::quote(r.headline);
        out += '\n';
    }
    csv::write_file(path, out);
}

void write_event_csv(const std::string& path, const std::vector<NewsEvent>& events,
                     const TradingCalendar& cal, const std::vector<std::string>& tickers) {
    std::string out = "date,time,ticker,source,story_id\n";
    for (const auto& e : events) {
        out += format_date(cal.date_of(e.at.day));
        out += ',';
        out += format_hhmm(cal.minute_of_bin(e.at.bin));
        out += ',';
        out += csv::quote(tickers[size_t(e.stock)]);
        out += ',';
        out += csv::quote(e.source);
        out += ',';
        out += csv::quote(e.story_id);
        out += '\n';
    }
    csv::write_file(path, out);
}

std::vector<NewsEvent> read_event_csv(const std::string& path, const TradingCalendar& cal,
                                      const std::vector<std::string>& tickers) {
    std::unordered_map<std::string, int32_t> index;
    for (size_t i = 0; i < tickers.size(); ++i) index[tickers[i]] = int32_t(i);
    std::string text = csv::read_file(path);
    std::vector<NewsEvent> out;
    csv::for_each_line(text, [&](size_t lineno, std::string_view line) {
        if (lineno == 1) {
            if (line != "date,time,ticker,source,story_id")
                throw input_error(path + ": expected header date,time,ticker,source,story_id");
            return;
        }
        if (line.empty()) return;
        auto f = csv::split_line(line);
        Date d;
        int minute;
        if (f.size() != 5 || !parse_date(f[0], d) || !parse_hhmm(f[1], minute))
            throw input_error(path + ":" + std::to_string(lineno) + ": malformed event row");
        auto it = index.find(f[2]);
        auto day = cal.day_index(d);
        auto bin = cal.bin_of_minute(minute);
        if (it == index.end() || !day || !bin)
            throw input_error(path + ":" + std::to_string(lineno) + ": event outside universe/calendar");
        out.push_back({it->second, {*day, *bin}, f[3], f[4]});
    });
    return out;
}

AliasTable read_alias_file(const std::string& path) {
    std::string text = csv::read_file(path);
    AliasTable table;
    csv::for_each_line(text, [&](size_t lineno, std::string_view line) {
        if (line.empty() || line[0] == '#') return;
        size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw input_error(path + ":" + std::to_string(lineno) + ": expected TICKER=alias|alias");
        std::string ticker(line.substr(0, eq));
        std::string_view rest = line.substr(eq + 1);
        auto& names = table[ticker];
        while (!rest.empty()) {
            size_t bar = rest.find('|');
            std::string_view n = bar == std::string_view::npos ? rest : rest.substr(0, bar);
            if (!n.empty()) names.emplace_back(n);
            if (bar == std::string_view::npos) break;
            rest.remove_prefix(bar + 1);
        }
    });
    return table;
}

std::vector<std::string> read_blocklist_file(const std::string& path) {
    std::string text = csv::read_file(path);
    std::vector<std::string> out;
    csv::for_each_line(text, [&](size_t, std::string_view line) {
        if (line.empty() || line[0] == '#') return;
        out.emplace_back(line);
    });
    return out;
}

void write_delay_csv(const std::string& path, const DelayHistogram& h) {
    std::string out = "delay,count\n";
    char buf[48];
    for (int d = -h.window; d <= h.window; ++d) {
        std::snprintf(buf, sizeof buf, "%d,%lld\n", d,
                      static_cast<long long>(h.counts[size_t(d + h.window)]));
        out += buf;
    }
    csv::write_file(path, out);
}

} // namespace jumplab

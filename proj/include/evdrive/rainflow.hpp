#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "evdrive/errors.hpp"

namespace evdrive {

struct TurningPoint {
    double t;      // s
    double value;  // degC
};

/// One extracted fatigue cycle. Residual (unpaired) ranges count 0.5.
struct RainflowCycle {
    double range;    // K
    double mean;     // degC
    double count;    // 0.5 or 1.0
    double t_start;  // s
    double t_end;    // s

    double duration() const { return t_end - t_start; }
};

/// Local extrema of a sampled series. Reversals smaller than the hysteresis
/// band are merged away; the first and last samples are always kept.
inline std::vector<TurningPoint> extract_turning_points(const std::vector<double>& t,
                                                        const std::vector<double>& value,
                                                        double hysteresis = 0.0) {
    if (t.size() != value.size())
        throw ValidationError("extract_turning_points: time and value lengths differ");
    if (t.size() < 2) throw ValidationError("extract_turning_points: need at least 2 samples");
    for (size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw ValidationError("extract_turning_points: time must be strictly increasing");
    if (hysteresis < 0.0) throw ValidationError("extract_turning_points: hysteresis < 0");

    // local extrema; plateaus keep their first sample
    auto pick_extrema = [](const std::vector<TurningPoint>& in) {
        std::vector<TurningPoint> out;
        out.push_back(in.front());
        int dir = 0;  // sign of the last nonzero slope
        for (size_t i = 1; i + 1 < in.size(); ++i) {
            const double d = in[i + 1].value - in[i].value;
            if (d == 0.0) continue;
            const int s = d > 0.0 ? 1 : -1;
            if (dir != 0 && s != dir) out.push_back(in[i]);
            dir = s;
        }
        out.push_back(in.back());
        return out;
    };

    std::vector<TurningPoint> seq(t.size());
    for (size_t i = 0; i < t.size(); ++i) seq[i] = {t[i], value[i]};
    std::vector<TurningPoint> tps = pick_extrema(seq);

    if (hysteresis > 0.0) {
        // repeatedly drop the smallest sub-band reversal, then re-extract
        while (tps.size() > 2) {
            size_t worst = 0;
            double smallest = hysteresis;
            bool found = false;
            for (size_t i = 0; i + 1 < tps.size(); ++i) {
                const double r = std::abs(tps[i + 1].value - tps[i].value);
                if (r < smallest) {
                    smallest = r;
                    worst = i;
                    found = true;
                }
            }
            if (!found) break;
            if (worst == 0) tps.erase(tps.begin() + 1);
            else if (worst + 2 == tps.size()) tps.erase(tps.end() - 2);
            else tps.erase(tps.begin() + worst, tps.begin() + worst + 2);
            tps = pick_extrema(tps);
        }
    }
    return tps;
}

/// Three-point rainflow counting with the residue counted as half cycles.
/// Caller supplies alternating turning points; zero-range pairs are skipped.
inline std::vector<RainflowCycle> rainflow_count(const std::vector<TurningPoint>& tps) {
    std::vector<RainflowCycle> cycles;
    auto emit = [&cycles](const TurningPoint& a, const TurningPoint& b, double count) {
        const double range = std::abs(b.value - a.value);
        if (range <= 0.0) return;
        cycles.push_back({range, 0.5 * (a.value + b.value), count, a.t, b.t});
    };

    std::vector<TurningPoint> stack;
    stack.reserve(tps.size());
    for (const auto& tp : tps) {
        stack.push_back(tp);
        while (stack.size() >= 3) {
            const size_t m = stack.size();
            const double X = std::abs(stack[m - 1].value - stack[m - 2].value);
            const double Y = std::abs(stack[m - 2].value - stack[m - 3].value);
            if (X < Y) break;
            if (m == 3) {
                // range contains the start point: count half, advance the start
                emit(stack[0], stack[1], 0.5);
                stack.erase(stack.begin());
            } else {
                emit(stack[m - 3], stack[m - 2], 1.0);
                stack.erase(stack.end() - 3, stack.end() - 1);
            }
        }
    }
    for (size_t i = 0; i + 1 < stack.size(); ++i) emit(stack[i], stack[i + 1], 0.5);
    return cycles;
}

/// 2-D histogram over (delta T, t_on) with per-bin mean junction temperature.
struct CycleHistogram {
    std::vector<double> edges_dT;   // K, ascending
    std::vector<double> edges_ton;  // s, ascending
    std::vector<double> counts;     // row-major [i_dT * nbins_ton + i_ton]
    std::vector<double> mean_Tj;    // count-weighted mean of cycle means per bin

    int nbins_dT() const { return static_cast<int>(edges_dT.size()) - 1; }
    int nbins_ton() const { return static_cast<int>(edges_ton.size()) - 1; }
    double total_count() const {
        double s = 0.0;
        for (double c : counts) s += c;
        return s;
    }
};

namespace detail {
inline int edge_bin(const std::vector<double>& edges, double x) {
    // half-open [lo, hi); outside values are clamped into the edge bins
    const int nb = static_cast<int>(edges.size()) - 1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    int idx = static_cast<int>(it - edges.begin()) - 1;
    return std::clamp(idx, 0, nb - 1);
}
}  // namespace detail

inline CycleHistogram bin_cycles(const std::vector<RainflowCycle>& cycles,
                                 const std::vector<double>& edges_dT,
                                 const std::vector<double>& edges_ton) {
    auto check_edges = [](const std::vector<double>& e, const char* what) {
        if (e.size() < 2) throw ValidationError(std::string(what) + ": need at least 2 edges");
        for (size_t i = 1; i < e.size(); ++i)
            if (!(e[i] > e[i - 1]))
                throw ValidationError(std::string(what) + ": edges must be strictly increasing");
    };
    check_edges(edges_dT, "delta-T edges");
    check_edges(edges_ton, "t_on edges");

    CycleHistogram h;
    h.edges_dT = edges_dT;
    h.edges_ton = edges_ton;
    const int nd = h.nbins_dT(), nt = h.nbins_ton();
    h.counts.assign(static_cast<size_t>(nd) * nt, 0.0);
    h.mean_Tj.assign(static_cast<size_t>(nd) * nt, 0.0);

    for (const auto& c : cycles) {
        const int i = detail::edge_bin(edges_dT, c.range);
        const int j = detail::edge_bin(edges_ton, c.duration());
        const size_t k = static_cast<size_t>(i) * nt + j;
        h.counts[k] += c.count;
        h.mean_Tj[k] += c.count * c.mean;
    }
    for (size_t k = 0; k < h.counts.size(); ++k)
        if (h.counts[k] > 0.0) h.mean_Tj[k] /= h.counts[k];
    return h;
}

inline void write_histogram_csv(std::ostream& os, const CycleHistogram& h) {
    os << "# schema: evdrive.histogram/1\n";
    os << "dT_lo,dT_hi,ton_lo,ton_hi,mean_Tj,count\n";
    char buf[256];
    for (int i = 0; i < h.nbins_dT(); ++i)
        for (int j = 0; j < h.nbins_ton(); ++j) {
            const size_t k = static_cast<size_t>(i) * h.nbins_ton() + j;
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                          h.edges_dT[i], h.edges_dT[i + 1], h.edges_ton[j], h.edges_ton[j + 1],
                          h.mean_Tj[k], h.counts[k]);
            os << buf;
        }
}

}  // namespace evdrive

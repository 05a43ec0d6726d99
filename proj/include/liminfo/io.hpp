#pragma once

// File formats: histogram CSV ("bin_lo,bin_hi,count"), its JSON metadata
// sidecar and the JSON fit report.

#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "liminfo/dimwitness.hpp"

namespace liminfo {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kHistogramHeader = "bin_lo,bin_hi,count";

/// Shortest round-trip decimal form, identical on every IEEE-754 platform.
inline std::string format_double(double v) {
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline void write_histogram_csv(std::ostream& os, const MeanHistogram& h) {
    if (h.axes() != 1) throw std::invalid_argument("CSV export supports single-axis histograms");
    os << kHistogramHeader << '\n';
    for (std::size_t i = 0; i < h.counts().size(); ++i) {
        os << format_double(h.edges()[i]) << ',' << format_double(h.edges()[i + 1]) << ',' << h.counts()[i] << '\n';
    }
}

inline MeanHistogram read_histogram_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kHistogramHeader) throw std::runtime_error("histogram import: bad header");
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string lo, hi, count;
        if (!std::getline(row, lo, ',') || !std::getline(row, hi, ',') || !std::getline(row, count)) {
            throw std::runtime_error("histogram import: malformed line '" + line + "'");
        }
        try {
            const double l = std::stod(lo), h = std::stod(hi);
            if (edges.empty()) {
                edges.push_back(l);
            } else if (edges.back() != l) {
                throw std::runtime_error("histogram import: bins are not contiguous");
            }
            edges.push_back(h);
            counts.push_back(std::stoull(count));
        } catch (const std::logic_error&) {
            throw std::runtime_error("histogram import: malformed line '" + line + "'");
        }
    }
    return MeanHistogram(std::move(edges), std::move(counts));
}

struct HistogramMeta {
    std::optional<double> D;  // unknown for imported data
    double R = 1.0;
    int d = 1;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::string sampler = BallSampler::sampler_id;
    std::string rng = std::string(RandomStream::algorithm_id);
};

inline nlohmann::ordered_json to_json(const HistogramMeta& m) {
    nlohmann::ordered_json j;
    if (m.D) {
        j["D"] = *m.D;
    } else {
        j["D"] = "unknown";
    }
    j["R"] = m.R;
    j["d"] = m.d;
    j["seed"] = m.seed;
    j["samples"] = m.samples;
    j["sampler"] = m.sampler;
    j["rng"] = m.rng;
    return j;
}

inline nlohmann::ordered_json to_json(const FitResult& f) {
    nlohmann::ordered_json j;
    j["D_hat"] = f.D_hat;
    j["stderr"] = f.std_error;
    j["log_likelihood"] = f.log_likelihood;
    j["bins"] = f.bins;
    j["samples"] = f.total;
    return j;
}

inline nlohmann::ordered_json to_json(const MeanHistogram& h) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < h.counts().size() && h.axes() == 1; ++i) {
        rows.push_back({{"bin_lo", h.edges()[i]}, {"bin_hi", h.edges()[i + 1]}, {"count", h.counts()[i]}});
    }
    return rows;
}

}  // namespace liminfo

#include "escoil/screen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "escoil/error.hpp"

namespace escoil {

std::vector<SliceReport> slice_reports(const EscVolume& esc, const RssVolume& rss, const std::string& volume_id,
                                       const ScreenConfig& cfg) {
    if (esc.slices != rss.slices || esc.rows != rss.rows || esc.cols != rss.cols) {
        throw DimensionError("ESC and RSS volumes of '" + volume_id + "' differ in shape");
    }
    SsimParams params = cfg.ssim;
    const double peak = rss.values.empty() ? 0.0 : *std::max_element(rss.values.begin(), rss.values.end());
    params.data_range = peak > 0.0 ? peak : 1.0;

    std::vector<SliceReport> out;
    out.reserve(esc.slices);
    for (std::size_t s = 0; s < esc.slices; ++s) {
        const std::vector<double> mag = magnitude(esc.slice(s));
        const std::span<const double> truth = rss.slice(s);
        double l2 = 0.0;
        for (std::size_t i = 0; i < mag.size(); ++i) {
            l2 += (mag[i] - truth[i]) * (mag[i] - truth[i]);
        }
        SliceReport r;
        r.volume_id = volume_id;
        r.slice_index = s;
        r.hellinger = hellinger_distance(mag, truth);
        r.l2_magnitude_error = std::sqrt(l2);
        r.ssim = ssim(RealGrid(esc.rows, esc.cols, mag),
                      RealGrid(rss.rows, rss.cols, std::vector<double>(truth.begin(), truth.end())), params);
        r.flagged = r.ssim < cfg.flag_ssim;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> ScreenSummary::flagged_volumes() const {
    std::vector<std::string> ids;
    for (const VolumeSummary& v : volumes) {
        if (v.flagged) {
            ids.push_back(v.volume_id);
        }
    }
    return ids;
}

ScreenSummary screen(const std::vector<SliceReport>& reports, double volume_flag_fraction) {
    ScreenSummary out;
    std::map<std::string, VolumeSummary> by_volume;
    for (const SliceReport& r : reports) {
        VolumeSummary& v = by_volume[r.volume_id];
        v.volume_id = r.volume_id;
        ++v.slices;
        v.flagged_slices += r.flagged ? 1 : 0;
    }
    for (auto& [id, v] : by_volume) {
        v.flagged_fraction = static_cast<double>(v.flagged_slices) / static_cast<double>(v.slices);
        v.flagged = v.flagged_fraction >= volume_flag_fraction && v.flagged_slices > 0;
        out.total_slices += v.slices;
        out.flagged_slices += v.flagged_slices;
        if (v.flagged) {
            out.slices_in_flagged_volumes += v.slices;
            out.flagged_slices_in_flagged_volumes += v.flagged_slices;
        }
        ++out.slice_count_histogram[v.slices];
        out.volumes.push_back(v);
    }
    if (out.volumes.empty()) {
        return out;
    }
    const auto flagged = static_cast<double>(out.flagged_volumes().size());
    out.volume_flag_rate = flagged / static_cast<double>(out.volumes.size());
    if (out.slices_in_flagged_volumes > 0) {
        out.slice_rate_within_flagged = static_cast<double>(out.flagged_slices_in_flagged_volumes) /
                                        static_cast<double>(out.slices_in_flagged_volumes);
    }
    out.image_flag_rate =
        static_cast<double>(out.flagged_slices_in_flagged_volumes) / static_cast<double>(out.total_slices);
    return out;
}

namespace {

std::string real17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string format_reports_csv(const std::vector<SliceReport>& reports) {
    std::ostringstream out;
    out << "volume_id,slice,hellinger,l2,ssim,flagged\n";
    for (const SliceReport& r : reports) {
        out << r.volume_id << ',' << r.slice_index << ',' << real17(r.hellinger) << ','
            << real17(r.l2_magnitude_error) << ',' << real17(r.ssim) << ',' << (r.flagged ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string format_summary(const ScreenSummary& s) {
    std::ostringstream out;
    out << "volumes: " << s.volumes.size() << '\n';
    out << "slices: " << s.total_slices << '\n';
    out << "flagged volumes: " << s.flagged_volumes().size() << " (" << 100.0 * s.volume_flag_rate << "%)\n";
    out << "flagged slices within flagged volumes: " << s.flagged_slices_in_flagged_volumes << " ("
        << 100.0 * s.slice_rate_within_flagged << "%)\n";
    out << "images with artifacts overall: " << 100.0 * s.image_flag_rate << "%\n";
    for (const std::string& id : s.flagged_volumes()) {
        out << "flagged: " << id << '\n';
    }
    out << "slices per volume histogram:";
    for (const auto& [l, count] : s.slice_count_histogram) {
        out << ' ' << l << ':' << count;
    }
    out << '\n';
    return out.str();
}

} // namespace escoil

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "escoil/metrics.hpp"
#include "escoil/volume.hpp"

namespace escoil {

struct SliceReport {
    std::string volume_id;
    std::size_t slice_index = 0;
    double hellinger = 0.0;
    double l2_magnitude_error = 0.0;
    double ssim = 0.0;
    bool flagged = false;
};

struct ScreenConfig {
    double flag_ssim = 0.80;       // slice flagged when ssim < flag_ssim
    double volume_fraction = 0.10; // volume flagged when flagged slices / slices >= this
    SsimParams ssim;               // data_range is replaced per volume by max(rss)
};

// One report per slice comparing |esc| with the RSS ground truth.
std::vector<SliceReport> slice_reports(const EscVolume& esc, const RssVolume& rss, const std::string& volume_id,
                                       const ScreenConfig& cfg);

struct VolumeSummary {
    std::string volume_id;
    std::size_t slices = 0;
    std::size_t flagged_slices = 0;
    double flagged_fraction = 0.0;
    bool flagged = false;
};

struct ScreenSummary {
    std::vector<VolumeSummary> volumes; // sorted by volume_id
    std::size_t total_slices = 0;
    std::size_t flagged_slices = 0;               // over all volumes
    std::size_t slices_in_flagged_volumes = 0;
    std::size_t flagged_slices_in_flagged_volumes = 0;
    double volume_flag_rate = 0.0;                // flagged volumes / volumes
    double slice_rate_within_flagged = 0.0;       // flagged / slices, inside flagged volumes
    double image_flag_rate = 0.0;                 // flagged slices in flagged volumes / all slices
    std::map<std::size_t, std::size_t> slice_count_histogram; // l -> number of volumes

    std::vector<std::string> flagged_volumes() const;
};

// Reduction is order-independent: reports are grouped by volume_id.
ScreenSummary screen(const std::vector<SliceReport>& reports, double volume_flag_fraction);

// CSV with header "volume_id,slice,hellinger,l2,ssim,flagged".
std::string format_reports_csv(const std::vector<SliceReport>& reports);
std::string format_summary(const ScreenSummary& summary);

} // namespace escoil

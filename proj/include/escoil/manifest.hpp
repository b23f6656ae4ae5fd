#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "escoil/volume.hpp"

namespace escoil {

enum class Method { gd, lm, lbfgs };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

// Fitted coil weights and their provenance.
struct FitManifest {
    std::string volume_id;
    std::vector<cplx> weights;
    Method method = Method::lbfgs;
    std::size_t iterations = 0;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    double threshold = 0.0;
    std::size_t crop_rows = 0;
    std::size_t crop_cols = 0;

    friend bool operator==(const FitManifest&, const FitManifest&) = default;
};

// Key/value text, one "key = value" per line, keys exactly:
//   volume_id, weights, method, iterations, initial_objective,
//   final_objective, threshold, crop
// weights is a whitespace-separated list of "re,im" pairs printed with 17
// significant digits; crop is "rows cols". Lines starting with '#' are ignored.
std::string format_manifest(const FitManifest& m);
FitManifest parse_manifest(std::string_view text);

FitManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const FitManifest& m, const std::filesystem::path& path);

} // namespace escoil

#include "escoil/manifest.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "escoil/error.hpp"
#include "escoil/volume_io.hpp"

namespace escoil {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::gd:
        return "gd";
    case Method::lm:
        return "lm";
    case Method::lbfgs:
        return "lbfgs";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "gd") {
        return Method::gd;
    }
    if (name == "lm") {
        return Method::lm;
    }
    if (name == "lbfgs") {
        return Method::lbfgs;
    }
    throw FormatError("unknown method '" + std::string(name) + "'");
}

namespace {

constexpr std::array<std::string_view, 8> kKeys = {
    "volume_id", "weights", "method", "iterations", "initial_objective", "final_objective", "threshold", "crop"};

std::string real17(double v) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view s, std::string_view key) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw FormatError("manifest field '" + std::string(key) + "' is not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::size_t parse_count(std::string_view s, std::string_view key) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw FormatError("manifest field '" + std::string(key) + "' is not a count: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') {
            ++j;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

} // namespace

std::string format_manifest(const FitManifest& m) {
    std::ostringstream out;
    out << "# escoil fit manifest\n";
    out << "volume_id = " << m.volume_id << '\n';
    out << "weights =";
    for (const cplx& w : m.weights) {
        out << ' ' << real17(w.real()) << ',' << real17(w.imag());
    }
    out << '\n';
    out << "method = " << to_string(m.method) << '\n';
    out << "iterations = " << m.iterations << '\n';
    out << "initial_objective = " << real17(m.initial_objective) << '\n';
    out << "final_objective = " << real17(m.final_objective) << '\n';
    out << "threshold = " << real17(m.threshold) << '\n';
    out << "crop = " << m.crop_rows << ' ' << m.crop_cols << '\n';
    return out.str();
}

FitManifest parse_manifest(std::string_view text) {
    std::map<std::string, std::string, std::less<>> fields;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw FormatError("manifest line " + std::to_string(line_no) + " has no '='");
        }
        const std::string key(trim(line.substr(0, eq)));
        bool known = false;
        for (std::string_view k : kKeys) {
            known = known || k == key;
        }
        if (!known) {
            throw FormatError("unknown manifest field '" + key + "'");
        }
        if (!fields.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
            throw FormatError("duplicate manifest field '" + key + "'");
        }
    }
    for (std::string_view k : kKeys) {
        if (!fields.contains(k)) {
            throw FormatError("manifest is missing field '" + std::string(k) + "'");
        }
    }

    FitManifest m;
    m.volume_id = fields.find("volume_id")->second;
    for (std::string_view pair : split_ws(fields.find("weights")->second)) {
        const auto comma = pair.find(',');
        if (comma == std::string_view::npos) {
            throw FormatError("weight '" + std::string(pair) + "' is not an re,im pair");
        }
        m.weights.emplace_back(parse_real(pair.substr(0, comma), "weights"),
                               parse_real(pair.substr(comma + 1), "weights"));
    }
    if (m.weights.empty()) {
        throw FormatError("manifest has no weights");
    }
    m.method = parse_method(fields.find("method")->second);
    m.iterations = parse_count(fields.find("iterations")->second, "iterations");
    m.initial_objective = parse_real(fields.find("initial_objective")->second, "initial_objective");
    m.final_objective = parse_real(fields.find("final_objective")->second, "final_objective");
    m.threshold = parse_real(fields.find("threshold")->second, "threshold");
    const auto crop = split_ws(fields.find("crop")->second);
    if (crop.size() != 2) {
        throw FormatError("manifest field 'crop' must be 'rows cols'");
    }
    m.crop_rows = parse_count(crop[0], "crop");
    m.crop_cols = parse_count(crop[1], "crop");

    if (!(m.final_objective <= m.initial_objective)) {
        throw FormatError("manifest final_objective " + real17(m.final_objective) + " exceeds initial_objective " +
                          real17(m.initial_objective));
    }
    return m;
}

FitManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

void write_manifest(const FitManifest& m, const std::filesystem::path& path) {
    write_file_atomic(path, format_manifest(m));
}

} // namespace escoil

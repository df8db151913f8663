#include "pitchtrack/mot_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace pitchtrack {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string where(int line_no) { return " (line " + std::to_string(line_no) + ")"; }

double to_real(std::string_view field, int index, int line_no) {
    double v = 0.0;
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw std::invalid_argument(fmt::format("non-numeric field {} '{}'", index + 1, field) + where(line_no));
    }
    return v;
}

int to_int(std::string_view field, int index, int line_no) {
    const double v = to_real(field, index, line_no);
    if (v != std::floor(v) || std::abs(v) > 2e9) {
        throw std::invalid_argument(fmt::format("field {} must be an integer, got '{}'", index + 1, field) +
                                    where(line_no));
    }
    return static_cast<int>(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int MotData::max_frame() const { return static_cast<int>(std::max(detections.size(), tracks.size())); }

MotLine parse_mot_line(std::string_view text, int line_no) {
    const auto fields = split(text, ',');
    if (fields.size() != 10) {
        throw std::invalid_argument(fmt::format("expected 10 fields, got {}", fields.size()) + where(line_no));
    }
    MotLine l;
    l.frame = to_int(fields[0], 0, line_no);
    l.id = to_int(fields[1], 1, line_no);
    l.box = {to_real(fields[2], 2, line_no), to_real(fields[3], 3, line_no), to_real(fields[4], 4, line_no),
             to_real(fields[5], 5, line_no)};
    l.conf = to_real(fields[6], 6, line_no);
    for (int k = 0; k < 3; ++k) l.extra[k] = to_real(fields[7 + k], 7 + k, line_no);
    if (l.frame < 1) throw std::invalid_argument("frame must be >= 1" + where(line_no));
    if (l.id < -1) throw std::invalid_argument("id must be -1 or >= 0" + where(line_no));
    if (!(l.box.w > 0.0 && l.box.h > 0.0)) throw std::invalid_argument("box size must be > 0" + where(line_no));
    return l;
}

std::vector<MotLine> parse_mot(std::istream& in) {
    std::vector<MotLine> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        out.push_back(parse_mot_line(line, line_no));
    }
    return out;
}

MotData group_mot(const std::vector<MotLine>& lines) {
    MotData data;
    int max_frame = 0;
    for (const MotLine& l : lines) max_frame = std::max(max_frame, l.frame);
    data.detections.resize(static_cast<std::size_t>(max_frame));
    data.tracks.resize(static_cast<std::size_t>(max_frame));
    for (const MotLine& l : lines) {
        if (l.id == -1) {
            data.detections[l.frame - 1].push_back({l.frame, l.box, std::clamp(l.conf, 0.0, 1.0), std::nullopt});
        } else {
            data.tracks[l.frame - 1].push_back({l.id, l.box, l.conf});
        }
    }
    for (auto& frame : data.tracks) {
        std::stable_sort(frame.begin(), frame.end(),
                         [](const TrackedBox& a, const TrackedBox& b) { return a.id < b.id; });
    }
    return data;
}

MotData read_mot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return group_mot(parse_mot(in));
}

std::string format_real(double v) {
    std::string s = fmt::format("{:.2f}", v);
    if (s == "-0.00") s = "0.00";
    return s;
}

namespace {

// Trailing fields are usually -1 placeholders or integer world coordinates.
std::string format_extra(double v) {
    if (v == std::round(v) && std::abs(v) < 1e15) return fmt::format("{}", static_cast<long long>(v));
    return format_real(v);
}

}  // namespace

std::string format_mot_line(const MotLine& l) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{}\n", l.frame, l.id, format_real(l.box.x), format_real(l.box.y),
                       format_real(l.box.w), format_real(l.box.h), format_real(l.conf), format_extra(l.extra[0]),
                       format_extra(l.extra[1]), format_extra(l.extra[2]));
}

std::string format_mot(const TrackFrames& tracks) {
    std::string out;
    for (std::size_t f = 0; f < tracks.size(); ++f) {
        std::vector<TrackedBox> sorted = tracks[f];
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const TrackedBox& a, const TrackedBox& b) { return a.id < b.id; });
        for (const TrackedBox& t : sorted) {
            out += format_mot_line({static_cast<int>(f) + 1, t.id, t.box, t.score});
        }
    }
    return out;
}

std::string format_mot(const DetectionFrames& detections) {
    std::string out;
    for (std::size_t f = 0; f < detections.size(); ++f) {
        for (const Detection& d : detections[f]) {
            out += format_mot_line({static_cast<int>(f) + 1, -1, d.box, d.confidence});
        }
    }
    return out;
}

void write_mot(const std::filesystem::path& path, const TrackFrames& tracks) { write_text(path, format_mot(tracks)); }

void write_mot(const std::filesystem::path& path, const DetectionFrames& detections) {
    write_text(path, format_mot(detections));
}

std::string format_embeddings(const DetectionFrames& detections) {
    std::string out;
    for (std::size_t f = 0; f < detections.size(); ++f) {
        for (const Detection& d : detections[f]) {
            if (!d.embedding) continue;
            out += std::to_string(f + 1);
            for (double v : *d.embedding) out += fmt::format(",{:.6f}", v);
            out += '\n';
        }
    }
    return out;
}

void write_embeddings(const std::filesystem::path& path, const DetectionFrames& detections) {
    write_text(path, format_embeddings(detections));
}

void attach_embeddings(std::istream& in, DetectionFrames& detections) {
    std::size_t frame_idx = 0;
    std::size_t det_idx = 0;
    auto advance = [&] {
        while (frame_idx < detections.size() && det_idx >= detections[frame_idx].size()) {
            ++frame_idx;
            det_idx = 0;
        }
    };
    advance();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (frame_idx >= detections.size()) {
            throw std::invalid_argument("more embeddings than detections" + where(line_no));
        }
        const auto fields = split(line, ',');
        if (fields.size() < 2) throw std::invalid_argument("embedding line needs a frame and values" + where(line_no));
        const int frame = to_int(fields[0], 0, line_no);
        if (frame != static_cast<int>(frame_idx) + 1) {
            throw std::invalid_argument(fmt::format("embedding frame {} does not match detection frame {}", frame,
                                                    frame_idx + 1) +
                                        where(line_no));
        }
        Embedding e;
        for (std::size_t k = 1; k < fields.size(); ++k) e.push_back(to_real(fields[k], static_cast<int>(k), line_no));
        try {
            normalize(e);
        } catch (const std::invalid_argument& ex) {
            throw std::invalid_argument(ex.what() + where(line_no));
        }
        detections[frame_idx][det_idx].embedding = std::move(e);
        ++det_idx;
        advance();
    }
    if (frame_idx < detections.size()) throw std::invalid_argument("fewer embeddings than detections");
}

void read_embeddings(const std::filesystem::path& path, DetectionFrames& detections) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    attach_embeddings(in, detections);
}

std::filesystem::path embedding_path(const std::filesystem::path& det_file) {
    std::filesystem::path p = det_file;
    p += ".emb";
    return p;
}

}  // namespace pitchtrack

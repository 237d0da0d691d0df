#include "gazebc/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "gazebc/error.hpp"

namespace gazebc {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_double(const std::string& text, const std::filesystem::path& path, int line_no) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": malformed number '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": non-finite value '" + text + "'");
    }
    return value;
}

}  // namespace

SessionRecording load_session(const std::filesystem::path& path, int expected_participants) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open session file: " + path.string());

    const int expected_cols = 3 + 2 * expected_participants;
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
    ++line_no;
    const auto header = split_csv_row(line);
    if (static_cast<int>(header.size()) != expected_cols || header[0] != "frame") {
        throw ValidationError(path.string() + ":1: bad header, expected " +
                              std::to_string(expected_cols) + " columns starting with 'frame', got " +
                              std::to_string(header.size()));
    }

    SessionRecording session;
    session.id = path.stem().string();
    session.participant_count = expected_participants;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_row(line);
        if (static_cast<int>(fields.size()) != expected_cols) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected " + std::to_string(expected_cols) +
                                  " columns, got " + std::to_string(fields.size()));
        }
        Frame frame;
        frame.index = static_cast<int>(parse_double(fields[0], path, line_no));
        frame.facilitator =
            canonicalize({parse_double(fields[1], path, line_no), parse_double(fields[2], path, line_no)});
        frame.participants.reserve(expected_participants);
        for (int p = 0; p < expected_participants; ++p) {
            frame.participants.push_back(canonicalize({parse_double(fields[3 + 2 * p], path, line_no),
                                                       parse_double(fields[4 + 2 * p], path, line_no)}));
        }
        const int expected_index = static_cast<int>(session.frames.size());
        if (frame.index != expected_index) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": frame index " + std::to_string(frame.index) +
                                  " out of order, expected " + std::to_string(expected_index));
        }
        session.frames.push_back(std::move(frame));
    }
    return session;
}

void save_session(const std::filesystem::path& path, const SessionRecording& session) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write session file: " + path.string());
    out << "frame,fac_yaw,fac_pitch";
    for (int p = 1; p <= session.participant_count; ++p) {
        out << ",p" << p << "_yaw,p" << p << "_pitch";
    }
    out << "\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    };
    for (const Frame& frame : session.frames) {
        out << frame.index;
        put(frame.facilitator.yaw);
        put(frame.facilitator.pitch);
        for (const GazeVector& g : frame.participants) {
            put(g.yaw);
            put(g.pitch);
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

SessionRecording compute_velocities(SessionRecording session) {
    if (!(session.fps > 0.0)) throw ValidationError("compute_velocities: fps must be > 0");
    for (std::size_t t = 0; t < session.frames.size(); ++t) {
        if (t == 0) {
            session.frames[t].velocity = {0.0, 0.0};
        } else {
            session.frames[t].velocity =
                (session.frames[t].facilitator - session.frames[t - 1].facilitator) * session.fps;
        }
    }
    return session;
}

std::vector<Episode> extract_episodes(const SessionRecording& session, int episode_length,
                                      int stride) {
    if (episode_length < 2) throw ValidationError("extract_episodes: episode length must be >= 2");
    if (stride == 0) stride = episode_length;
    if (stride < 1) throw ValidationError("extract_episodes: stride must be >= 1");

    const int len = static_cast<int>(session.frames.size());
    std::vector<Episode> episodes;
    if (len < episode_length) {
        std::cerr << "warning: session '" << session.id << "' has " << len
                  << " frames, shorter than episode length " << episode_length << "\n";
        return episodes;
    }
    for (int start = 0; start + episode_length <= len; start += stride) {
        Episode ep;
        ep.length = episode_length;
        ep.session_id = session.id;
        ep.facilitator_type = session.facilitator_type;
        ep.start_frame = start;
        ep.goal = session.frames[start + episode_length - 1].facilitator;
        ep.observations.reserve(episode_length);
        for (int t = 0; t < episode_length; ++t) {
            const Frame& frame = session.frames[start + t];
            Observation obs;
            obs.facilitator = frame.facilitator;
            obs.velocity = frame.velocity;
            obs.goal = ep.goal;
            obs.participants = frame.participants;
            ep.observations.push_back(std::move(obs));
        }
        ep.expert_actions.reserve(episode_length - 1);
        for (int t = 0; t + 1 < episode_length; ++t) {
            ep.expert_actions.push_back(session.frames[start + t + 1].facilitator -
                                        session.frames[start + t].facilitator);
        }
        episodes.push_back(std::move(ep));
    }
    return episodes;
}

ActionBounds action_bounds(const std::vector<Episode>& episodes) {
    bool any = false;
    ActionBounds bounds;
    bounds.min = {kHalfPi, kHalfPi};
    bounds.max = {-kHalfPi, -kHalfPi};
    for (const Episode& ep : episodes) {
        for (const Action& a : ep.expert_actions) {
            any = true;
            bounds.min.yaw = std::min(bounds.min.yaw, a.yaw);
            bounds.min.pitch = std::min(bounds.min.pitch, a.pitch);
            bounds.max.yaw = std::max(bounds.max.yaw, a.yaw);
            bounds.max.pitch = std::max(bounds.max.pitch, a.pitch);
        }
    }
    if (!any) throw ValidationError("action_bounds: no expert actions");
    bounds.min.yaw = std::max(bounds.min.yaw, -kHalfPi);
    bounds.min.pitch = std::max(bounds.min.pitch, -kHalfPi);
    bounds.max.yaw = std::min(bounds.max.yaw, kHalfPi);
    bounds.max.pitch = std::min(bounds.max.pitch, kHalfPi);
    bounds.validate();
    return bounds;
}

std::map<int, FoldSplit> split_folds(const std::vector<std::string>& session_ids,
                                     const FoldSpec& spec) {
    const std::set<std::string> all(session_ids.begin(), session_ids.end());
    std::map<int, FoldSplit> result;
    std::map<int, std::set<std::string>> seen;
    for (const FoldSpec::Entry& e : spec.entries) {
        if (e.role != "train" && e.role != "test") {
            throw ValidationError("fold spec: role must be train|test, got '" + e.role + "'");
        }
        if (!all.count(e.session_id)) {
            throw ValidationError("fold spec: unknown session '" + e.session_id + "'");
        }
        if (!seen[e.fold].insert(e.session_id).second) {
            throw ValidationError("fold spec: session '" + e.session_id +
                                  "' listed twice in fold " + std::to_string(e.fold));
        }
        if (e.role == "train") {
            result[e.fold].train.push_back(e.session_id);
        } else {
            result[e.fold].test.push_back(e.session_id);
        }
    }
    for (const auto& [fold, members] : seen) {
        if (members.size() != all.size()) {
            throw ValidationError("fold spec: fold " + std::to_string(fold) +
                                  " does not cover all sessions");
        }
    }
    if (result.empty()) throw ValidationError("fold spec: no folds defined");
    return result;
}

FoldSpec load_fold_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fold spec: " + path.string());
    FoldSpec spec;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_row(line);
        if (fields.size() != 3) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected 'fold,role,session_id'");
        }
        FoldSpec::Entry entry;
        try {
            entry.fold = std::stoi(fields[0]);
        } catch (const std::exception&) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": bad fold number '" + fields[0] + "'");
        }
        entry.role = fields[1];
        entry.session_id = fields[2];
        spec.entries.push_back(std::move(entry));
    }
    return spec;
}

void save_fold_spec(const std::filesystem::path& path, const FoldSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write fold spec: " + path.string());
    for (const FoldSpec::Entry& e : spec.entries) {
        out << e.fold << ',' << e.role << ',' << e.session_id << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace gazebc

#include "vocr/postprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace vocr {

int levenshtein(const std::string& a, const std::string& b) {
    const std::size_t n = b.size();
    std::vector<int> prev(n + 1), cur(n + 1);
    for (std::size_t j = 0; j <= n; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= n; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

Dictionary Dictionary::load(const std::filesystem::path& path, int max_distance) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open dictionary: " + path.string());
    Dictionary dict;
    dict.max_distance = max_distance;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string word;
        while (ss >> word) {
            for (char& c : word) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            dict.words.insert(word);
        }
    }
    return dict;
}

std::string correct_word(const std::string& word, const Dictionary& dict) {
    if (word.empty()) throw UsageError("correct_word on an empty word");
    int best = dict.max_distance + 1;
    const std::string* best_word = nullptr;
    for (const auto& candidate : dict.words) {
        const int d = levenshtein(word, candidate);
        if (d < best) {  // set iteration is sorted, so ties keep the smallest
            best = d;
            best_word = &candidate;
        }
    }
    if (best_word && best <= dict.max_distance) return *best_word;
    return word;
}

std::string correct_line(const std::string& line, const Dictionary& dict) {
    std::string out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const std::size_t space = line.find(' ', pos);
        const std::string token =
            line.substr(pos, space == std::string::npos ? std::string::npos : space - pos);
        if (!token.empty()) {
            const bool has_digit = std::any_of(token.begin(), token.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c));
            });
            out += has_digit || dict.empty() ? token : correct_word(token, dict);
        }
        if (space == std::string::npos) break;
        out.push_back(' ');
        pos = space + 1;
    }
    return out;
}

std::vector<IndexEntry> build_index(const std::vector<Recognition>& recognitions,
                                    const std::vector<Rect>& rects, const Dictionary& dict) {
    if (recognitions.size() != rects.size())
        throw UsageError("recognitions and rects must pair up");

    std::vector<IndexEntry> entries;
    for (std::size_t i = 0; i < recognitions.size(); ++i) {
        const Recognition& rec = recognitions[i];
        IndexEntry entry;
        entry.raw = rec.text;
        entry.text = correct_line(rec.text, dict);
        entry.track_id = rec.track_id;
        entry.first_frame = rec.first_frame;
        entry.last_frame = rec.last_frame;
        entry.rect = rects[i];
        double sum = 0;
        for (double c : rec.confidences) sum += c;
        entry.confidence = rec.confidences.empty() ? 0.0 : sum / rec.confidences.size();
        if (entry.text.empty()) {
            std::cerr << "index: dropping empty recognition from track " << rec.track_id << "\n";
            continue;
        }
        entries.push_back(std::move(entry));
    }

    // Sort first so merging is independent of input order.
    std::sort(entries.begin(), entries.end(), [](const IndexEntry& a, const IndexEntry& b) {
        if (a.first_frame != b.first_frame) return a.first_frame < b.first_frame;
        return a.track_id < b.track_id;
    });

    std::vector<IndexEntry> merged;
    for (auto& entry : entries) {
        bool absorbed = false;
        for (auto& m : merged) {
            if (m.text != entry.text) continue;
            if (entry.first_frame <= m.last_frame + 1 && m.first_frame <= entry.last_frame + 1) {
                m.first_frame = std::min(m.first_frame, entry.first_frame);
                m.last_frame = std::max(m.last_frame, entry.last_frame);
                m.confidence = (m.confidence + entry.confidence) / 2.0;
                absorbed = true;
                break;
            }
        }
        if (!absorbed) merged.push_back(std::move(entry));
    }
    std::sort(merged.begin(), merged.end(), [](const IndexEntry& a, const IndexEntry& b) {
        if (a.first_frame != b.first_frame) return a.first_frame < b.first_frame;
        return a.track_id < b.track_id;
    });
    return merged;
}

std::string index_to_jsonl(const std::vector<IndexEntry>& entries) {
    std::ostringstream out;
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["text"] = e.text;
        j["raw"] = e.raw;
        j["track"] = e.track_id;
        j["first_frame"] = e.first_frame;
        j["last_frame"] = e.last_frame;
        j["rect"] = {{"x", e.rect.x}, {"y", e.rect.y}, {"w", e.rect.w}, {"h", e.rect.h}};
        // Fixed rounding keeps index bytes reproducible.
        j["confidence"] = std::round(e.confidence * 1e6) / 1e6;
        out << j.dump() << "\n";
    }
    return out.str();
}

std::vector<IndexEntry> index_from_jsonl(const std::string& text) {
    std::vector<IndexEntry> entries;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        IndexEntry e;
        e.text = j.at("text").get<std::string>();
        e.raw = j.at("raw").get<std::string>();
        e.track_id = j.at("track").get<int>();
        e.first_frame = j.at("first_frame").get<int>();
        e.last_frame = j.at("last_frame").get<int>();
        e.rect = Rect{j.at("rect").at("x"), j.at("rect").at("y"), j.at("rect").at("w"),
                      j.at("rect").at("h")};
        e.confidence = j.at("confidence").get<double>();
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_index(const std::filesystem::path& path, const std::vector<IndexEntry>& entries) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF terminators everywhere
    if (!out) throw FormatError("cannot write index: " + path.string());
    out << index_to_jsonl(entries);
}

std::vector<IndexEntry> read_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open index: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return index_from_jsonl(buf.str());
}

}  // namespace vocr

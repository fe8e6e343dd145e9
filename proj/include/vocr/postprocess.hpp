#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "vocr/raster.hpp"
#include "vocr/recognize.hpp"

namespace vocr {

// Unit-cost edit distance (insert / delete / substitute).
int levenshtein(const std::string& a, const std::string& b);

struct Dictionary {
    std::set<std::string> words;     // uppercase, non-empty
    int max_distance = 2;

    bool empty() const { return words.empty(); }

    // One word per line, '#' comments, blank lines ignored. ASCII letters
    // are folded to uppercase on load.
    static Dictionary load(const std::filesystem::path& path, int max_distance = 2);
};

// Nearest dictionary word within max_distance (ties -> lexicographically
// smallest); the word itself when nothing is near enough.
std::string correct_word(const std::string& word, const Dictionary& dict);

// Per-token correction over single-space splits; tokens containing digits
// pass through untouched.
std::string correct_line(const std::string& line, const Dictionary& dict);

struct IndexEntry {
    std::string text;      // corrected
    std::string raw;
    int track_id = 0;
    int first_frame = 0;
    int last_frame = 0;
    Rect rect;             // track reference rect
    double confidence = 0; // mean per-character confidence
};

// One entry per recognition; empty corrected texts are dropped. Entries
// from different tracks with identical corrected text and overlapping or
// adjacent frame spans (gap <= 1) merge into one entry spanning the union.
// Output sorted by first frame, then track id.
std::vector<IndexEntry> build_index(const std::vector<Recognition>& recognitions,
                                    const std::vector<Rect>& rects, const Dictionary& dict);

// JSON Lines with fixed key order:
// {"text":...,"raw":...,"track":...,"first_frame":...,"last_frame":...,
//  "rect":{"x":..,"y":..,"w":..,"h":..},"confidence":...}
std::string index_to_jsonl(const std::vector<IndexEntry>& entries);
std::vector<IndexEntry> index_from_jsonl(const std::string& text);
void write_index(const std::filesystem::path& path, const std::vector<IndexEntry>& entries);
std::vector<IndexEntry> read_index(const std::filesystem::path& path);

}  // namespace vocr

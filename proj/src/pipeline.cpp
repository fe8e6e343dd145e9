#include "vocr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace vocr {

namespace fs = std::filesystem;

FusionMode fusion_mode_from_string(const std::string& name) {
    if (name == "min") return FusionMode::minimum;
    if (name == "mean") return FusionMode::mean;
    if (name == "median") return FusionMode::median;
    if (name == "max") return FusionMode::maximum;
    if (name == "auto") return FusionMode::automatic;
    throw UsageError("unknown fusion mode: " + name);
}

BinarizerMode binarizer_mode_from_string(const std::string& name) {
    if (name == "correlation") return BinarizerMode::correlation;
    if (name == "global") return BinarizerMode::global;
    if (name == "hybrid") return BinarizerMode::hybrid;
    throw UsageError("unknown binarizer: " + name);
}

void PipelineConfig::validate() const {
    detect.validate();
    track.validate();
    if (bank_k < 1 || bank_k % 2 == 0) throw UsageError("bank kernel size must be odd");
    if (hybrid.color_dist < 0) throw UsageError("hybrid color distance must be nonnegative");
    if (hybrid.dilate_radius < 0) throw UsageError("dilation radius must be nonnegative");
    if (dict_max_distance < 0) throw UsageError("dictionary distance must be nonnegative");
    if (track_margin < 0) throw UsageError("track margin must be nonnegative");
    if (ocr_timeout <= 0) throw UsageError("ocr timeout must be positive");
    if (ocr_command) {
        OcrAdapterSpec spec{*ocr_command, ocr_timeout};
        spec.validate();
    }
    if (bank_path && !fs::exists(*bank_path))
        throw UsageError("filter bank file does not exist: " + bank_path->string());
    if (dict_path && !fs::exists(*dict_path))
        throw UsageError("dictionary file does not exist: " + dict_path->string());
}

namespace {

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError("expected a boolean, got: " + v);
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace

void PipelineConfig::apply_key(const std::string& key, const std::string& raw_value) {
    const std::string value = unquote(strip(raw_value));
    if (key == "detect.edge_thresh") detect.edge_thresh = std::stod(value);
    else if (key == "detect.window") detect.window = std::stoi(value);
    else if (key == "detect.density_thresh") detect.density_thresh = std::stod(value);
    else if (key == "detect.min_w") detect.min_w = std::stoi(value);
    else if (key == "detect.min_h") detect.min_h = std::stoi(value);
    else if (key == "detect.color_check") detect.color_check = parse_bool(value);
    else if (key == "detect.color_tol") detect.color_tol = std::stod(value);
    else if (key == "detect.red_channel") detect.red_channel = parse_bool(value);
    else if (key == "track.iou") track.min_iou = std::stod(value);
    else if (key == "track.max_gap") track.max_gap = std::stoi(value);
    else if (key == "track.min_len") track.min_length = std::stoi(value);
    else if (key == "track.radius") track.search_radius = std::stoi(value);
    else if (key == "track.use_ncc") track.use_ncc = parse_bool(value);
    else if (key == "track.margin") track_margin = std::stoi(value);
    else if (key == "fusion.stat") fusion = fusion_mode_from_string(value);
    else if (key == "binarize.mode") binarizer = binarizer_mode_from_string(value);
    else if (key == "binarize.color_dist") hybrid.color_dist = std::stod(value);
    else if (key == "binarize.dilate") hybrid.dilate_radius = std::stoi(value);
    else if (key == "binarize.k") bank_k = std::stoi(value);
    else if (key == "binarize.bank") bank_path = fs::path(value);
    else if (key == "ocr.engine") {
        if (value == "builtin") ocr_command.reset();
        else if (value.rfind("cmd:", 0) == 0) ocr_command = value.substr(4);
        else throw UsageError("ocr.engine must be 'builtin' or 'cmd:<template>'");
    } else if (key == "ocr.timeout") ocr_timeout = std::stod(value);
    else if (key == "dict.path") dict_path = fs::path(value);
    else if (key == "dict.max_dist") dict_max_distance = std::stoi(value);
    else if (key == "run.jobs" || key == "jobs") jobs = static_cast<unsigned>(std::stoul(value));
    else if (key == "run.emit_intermediates" || key == "emit_intermediates")
        emit_intermediates = parse_bool(value);
    else if (key == "run.seed" || key == "seed") seed = std::stoull(value);
    else throw UsageError("unknown config key: " + key);
}

void PipelineConfig::apply_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path.string());
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + " is not key = value");
        std::string key = strip(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        try {
            apply_key(key, line.substr(eq + 1));
        } catch (const std::invalid_argument&) {
            throw UsageError("bad value for " + key + " at config line " + std::to_string(lineno));
        }
    }
}

namespace {

struct TrackOutput {
    Recognition recognition;
    Rect rect;
    EnhancedImage enhanced;
    BinaryTextImage seed;    // correlation seed (hybrid mode only)
    BinaryTextImage binary;
    Polarity polarity = Polarity::dark;
    bool have_seed = false;
};

TrackOutput process_track(const std::vector<Frame>& frames, TextTrack& track,
                          const PipelineConfig& config, const StrokeFilterBank& bank,
                          const GlyphSet& glyphs) {
    expand_track(track, config.track_margin, frames.front().width, frames.front().height);
    align(frames, track, config.track);

    TrackOutput out;
    out.rect = track.reference;

    switch (config.fusion) {
        case FusionMode::minimum: out.enhanced = fuse(frames, track, FusionStat::minimum); break;
        case FusionMode::mean: out.enhanced = fuse(frames, track, FusionStat::mean); break;
        case FusionMode::median: out.enhanced = fuse(frames, track, FusionStat::median); break;
        case FusionMode::maximum: out.enhanced = fuse(frames, track, FusionStat::maximum); break;
        case FusionMode::automatic: {
            PolarityChoice choice = choose_polarity(fuse(frames, track, FusionStat::minimum),
                                                    fuse(frames, track, FusionStat::maximum));
            out.enhanced = std::move(choice.image);
            out.polarity = choice.polarity;
            break;
        }
    }

    // Correlation filters model dark strokes; normalize light-on-dark
    // fusions before binarization.
    EnhancedImage normalized = out.enhanced;
    if (out.polarity == Polarity::light) {
        normalized.gray = invert(normalized.gray);
        for (auto& v : normalized.color) v = static_cast<std::uint8_t>(255 - v);
    }

    switch (config.binarizer) {
        case BinarizerMode::correlation:
            out.binary = correlation_binarize(normalized.gray, bank);
            break;
        case BinarizerMode::global:
            out.binary = global_binarize(normalized.gray, Polarity::dark);
            break;
        case BinarizerMode::hybrid:
            out.seed = correlation_binarize(normalized.gray, bank);
            out.have_seed = true;
            out.binary = hybrid_binarize(normalized, bank, config.hybrid);
            break;
    }
    out.binary.polarity = out.polarity;

    std::optional<OcrAdapterSpec> adapter;
    if (config.ocr_command) adapter = OcrAdapterSpec{*config.ocr_command, config.ocr_timeout};
    out.recognition = recognize_track(out.binary, glyphs, adapter);
    out.recognition.track_id = track.id;
    out.recognition.first_frame = track.first_frame();
    out.recognition.last_frame = track.last_frame();
    return out;
}

void write_track_debug(const fs::path& dir, const TextTrack& track, const TrackOutput& out) {
    fs::create_directories(dir);
    write_pgm(dir / "enhanced.pgm", out.enhanced.gray);
    write_pbm(dir / "binary.pbm", out.binary.width, out.binary.height, out.binary.bits);
    if (out.have_seed) write_pbm(dir / "seed.pbm", out.seed.width, out.seed.height, out.seed.bits);
    nlohmann::ordered_json meta;
    meta["track"] = track.id;
    meta["rect"] = {{"x", out.rect.x}, {"y", out.rect.y}, {"w", out.rect.w}, {"h", out.rect.h}};
    meta["first_frame"] = track.first_frame();
    meta["last_frame"] = track.last_frame();
    meta["polarity"] = out.polarity == Polarity::dark ? "dark" : "light";
    meta["text"] = out.recognition.text;
    std::ofstream f(dir / "meta.json");
    f << meta.dump(2) << "\n";
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& config) {
    RunResult result;
    try {
        config.validate();
    } catch (const Error& e) {
        result.exit_code = 3;
        result.error = std::string("config: ") + e.what();
        std::cerr << result.error << "\n";
        return result;
    }

    std::vector<Frame> frames;
    try {
        frames = read_frame_dir(config.input_dir);
        if (frames.empty()) throw FormatError("no frames found in " + config.input_dir.string());
    } catch (const Error& e) {
        result.exit_code = 2;
        result.error = std::string("input: ") + e.what();
        std::cerr << result.error << "\n";
        return result;
    }
    result.frames = static_cast<int>(frames.size());

    std::string stage = "detect";
    try {
        fs::create_directories(config.output_dir);

        // Stage 1: per-frame detection (parallel, merged in frame order).
        std::vector<std::vector<TextRegion>> detections(frames.size());
        parallel_for(frames.size(), config.jobs,
                     [&](std::size_t i) { detections[i] = detect_frame(frames[i], config.detect); });

        // Stage 2: association over frames (inherently sequential).
        stage = "track";
        std::vector<int> frame_indices;
        frame_indices.reserve(frames.size());
        for (const auto& f : frames) frame_indices.push_back(f.index);
        std::vector<TextTrack> tracks = build_tracks(detections, frame_indices, config.track);
        result.tracks = static_cast<int>(tracks.size());

        // Stage 3-5: align/enhance/binarize/recognize per track (parallel).
        stage = "enhance";
        const StrokeFilterBank bank = config.bank_path ? StrokeFilterBank::load(*config.bank_path)
                                                       : train_default_bank(config.bank_k);
        const GlyphSet& glyphs = GlyphSet::builtin();
        std::vector<TrackOutput> outputs(tracks.size());
        parallel_for(tracks.size(), config.jobs, [&](std::size_t i) {
            outputs[i] = process_track(frames, tracks[i], config, bank, glyphs);
        });

        // Stage 6: dictionary correction and index assembly.
        stage = "postprocess";
        Dictionary dict;
        dict.max_distance = config.dict_max_distance;
        if (config.dict_path) dict = Dictionary::load(*config.dict_path, config.dict_max_distance);
        std::vector<Recognition> recognitions;
        std::vector<Rect> rects;
        for (const auto& out : outputs) {
            recognitions.push_back(out.recognition);
            rects.push_back(out.rect);
        }
        result.entries = build_index(recognitions, rects, dict);
        write_index(config.output_dir / "index.jsonl", result.entries);

        stage = "report";
        std::string corpus_id;
        if (fs::exists(config.input_dir / "truth.json")) {
            try {
                corpus_id = read_truth(config.input_dir).corpus_id;
            } catch (const Error&) {
                // Input truth is advisory; a malformed one does not fail the run.
            }
        }
        nlohmann::ordered_json run;
        run["corpus_id"] = corpus_id;
        run["input_dir"] = config.input_dir.string();
        run["frames"] = result.frames;
        run["tracks"] = result.tracks;
        run["entries"] = result.entries.size();
        std::ofstream rf(config.output_dir / "run.json");
        rf << run.dump(2) << "\n";

        if (config.emit_intermediates) {
            stage = "debug";
            const fs::path debug_dir = config.output_dir / "debug";
            fs::create_directories(debug_dir);
            std::ofstream det(debug_dir / "detections.jsonl", std::ios::binary);
            for (std::size_t i = 0; i < frames.size(); ++i)
                for (const auto& r : detections[i]) {
                    nlohmann::ordered_json j;
                    j["frame"] = frames[i].index;
                    j["rect"] = {{"x", r.rect.x}, {"y", r.rect.y}, {"w", r.rect.w}, {"h", r.rect.h}};
                    j["score"] = std::round(r.score * 1e6) / 1e6;
                    det << j.dump() << "\n";
                }
            for (std::size_t i = 0; i < tracks.size(); ++i)
                write_track_debug(debug_dir / ("track_" + std::to_string(tracks[i].id)),
                                  tracks[i], outputs[i]);
        }
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.error = "stage " + stage + " failed: " + e.what();
        std::cerr << result.error << "\n";
        return result;
    }
    return result;
}

// --- evaluation ----------------------------------------------------------

std::string MetricsReport::to_json() const {
    nlohmann::ordered_json j;
    j["det_precision"] = det_precision;
    j["det_recall"] = det_recall;
    j["bin_precision"] = bin_precision;
    j["bin_recall"] = bin_recall;
    j["bin_f1"] = bin_f1;
    j["cer"] = cer;
    j["counts"] = {{"det_tp", det_tp}, {"det_fp", det_fp}, {"det_fn", det_fn},
                   {"bin_tp", bin_tp}, {"bin_fp", bin_fp}, {"bin_fn", bin_fn},
                   {"cer_edits", cer_edits}, {"cer_length", cer_length}};
    return j.dump(2);
}

MetricsReport evaluate(const std::vector<fs::path>& scene_dirs,
                       const std::vector<fs::path>& run_dirs) {
    if (scene_dirs.size() != run_dirs.size() || scene_dirs.empty())
        throw UsageError("evaluate needs matching scene and run directory lists");

    MetricsReport report;
    for (std::size_t s = 0; s < scene_dirs.size(); ++s) {
        const GroundTruth truth = read_truth(scene_dirs[s]);
        const fs::path& run_dir = run_dirs[s];

        // Corpus identity check between the truth and the run manifest.
        {
            std::ifstream rf(run_dir / "run.json");
            if (!rf) throw UsageError("run directory lacks run.json: " + run_dir.string());
            nlohmann::json run;
            rf >> run;
            const std::string run_corpus = run.value("corpus_id", "");
            if (!run_corpus.empty() && !truth.corpus_id.empty() && run_corpus != truth.corpus_id)
                throw UsageError("corpus id mismatch between " + scene_dirs[s].string() + " and " +
                                 run_dir.string());
        }

        const fs::path debug_dir = run_dir / "debug";
        if (!fs::is_directory(debug_dir))
            throw UsageError("run lacks debug artifacts (re-run with --emit-intermediates): " +
                             run_dir.string());

        // (a) Detection at IoU >= 0.5: one truth rect per frame.
        std::vector<std::vector<Rect>> per_frame(truth.frame_count);
        {
            std::ifstream det(debug_dir / "detections.jsonl");
            if (det) {
                std::string line;
                while (std::getline(det, line)) {
                    if (line.empty()) continue;
                    const nlohmann::json j = nlohmann::json::parse(line);
                    const int f = j.at("frame").get<int>();
                    if (f < 0 || f >= truth.frame_count) continue;
                    per_frame[f].push_back(Rect{j.at("rect").at("x"), j.at("rect").at("y"),
                                                j.at("rect").at("w"), j.at("rect").at("h")});
                }
            }
        }
        for (int f = 0; f < truth.frame_count; ++f) {
            bool matched = false;
            for (const auto& r : per_frame[f]) {
                if (!matched && rect_iou(r, truth.rect) >= 0.5) matched = true;
                else ++report.det_fp;
            }
            if (matched) ++report.det_tp;
            else ++report.det_fn;
        }

        // (b) Binarization inside the truth rect: union of track binaries.
        std::vector<std::uint8_t> predicted(truth.mask.size(), 0);
        for (const auto& entry : fs::directory_iterator(debug_dir)) {
            if (!entry.is_directory()) continue;
            const std::string name = entry.path().filename().string();
            if (name.rfind("track_", 0) != 0) continue;
            std::ifstream mf(entry.path() / "meta.json");
            if (!mf) continue;
            nlohmann::json meta;
            mf >> meta;
            const Rect rect{meta.at("rect").at("x"), meta.at("rect").at("y"),
                            meta.at("rect").at("w"), meta.at("rect").at("h")};
            int bw = 0, bh = 0;
            const auto bits = read_pbm(entry.path() / "binary.pbm", bw, bh);
            for (int y = 0; y < bh; ++y)
                for (int x = 0; x < bw; ++x) {
                    const int fx = rect.x + x, fy = rect.y + y;
                    if (fx < 0 || fy < 0 || fx >= truth.width || fy >= truth.height) continue;
                    if (bits[static_cast<std::size_t>(y) * bw + x])
                        predicted[static_cast<std::size_t>(fy) * truth.width + fx] = 1;
                }
        }
        for (int y = truth.rect.y; y < truth.rect.bottom(); ++y)
            for (int x = truth.rect.x; x < truth.rect.right(); ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * truth.width + x;
                if (predicted[i] && truth.mask[i]) ++report.bin_tp;
                else if (predicted[i] && !truth.mask[i]) ++report.bin_fp;
                else if (!predicted[i] && truth.mask[i]) ++report.bin_fn;
            }

        // (c) Transcript CER from the index.
        std::vector<IndexEntry> entries;
        if (fs::exists(run_dir / "index.jsonl")) entries = read_index(run_dir / "index.jsonl");
        std::string text;
        for (const auto& e : entries) {
            if (!text.empty()) text += " ";
            text += e.text;
        }
        report.cer_edits += levenshtein(text, truth.transcript);
        report.cer_length += static_cast<long>(truth.transcript.size());
    }

    const auto ratio = [](long num, long den) {
        return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };
    report.det_precision = ratio(report.det_tp, report.det_tp + report.det_fp);
    report.det_recall = ratio(report.det_tp, report.det_tp + report.det_fn);
    report.bin_precision = ratio(report.bin_tp, report.bin_tp + report.bin_fp);
    report.bin_recall = ratio(report.bin_tp, report.bin_tp + report.bin_fn);
    report.bin_f1 = report.bin_precision + report.bin_recall > 0
                        ? 2 * report.bin_precision * report.bin_recall /
                              (report.bin_precision + report.bin_recall)
                        : 0.0;
    report.cer = ratio(report.cer_edits, report.cer_length);
    return report;
}

}  // namespace vocr

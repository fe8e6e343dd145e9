#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vocr/binarize.hpp"
#include "vocr/detect.hpp"
#include "vocr/enhance.hpp"
#include "vocr/postprocess.hpp"
#include "vocr/recognize.hpp"
#include "vocr/synth.hpp"
#include "vocr/track.hpp"

namespace vocr {

enum class FusionMode { minimum, mean, median, maximum, automatic };
enum class BinarizerMode { correlation, global, hybrid };

FusionMode fusion_mode_from_string(const std::string& name);
BinarizerMode binarizer_mode_from_string(const std::string& name);

struct PipelineConfig {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir;

    DetectParams detect;
    TrackParams track;
    int track_margin = 8;  // reference-rect growth before align/fuse
    FusionMode fusion = FusionMode::minimum;
    BinarizerMode binarizer = BinarizerMode::hybrid;
    HybridParams hybrid;
    int bank_k = 5;
    std::optional<std::filesystem::path> bank_path;  // default: train_default_bank

    std::optional<std::string> ocr_command;  // external adapter template; builtin otherwise
    double ocr_timeout = 10.0;

    std::optional<std::filesystem::path> dict_path;
    int dict_max_distance = 2;

    bool emit_intermediates = false;
    unsigned jobs = 0;  // 0 = logical CPU count
    std::uint64_t seed = 0;

    void validate() const;  // throws UsageError

    // TOML-style key=value overlay: "[section]" headers or dotted keys,
    // '#' comments. Unknown keys throw UsageError.
    void apply_config_file(const std::filesystem::path& path);
    void apply_key(const std::string& key, const std::string& value);
};

// Exit-code contract: 0 success (an empty index is success), 1 internal
// stage failure, 2 unreadable input, 3 invalid config.
struct RunResult {
    int exit_code = 0;
    std::string error;                // failing stage + message when nonzero
    std::vector<IndexEntry> entries;
    int frames = 0;
    int tracks = 0;
};

// detect -> track/align -> enhance -> binarize -> recognize -> postprocess.
// Writes index.jsonl and run.json under config.output_dir; with
// emit_intermediates also debug/detections.jsonl and per-track artifacts
// under debug/track_<id>/ (enhanced.pgm, binary.pbm, seed.pbm for hybrid,
// meta.json). Parallel work is merged in frame/track order so the index
// bytes never depend on the job count.
RunResult run_pipeline(const PipelineConfig& config);

struct MetricsReport {
    double det_precision = 0;
    double det_recall = 0;
    double bin_precision = 0;
    double bin_recall = 0;
    double bin_f1 = 0;
    double cer = 0;
    long det_tp = 0, det_fp = 0, det_fn = 0;
    long bin_tp = 0, bin_fp = 0, bin_fn = 0;
    long cer_edits = 0, cer_length = 0;

    std::string to_json() const;
};

// Score one or more (scene dir, run dir) pairs: detection recall/precision
// at IoU >= 0.5 against the truth rect, pixel precision/recall/F1 of the
// binarized tracks against the truth mask restricted to the truth rect,
// and transcript CER. Runs must have been produced with
// emit-intermediates; corpus ids must match.
MetricsReport evaluate(const std::vector<std::filesystem::path>& scene_dirs,
                       const std::vector<std::filesystem::path>& run_dirs);

}  // namespace vocr

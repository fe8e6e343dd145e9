// vocr: overlay caption extraction pipeline for pre-extracted frame
// sequences, plus the synthetic corpus / filter training / evaluation
// utilities that make the pipeline measurable.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vocr/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& input, const std::string& output, const std::string& config_path,
            const std::vector<std::pair<std::string, std::string>>& overrides) {
    vocr::PipelineConfig config;
    try {
        if (!config_path.empty()) config.apply_config_file(config_path);
        for (const auto& [key, value] : overrides) config.apply_key(key, value);
    } catch (const std::exception& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 3;
    }
    config.input_dir = input;
    config.output_dir = output;
    const vocr::RunResult result = vocr::run_pipeline(config);
    if (result.exit_code == 0)
        std::cout << "indexed " << result.entries.size() << " entr"
                  << (result.entries.size() == 1 ? "y" : "ies") << " from " << result.frames
                  << " frames (" << result.tracks << " tracks)\n";
    return result.exit_code;
}

int cmd_synth(vocr::SceneSpec spec, const std::string& out_dir, int pad) {
    const auto& glyphs = vocr::GlyphSet::builtin();
    spec.rect = vocr::centered_caption_rect(spec, glyphs, pad);
    auto [frames, truth] = vocr::synth_sequence(spec, glyphs);
    vocr::write_scene(out_dir, frames, truth);
    std::cout << "wrote " << frames.size() << " frames + truth to " << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& out_path, int k, const std::string& samples_list) {
    std::vector<vocr::MarkedSample> samples;
    if (samples_list.empty()) {
        samples = vocr::default_training_samples();
    } else {
        // Listing format: one "<direction> <pgm-path>" per line, '#' comments.
        std::ifstream in(samples_list);
        if (!in) {
            std::cerr << "cannot open sample list: " << samples_list << "\n";
            return 2;
        }
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ss(line);
            std::string dir_name, path;
            if (!(ss >> dir_name >> path)) continue;
            samples.push_back({vocr::read_pgm(path),
                               vocr::stroke_direction_from_string(dir_name)});
        }
    }
    vocr::TrainReport report;
    const vocr::StrokeFilterBank bank = vocr::train_filters(samples, k, &report);
    bank.save(out_path);
    std::cout << "trained bank k=" << k << " from " << report.used << " samples ("
              << report.rejected << " rejected) -> " << out_path << "\n";
    return 0;
}

int cmd_eval(const std::vector<std::string>& truth_dirs, const std::vector<std::string>& run_dirs) {
    std::vector<fs::path> truths(truth_dirs.begin(), truth_dirs.end());
    std::vector<fs::path> runs(run_dirs.begin(), run_dirs.end());
    const vocr::MetricsReport report = vocr::evaluate(truths, runs);
    std::cout << report.to_json() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"overlay caption text extraction for video frame sequences"};
    app.require_subcommand(1);

    // --- run --------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run the extraction pipeline on a frame directory");
    std::string in_dir, out_dir, config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    run->add_option("--in", in_dir, "input frame directory (frame_%06d.pgm/.ppm)")->required();
    run->add_option("--out", out_dir, "output directory for index.jsonl")->required();
    run->add_option("--config", config_path, "TOML-style key=value config file");
    unsigned jobs = 0;
    bool emit = false;
    std::string fusion, binarizer, ocr, dict, bank;
    double color_dist = -1;
    run->add_option("--jobs", jobs, "worker threads (default: logical CPUs)");
    run->add_flag("--emit-intermediates", emit, "write per-track debug artifacts");
    run->add_option("--fusion", fusion, "min|mean|median|max|auto");
    run->add_option("--binarizer", binarizer, "correlation|global|hybrid");
    run->add_option("--ocr", ocr, "builtin or cmd:<template with {in}>");
    run->add_option("--dict", dict, "dictionary file for correction");
    run->add_option("--bank", bank, "stroke filter bank file (default: built-in trained bank)");
    run->add_option("--color-dist", color_dist, "hybrid color distance");
    run->callback([&]() {
        if (jobs) overrides.push_back({"run.jobs", std::to_string(jobs)});
        if (emit) overrides.push_back({"run.emit_intermediates", "true"});
        if (!fusion.empty()) overrides.push_back({"fusion.stat", fusion});
        if (!binarizer.empty()) overrides.push_back({"binarize.mode", binarizer});
        if (!ocr.empty()) overrides.push_back({"ocr.engine", ocr});
        if (!dict.empty()) overrides.push_back({"dict.path", dict});
        if (!bank.empty()) overrides.push_back({"binarize.bank", bank});
        if (color_dist >= 0) overrides.push_back({"binarize.color_dist", std::to_string(color_dist)});
    });

    // --- synth ------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic caption scene + ground truth");
    vocr::SceneSpec spec;
    std::string synth_out, bg_mode = "blocks";
    int frames = 12, blur = 0, pad = 3, fg = 0, width = 160, height = 120, block = 16;
    int bg_lo = 210, bg_hi = 245;
    double noise = 0.0;
    std::uint64_t seed = 1;
    bool color = false;
    synth->add_option("--out", synth_out, "output scene directory")->required();
    synth->add_option("--text", spec.text, "caption text (builtin charset: A-Z 0-9 space)")
        ->required();
    synth->add_option("--frames", frames, "frame count");
    synth->add_option("--seed", seed, "generator seed");
    synth->add_option("--bg", bg_mode, "solid|hscroll|blocks");
    synth->add_option("--noise", noise, "gaussian noise sigma");
    synth->add_option("--blur", blur, "box blur passes");
    synth->add_option("--fg", fg, "caption gray level");
    synth->add_option("--width", width, "frame width");
    synth->add_option("--height", height, "frame height");
    synth->add_option("--block", block, "background block size");
    synth->add_option("--bg-lo", bg_lo, "background gray low bound");
    synth->add_option("--bg-hi", bg_hi, "background gray high bound");
    synth->add_option("--pad", pad, "caption rect padding");
    synth->add_flag("--color", color, "emit RGB frames");

    // --- train-filters ------------------------------------------------------
    auto* train = app.add_subcommand("train-filters", "train the stroke filter bank");
    std::string train_out, samples_list;
    int k = 5;
    train->add_option("--out", train_out, "output .sfb path")->required();
    train->add_option("--k", k, "kernel size (odd)");
    train->add_option("--samples", samples_list,
                      "marked sample list ('<direction> <pgm>' per line); default: builtin strokes");

    // --- eval ---------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "score a run against scene ground truth");
    std::vector<std::string> truth_dirs, run_dirs;
    eval->add_option("--truth", truth_dirs, "scene directory (repeatable)")->required();
    eval->add_option("--run", run_dirs, "run output directory (repeatable)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(in_dir, out_dir, config_path, overrides);
        if (synth->parsed()) {
            if (bg_mode == "solid") spec.background = vocr::BackgroundMode::solid;
            else if (bg_mode == "hscroll") spec.background = vocr::BackgroundMode::hscroll;
            else if (bg_mode == "blocks") spec.background = vocr::BackgroundMode::blocks;
            else {
                std::cerr << "unknown background mode: " << bg_mode << "\n";
                return 3;
            }
            spec.frame_count = frames;
            spec.noise_sigma = noise;
            spec.blur_radius = blur;
            spec.seed = seed;
            spec.fg = static_cast<std::uint8_t>(fg);
            spec.width = width;
            spec.height = height;
            spec.block_size = block;
            spec.bg_lo = static_cast<std::uint8_t>(bg_lo);
            spec.bg_hi = static_cast<std::uint8_t>(bg_hi);
            spec.color = color;
            return cmd_synth(spec, synth_out, pad);
        }
        if (train->parsed()) return cmd_train(train_out, k, samples_list);
        if (eval->parsed()) return cmd_eval(truth_dirs, run_dirs);
    } catch (const vocr::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const vocr::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

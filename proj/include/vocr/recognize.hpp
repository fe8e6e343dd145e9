#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vocr/binarize.hpp"
#include "vocr/glyphs.hpp"

namespace vocr {

struct Recognition {
    std::string text;
    std::vector<double> confidences;  // one per character, in [0,1]
    enum class Engine { builtin, external } engine = Engine::builtin;
    int track_id = 0;
    int first_frame = 0;
    int last_frame = 0;
};

// External OCR adapter: a shell command template with `{in}` replaced by
// the path of a PBM (P4) image; trimmed stdout becomes the text. Nonzero
// exit or timeout raises EngineError.
struct OcrAdapterSpec {
    std::string command_template;  // must contain "{in}" exactly once
    double timeout_seconds = 10.0;

    void validate() const;
};

// Vertical projection segmentation: zero-foreground columns separate glyph
// boxes; each box is the tight bounding box of a maximal run of non-empty
// columns. Boxes come back left to right.
std::vector<Rect> segment_glyphs(const BinaryTextImage& img);

// Nearest-template classification. The box and every template are tight-
// cropped and scale-normalized to the glyph cell by nearest neighbor;
// confidence is the fraction of agreeing cell pixels. Ties resolve in
// charset order. Space (blank template) never competes.
std::pair<char, double> match_glyph(const BinaryTextImage& img, const Rect& box,
                                    const GlyphSet& glyphs);

// Builtin path: segment + match, with a space inserted wherever the gap
// between consecutive boxes exceeds 1.5x the median gap. External path:
// write the image as PBM, run the adapter, read stdout (uniform
// confidence 0.5).
Recognition recognize_track(const BinaryTextImage& img, const GlyphSet& glyphs,
                            const std::optional<OcrAdapterSpec>& adapter = std::nullopt);

}  // namespace vocr

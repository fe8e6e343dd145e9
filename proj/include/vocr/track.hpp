#pragma once

#include <vector>

#include "vocr/detect.hpp"
#include "vocr/raster.hpp"

namespace vocr {

struct TrackParams {
    double min_iou = 0.5;   // association threshold
    int max_gap = 2;        // frames a track may go unseen before closing
    int min_length = 3;     // tracks shorter than this are discarded
    int search_radius = 10; // alignment search window, pixels
    bool use_ncc = false;   // NCC alignment instead of SAD

    void validate() const;
};

struct TrackInstance {
    int frame_index = 0;
    Rect rect;          // detection rect normalized to the reference size
    Rect raw_rect;      // rect as detected
    int dx = 0;         // alignment offset relative to the reference patch
    int dy = 0;
    bool align_fallback = false;  // every candidate offset was out of bounds
};

struct TextTrack {
    enum class Status { active, closed };

    int id = 0;
    std::vector<TrackInstance> instances;
    Rect reference;  // first instance rect; all instances share its size
    Status status = Status::active;

    int first_frame() const { return instances.front().frame_index; }
    int last_frame() const { return instances.back().frame_index; }
};

// Stateful frame-by-frame association. Feed detections in frame order,
// then finalize().
class Tracker {
public:
    explicit Tracker(TrackParams params);

    // Greedy IoU matching of frame-t detections against active tracks.
    // Detections must all carry frame index t, strictly after every active
    // track's last frame.
    void associate(const std::vector<TextRegion>& detections, int frame_index);

    // Close everything, drop tracks shorter than min_length, reindex ids
    // densely in first-frame order.
    std::vector<TextTrack> finalize();

private:
    TrackParams params_;
    std::vector<TextTrack> active_;
    std::vector<TextTrack> closed_;
    int next_id_ = 0;
};

// Compute per-instance integer offsets against the reference (first)
// instance by exhaustive SAD (or NCC) search over [-r, r]^2. Ties prefer
// smaller |dx|+|dy|, then smaller dy, then smaller dx. Candidates whose
// window leaves the frame are skipped; if none remain the offset is (0,0)
// with the fallback flag set.
void align(const std::vector<Frame>& frames, TextTrack& track, const TrackParams& params);

// Convenience for whole sequences: run associate over per-frame detection
// lists (indexed as frames) and finalize.
std::vector<TextTrack> build_tracks(const std::vector<std::vector<TextRegion>>& per_frame,
                                    const std::vector<int>& frame_indices,
                                    const TrackParams& params);

// Grow a finalized track's rects by `margin` pixels on every side, clamped
// to the frame. Detected bands erode at caption tails where edge density
// thins; the margin restores context before alignment and fusion.
void expand_track(TextTrack& track, int margin, int frame_width, int frame_height);

}  // namespace vocr

#include "vocr/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vocr {

void TrackParams::validate() const {
    if (min_iou <= 0.0 || min_iou > 1.0) throw UsageError("track min IoU must lie in (0,1]");
    if (max_gap < 0) throw UsageError("max gap must be nonnegative");
    if (min_length < 1) throw UsageError("min track length must be positive");
    if (search_radius < 1) throw UsageError("search radius must be positive");
}

Tracker::Tracker(TrackParams params) : params_(params) { params_.validate(); }

void Tracker::associate(const std::vector<TextRegion>& detections, int frame_index) {
    for (const auto& det : detections)
        if (det.frame_index != frame_index)
            throw UsageError("detections from mixed frames passed to associate");
    for (const auto& track : active_)
        if (track.last_frame() >= frame_index)
            throw UsageError("associate called out of frame order");

    // All candidate pairs above threshold, greedily matched in descending
    // IoU; ties broken by (track id, detection order) for determinism.
    struct Pair {
        double iou;
        int track_pos;
        int det_pos;
    };
    std::vector<Pair> pairs;
    for (int t = 0; t < static_cast<int>(active_.size()); ++t)
        for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
            const double iou = rect_iou(active_[t].instances.back().raw_rect,
                                        detections[d].rect);
            if (iou >= params_.min_iou) pairs.push_back({iou, t, d});
        }
    std::sort(pairs.begin(), pairs.end(), [this](const Pair& a, const Pair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.track_pos != b.track_pos)
            return active_[a.track_pos].id < active_[b.track_pos].id;
        return a.det_pos < b.det_pos;
    });

    std::vector<bool> track_used(active_.size(), false);
    std::vector<bool> det_used(detections.size(), false);
    for (const auto& pair : pairs) {
        if (track_used[pair.track_pos] || det_used[pair.det_pos]) continue;
        track_used[pair.track_pos] = true;
        det_used[pair.det_pos] = true;
        TextTrack& track = active_[pair.track_pos];
        const Rect raw = detections[pair.det_pos].rect;
        track.instances.push_back({frame_index, raw, raw, 0, 0, false});
    }

    for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
        if (det_used[d]) continue;
        TextTrack track;
        track.id = next_id_++;
        track.reference = detections[d].rect;
        track.instances.push_back({frame_index, detections[d].rect, detections[d].rect, 0, 0, false});
        active_.push_back(std::move(track));
    }

    // Retire tracks unseen for more than max_gap frames.
    std::vector<TextTrack> still_active;
    for (auto& track : active_) {
        if (frame_index - track.last_frame() > params_.max_gap) {
            track.status = TextTrack::Status::closed;
            closed_.push_back(std::move(track));
        } else {
            still_active.push_back(std::move(track));
        }
    }
    active_ = std::move(still_active);
}

std::vector<TextTrack> Tracker::finalize() {
    for (auto& track : active_) {
        track.status = TextTrack::Status::closed;
        closed_.push_back(std::move(track));
    }
    active_.clear();

    std::vector<TextTrack> out;
    for (auto& track : closed_) {
        if (static_cast<int>(track.instances.size()) < params_.min_length) continue;
        // Normalize every instance rect to the reference dimensions,
        // anchored at the detected top-left, clamped into non-negative
        // coordinates (frame-bound clamping happens at sampling time).
        track.reference = track.instances.front().raw_rect;
        for (auto& inst : track.instances) {
            inst.rect = Rect{std::max(0, inst.raw_rect.x), std::max(0, inst.raw_rect.y),
                             track.reference.w, track.reference.h};
        }
        out.push_back(std::move(track));
    }
    closed_.clear();
    std::sort(out.begin(), out.end(), [](const TextTrack& a, const TextTrack& b) {
        if (a.first_frame() != b.first_frame()) return a.first_frame() < b.first_frame();
        return a.id < b.id;
    });
    for (int i = 0; i < static_cast<int>(out.size()); ++i) out[i].id = i;
    return out;
}

namespace {

const Frame* frame_with_index(const std::vector<Frame>& frames, int index) {
    for (const auto& f : frames)
        if (f.index == index) return &f;
    return nullptr;
}

double patch_cost_sad(const GrayImage& ref, const GrayImage& img, int x0, int y0) {
    double sad = 0;
    for (int y = 0; y < ref.height; ++y)
        for (int x = 0; x < ref.width; ++x)
            sad += std::abs(static_cast<int>(ref.at(x, y)) - static_cast<int>(img.at(x0 + x, y0 + y)));
    return sad;
}

// Negated NCC so both metrics minimize.
double patch_cost_ncc(const GrayImage& ref, const GrayImage& img, int x0, int y0) {
    const long n = static_cast<long>(ref.width) * ref.height;
    double sa = 0, sb = 0;
    for (int y = 0; y < ref.height; ++y)
        for (int x = 0; x < ref.width; ++x) {
            sa += ref.at(x, y);
            sb += img.at(x0 + x, y0 + y);
        }
    const double ma = sa / n, mb = sb / n;
    double dot = 0, na = 0, nb = 0;
    for (int y = 0; y < ref.height; ++y)
        for (int x = 0; x < ref.width; ++x) {
            const double a = ref.at(x, y) - ma;
            const double b = img.at(x0 + x, y0 + y) - mb;
            dot += a * b;
            na += a * a;
            nb += b * b;
        }
    if (na <= 0 || nb <= 0) return 0.0;
    return -(dot / std::sqrt(na * nb));
}

}  // namespace

void align(const std::vector<Frame>& frames, TextTrack& track, const TrackParams& params) {
    params.validate();
    if (track.instances.empty()) throw UsageError("align on an empty track");

    const TrackInstance& first = track.instances.front();
    const Frame* ref_frame = frame_with_index(frames, first.frame_index);
    if (!ref_frame) throw UsageError("reference frame missing from sequence");
    const GrayImage ref_gray = to_gray(*ref_frame);
    check_rect_in(first.rect, ref_gray.width, ref_gray.height);
    const GrayImage ref_patch = crop_gray(ref_gray, first.rect);

    track.instances.front().dx = 0;
    track.instances.front().dy = 0;

    const int r = params.search_radius;
    for (std::size_t i = 1; i < track.instances.size(); ++i) {
        TrackInstance& inst = track.instances[i];
        const Frame* frame = frame_with_index(frames, inst.frame_index);
        if (!frame) throw UsageError("instance frame missing from sequence");
        const GrayImage gray = to_gray(*frame);

        double best_cost = std::numeric_limits<double>::infinity();
        int best_dx = 0, best_dy = 0, best_l1 = 0;
        bool found = false;
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                const int x0 = inst.rect.x + dx, y0 = inst.rect.y + dy;
                if (x0 < 0 || y0 < 0 || x0 + inst.rect.w > gray.width ||
                    y0 + inst.rect.h > gray.height)
                    continue;  // candidate window leaves the frame
                const double cost = params.use_ncc ? patch_cost_ncc(ref_patch, gray, x0, y0)
                                                   : patch_cost_sad(ref_patch, gray, x0, y0);
                const int l1 = std::abs(dx) + std::abs(dy);
                bool better = false;
                if (!found || cost < best_cost) {
                    better = true;
                } else if (cost == best_cost) {
                    if (l1 != best_l1) better = l1 < best_l1;
                    else if (dy != best_dy) better = dy < best_dy;
                    else better = dx < best_dx;
                }
                if (better) {
                    found = true;
                    best_cost = cost;
                    best_dx = dx;
                    best_dy = dy;
                    best_l1 = l1;
                }
            }
        inst.dx = found ? best_dx : 0;
        inst.dy = found ? best_dy : 0;
        inst.align_fallback = !found;
    }
}

void expand_track(TextTrack& track, int margin, int frame_width, int frame_height) {
    if (margin <= 0 || track.instances.empty()) return;
    const Rect ref = track.reference;
    Rect grown;
    grown.x = std::max(0, ref.x - margin);
    grown.y = std::max(0, ref.y - margin);
    grown.w = std::min(frame_width, ref.right() + margin) - grown.x;
    grown.h = std::min(frame_height, ref.bottom() + margin) - grown.y;
    const int shift_x = ref.x - grown.x;  // how far the reference actually grew leftwards
    const int shift_y = ref.y - grown.y;
    track.reference = grown;
    for (auto& inst : track.instances) {
        inst.rect.x = std::clamp(inst.raw_rect.x - shift_x, 0, frame_width - grown.w);
        inst.rect.y = std::clamp(inst.raw_rect.y - shift_y, 0, frame_height - grown.h);
        inst.rect.w = grown.w;
        inst.rect.h = grown.h;
    }
}

std::vector<TextTrack> build_tracks(const std::vector<std::vector<TextRegion>>& per_frame,
                                    const std::vector<int>& frame_indices,
                                    const TrackParams& params) {
    if (per_frame.size() != frame_indices.size())
        throw UsageError("per-frame detections and frame indices disagree");
    Tracker tracker(params);
    for (std::size_t i = 0; i < per_frame.size(); ++i)
        tracker.associate(per_frame[i], frame_indices[i]);
    return tracker.finalize();
}

}  // namespace vocr

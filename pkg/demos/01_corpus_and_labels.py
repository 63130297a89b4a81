"""
Corpus basics: records, JSONL round-trip, label propagation
===========================================================

A corpus is a set of channel records plus per-video ground-truth
annotations.  Channels inherit labels from their videos: one disturbing
video is enough to mark the whole channel disturbing.
"""

from pathlib import Path

from channel_audit.corpus import (
    ChannelRecord,
    Corpus,
    StatusReason,
    StatusReport,
    VideoLabel,
    VideoRecord,
    load_corpus,
    propagate_labels,
    save_corpus,
    status_breakdown,
)

# three hand-made channels: a family vlog, a channel that slipped into
# disturbing uploads, and one that has already been terminated
channels = [
    ChannelRecord(
        channel_id="family01",
        description="Wholesome crafts and bedtime stories ❤",
        keywords=["crafts", "stories", "kids"],
        view_count=120_000,
        video_count=48,
        subscriber_count=3_500,
    ),
    ChannelRecord(
        channel_id="mixed02",
        description="Surprise eggs, pranks, and MORE!!!",
        keywords=["surprise", "pranks"],
        view_count=2_400_000,
        video_count=310,
        subscriber_count=41_000,
    ),
    ChannelRecord(
        channel_id="gone03",
        description="",
        status=StatusReport.gone(
            StatusReason.TERMS_OF_SERVICE,
            raw_message="This account has been terminated for violating "
            "YouTube's Terms of Service.",
        ),
    ),
]

videos = [
    VideoRecord(video_id="v1", channel_id="family01", label=VideoLabel.SUITABLE),
    VideoRecord(video_id="v2", channel_id="family01", label=VideoLabel.SUITABLE),
    VideoRecord(video_id="v3", channel_id="mixed02", label=VideoLabel.SUITABLE),
    VideoRecord(video_id="v4", channel_id="mixed02", label=VideoLabel.DISTURBING),
    VideoRecord(
        video_id="v5",
        channel_id="gone03",
        label=VideoLabel.DISTURBING,
        status=StatusReport.gone(StatusReason.ACCOUNT_TERMINATED),
    ),
]

corpus = Corpus(channels, videos)

# one disturbing video flips the channel label
print("propagated channel labels:")
for channel_id, label in propagate_labels(corpus).items():
    print(f"  {channel_id}: {label.value.value} "
          f"(disturbing ratio {label.disturbing_ratio:.2f})")

# availability of everything ever labeled disturbing
print("\nstatus of disturbing-labeled videos:")
for reason, share in status_breakdown(corpus, VideoLabel.DISTURBING).items():
    print(f"  {reason.value}: {share:.0f}%")

# the JSONL file is the canonical on-disk format; round-trips exactly
path = Path("/tmp/demo-corpus.jsonl")
save_corpus(corpus, path)
reloaded = load_corpus(path)
assert [c.channel_id for c in reloaded.channels] == [c.channel_id for c in channels]
print(f"\nsaved and reloaded {len(reloaded.channels)} channels "
      f"and {len(reloaded.videos)} videos via {path}")

# hidden subscriber counts stay absent, never zero
hidden = ChannelRecord(channel_id="shy04", hidden_subscribers=True)
print(f"\nhidden subscriber count round-trips as: {hidden.subscriber_count!r}")

"""
Text signals: polarity, emotions, and emoji sentiment
=====================================================

Every text-derived feature comes from three offline scorers: a polarity
lexicon with negation handling, an eight-emotion lexicon, and an emoji
sentiment ranking.  All three ship with the package as CSV data files.
"""

from channel_audit.textlytics import (
    default_emoji_table,
    emoji_stats,
    emotions,
    extract_emojis,
    polarity,
    top_emojis,
)

# --- polarity: dual scale, strongest positive and strongest negative -------
for text in [
    "What a wonderful, lovely day",
    "This is a cruel and horrible prank",
    "not bad at all",          # negation flips the negative evidence
    "just a plain sentence",
]:
    score = polarity(text)
    print(f"{text!r:42} -> positive {score.positive}, "
          f"negative {score.negative}, combined {score.combined:+d}")

# --- emotions: fractions of matched lexicon tokens --------------------------
profile = emotions("A terrifying surprise ruined the happy party")
print("\nemotion profile:")
for name, value in sorted(profile.as_dict().items(), key=lambda kv: -kv[1]):
    if value > 0:
        print(f"  {name}: {value:.2f}")

# --- emoji: extraction, per-emoji scores, aggregate stats -------------------
table = default_emoji_table()
text = "new video!! ❤❤😍 stay safe ☣"
found = extract_emojis(text)
print(f"\nemojis in {text!r}: {found}")
for emoji in dict.fromkeys(found):
    print(f"  {emoji} U+{ord(emoji):04X} -> score {table.score(emoji)}")

stats = emoji_stats(text)
print(f"occurrences {stats.total}, mean score {stats.mean_score:.3f}, "
      f"unscored {sorted(stats.unscored)}")

# --- most frequent emojis across a corpus slice -----------------------------
from channel_audit.corpus import ChannelRecord

slice_ = [
    ChannelRecord(channel_id=f"c{i}", description=text)
    for i, text in enumerate([
        "subscribe now ❤", "amazing ❤😍", "fun 😂😂", "love it ❤",
        "wow 😍", "party 🎉", "cats 🐱🐱🐱",
    ])
]
print("\ntop emojis over a small corpus slice:")
for emoji, count, score in top_emojis(slice_, k=3):
    print(f"  {emoji} x{count} (score {score})")

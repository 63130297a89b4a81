"""
Moderation workflow: ranked queue, decisions, and retraining
============================================================

The service wraps a trained model in a small JSON API: moderators pull a
severity-ranked queue, record decisions, and trigger retraining once
enough new ground truth has accumulated.  Confirmed decisions override
the propagated labels on the next training run.
"""

import time
import warnings

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from channel_audit.corpus import propagate_labels
from channel_audit.features import (
    FeatureSpec,
    build_vocabularies,
    extract_matrix,
    preprocess,
)
from channel_audit.learners import rank_channels, train
from channel_audit.service import create_app, default_trainer
from channel_audit.synthetic import generate_corpus

corpus = generate_corpus(n_channels=150, seed=8)
labels = propagate_labels(corpus)
vocabs = build_vocabularies(corpus.channels)
matrix = extract_matrix(corpus, FeatureSpec(), vocabs=vocabs, channel_labels=labels)
matrix, _ = preprocess(matrix)
model = train(
    "rf",
    matrix.values,
    matrix.labels,
    seed=7,
    feature_names=matrix.names,
    feature_spec=FeatureSpec(),
    vocabularies=vocabs,
)

# --- library-level ranking with per-group attributions ----------------------
ranked = rank_channels(model, corpus)
print("top of the review queue:")
for entry in ranked[:5]:
    drivers = sorted(entry.attributions.items(), key=lambda kv: (-kv[1], kv[0]))[:2]
    driver_text = ", ".join(f"{group} +{delta:.3f}" for group, delta in drivers)
    print(f"  {entry.channel_id}: severity {entry.score:.3f}  ({driver_text})")

# --- the same queue over the JSON API ----------------------------------------
client = TestClient(
    create_app(
        corpus=corpus,
        model=model,
        trainer=lambda c, lab, seed: default_trainer(c, lab, seed, folds=3),
    )
)
health = client.get("/v1/health").json()
print(f"\nservice up: {health['channels']} channels, model v{health['model_version']}")

top = client.get("/v1/queue", params={"limit": 1}).json()["entries"][0]
print(f"highest-severity channel: {top['channel_id']} "
      f"(probability {top['probability']:.3f}, {top['decision_state']})")

# a moderator confirms the top entry
response = client.post(
    f"/v1/channels/{top['channel_id']}/decision",
    json={"decision": "confirm_disturbing", "moderator_id": "mod-7",
          "note": "verified violent thumbnails"},
)
print(f"decision recorded: HTTP {response.status_code}")

undecided = client.get("/v1/queue", params={"filter": "undecided"}).json()
assert all(e["channel_id"] != top["channel_id"] for e in undecided["entries"])
print(f"undecided queue shrank to {undecided['total']} entries")

# --- retraining folds the confirmation back into the labels -----------------
job_id = client.post("/v1/retrain").json()["job_id"]
for _ in range(600):
    job = client.get(f"/v1/jobs/{job_id}").json()
    if job["status"] != "running":
        break
    time.sleep(0.1)
print(f"\nretrain job {job_id}: {job['status']}")
health = client.get("/v1/health").json()
print(f"model version after retrain: v{health['model_version']}")

print("\ndecision export:")
print(client.get("/v1/decisions/export").text.strip())

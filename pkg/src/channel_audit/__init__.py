"""channel_audit: channel-level moderation pipeline.

Subpackages and modules:

    corpus      Data model and JSONL persistence for channels, videos and
                community posts, plus video-to-channel label propagation.
    collector   Fixture/HTTP clients, page-status parsing, a polite crawler
                and the bundled mock server it is tested against.
    textlytics  Lexicon polarity scoring, eight-emotion profiles and
                grapheme-aware emoji extraction with sentiment ranking.
    features    Channel feature vectors: vocabularies, group encodings,
                log transforms and variance filtering.
    stats       Two-sample Kolmogorov-Smirnov screening, ECDF reports and
                information-gain attribute ranking with MDL discretization.
    learners    From-scratch classifiers (random forest, logistic regression,
                naive Bayes, MLP, LogitBoost, probability-averaging ensemble),
                stratified cross-validation and weighted evaluation metrics.
    service     HTTP review-queue facade with durable moderator decisions
                and background retraining.
    synthetic   Seeded corpus generator used by demos and the test suite.
"""

__version__ = "0.1.0"

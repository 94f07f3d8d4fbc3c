"""Regenerates data/mini: a 10-document dataset with a matching embedding table.

Vectors are hashed bags of Porter stems, so the table covers every string the
pipeline embeds: phrases, document texts, full queries and prefix queries.
"""
import hashlib
import json
import math
import pathlib
import re

from nltk.stem.porter import PorterStemmer

DIM = 32
OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "mini"
STEMMER = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)

DOCS = [
    ("d01", "Online cursive word recognition using pseudo online information",
     "We present an online cursive word recognition system that combines an offline representation "
     "with stroke order independent features. Classification decisions from a single engine are "
     "merged using pseudo online information recovered from handwriting images.",
     "online ; cursive ; word recognition ; offline ; handwriting ; classifier combination",
     "online cursive word recognition ; pseudo online information ; stroke order independent ; "
     "classification decisions ; single engine ; offline representation"),
    ("d02", "Sparse attention for long document summarization",
     "Transformer models struggle with long inputs because attention cost grows quadratically. "
     "We propose a sparse attention pattern that keeps local windows and a few global tokens, and "
     "evaluate abstractive summarization of scientific articles.",
     "sparse attention ; long document summarization ; transformer ; abstractive summarization",
     "sparse attention ; transformer ; long inputs ; global tokens ; scientific articles"),
    ("d03", "Federated learning with differential privacy",
     "Clients train a shared model without sending raw data to a server. We add calibrated noise "
     "to client updates to obtain differential privacy guarantees and study the accuracy cost on "
     "image classification benchmarks.",
     "federated learning ; differential privacy ; client updates ; privacy guarantees",
     "federated learning ; differential privacy ; calibrated noise ; image classification"),
    ("d04", "Graph neural networks for molecule property prediction",
     "Molecules are naturally represented as graphs of atoms and bonds. We train message passing "
     "graph neural networks to predict solubility and toxicity and compare them with fingerprint "
     "baselines.",
     "graph neural network ; molecular property prediction ; message passing ; drug discovery",
     "graph neural networks ; message passing ; molecules ; solubility ; toxicity ; fingerprint baselines"),
    ("d05", "Query expansion with pseudo relevance feedback",
     "Short queries often miss relevant documents. We expand queries with terms from the top ranked "
     "documents and rerank results with BM25, improving recall on ad hoc retrieval collections.",
     "query expansion ; pseudo relevance feedback ; ad hoc retrieval ; bm25",
     "query expansion ; relevance feedback ; bm25 ; recall ; ranked documents"),
    ("d06", "Energy efficient scheduling in wireless sensor networks",
     "Sensor nodes run on batteries, so radio usage dominates lifetime. We schedule sleep cycles "
     "across nodes to preserve coverage while reducing energy consumption in wireless sensor networks.",
     "wireless sensor networks ; energy efficiency ; sleep scheduling ; network lifetime ; coverage",
     "wireless sensor networks ; sleep cycles ; energy consumption ; sensor nodes ; batteries"),
    ("d07", "Contrastive learning of phrase embeddings",
     "Phrase representations from pretrained encoders are anisotropic. Contrastive learning with "
     "dropout noise pulls duplicate encodings together and spreads unrelated phrases apart, improving "
     "semantic similarity.",
     "contrastive learning ; phrase embeddings ; semantic similarity ; anisotropy",
     "contrastive learning ; phrase representations ; dropout noise ; pretrained encoders ; semantic similarity"),
    ("d08", "Robust speech recognition in noisy environments",
     "Speech recognition degrades under background noise. We train acoustic models with data "
     "augmentation and a denoising front end and report word error rate on noisy benchmarks.",
     "speech recognition ; noise robustness ; data augmentation ; acoustic model ; word error rate",
     "speech recognition ; background noise ; data augmentation ; denoising front end ; word error rate ; noise"),
    ("d09", "Static analysis for detecting memory leaks",
     "Memory leaks in long running C programs are hard to find. We present an interprocedural static "
     "analysis that tracks allocation ownership and reports leaks with few false positives.",
     "static analysis ; memory leaks ; c programs ; ownership",
     "static analysis ; memory leak detection ; interprocedural analysis ; false positives"),
    ("d10", "Crowdsourced annotation quality control",
     "Labels collected from crowd workers are noisy. We estimate worker reliability with an "
     "expectation maximization model and aggregate labels, reducing annotation cost.",
     "crowdsourcing ; annotation quality ; worker reliability ; label aggregation",
     "crowd workers ; worker reliability ; expectation maximization ; label aggregation ; annotation cost ; crowd workers"),
]

PAIRS = [
    ("convolutional neural network", "cnn convolutional network"),
    ("support vector machine", "support vector machines"),
    ("bm25", "okapi bm25"),
    ("word error rate", "word error rates"),
    ("wireless sensor networks", "wireless sensor network"),
    ("differential privacy", "differentially private learning"),
]

EXTRA_PHRASES = ["machine translation", "image segmentation", "reinforcement learning",
                 "knowledge graph", "topic model"]


def tokens(text):
    out = []
    for t in text.split():
        t = t.strip("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~").lower()
        if t:
            out.append(t)
    return out


def stem_vector(stem):
    digest = hashlib.sha256(stem.encode()).digest()
    return [(b - 127.5) / 127.5 for b in digest[:DIM]]


def embed(text):
    v = [0.0] * DIM
    for t in tokens(text):
        for i, x in enumerate(stem_vector(STEMMER.stem(t))):
            v[i] += x
    if math.sqrt(sum(x * x for x in v)) == 0:
        raise ValueError(f"zero vector for {text!r}")
    return [round(x, 6) for x in v]


def phrases(s):
    return [p.strip() for p in s.split(";") if p.strip()]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    texts = set(EXTRA_PHRASES)
    with open(OUT / "instances.jsonl", "w") as f:
        for doc_id, title, abstract, refs, preds in DOCS:
            f.write(json.dumps({"id": doc_id, "title": title, "abstract": abstract,
                                "references": refs, "predictions": preds}) + "\n")
            texts.add(title + " " + abstract)
            rp, pp = phrases(refs), phrases(preds)
            texts.update(rp)
            texts.update(pp)
            for j in range(1, len(pp) + 1):
                texts.add(" ; ".join(pp[:j]))
    for a, b in PAIRS:
        texts.update((a, b))
    with open(OUT / "embeddings.jsonl", "w") as f:
        for t in sorted(texts):
            f.write(json.dumps({"phrase": t, "vector": embed(t)}) + "\n")
    with open(OUT / "pairs.jsonl", "w") as f:
        for a, b in PAIRS:
            f.write(json.dumps({"phrase": a, "variant": b}) + "\n")
    with open(OUT / "human.jsonl", "w") as f:
        for doc_id, *_ in DOCS:
            for dim in ("saliency", "naturalness", "faithfulness", "coverage", "diversity", "utility"):
                h = hashlib.sha256(f"{doc_id}/{dim}".encode()).digest()
                f.write(json.dumps({"input_id": doc_id, "system_id": "mini",
                                    "dimension": dim, "value": 1 + h[0] % 5}) + "\n")


if __name__ == "__main__":
    main()

"""Command-line front end for the similarity pipeline.

Stages are file-mediated: every step reads and writes artifacts in the
working directory, so a full run can be reproduced or resumed stage by
stage and every intermediate is inspectable. Exit codes: 0 success,
1 usage/config error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys

from . import corpus as corpus_mod
from . import embed as embed_mod
from . import evaluate as eval_mod
from . import expert as expert_mod
from . import graph as graph_mod
from . import sim as sim_mod
from . import synth as synth_mod
from . import topics as topics_mod
from .errors import InvalidConfig, JurisimError

DEFAULT_CONFIG: dict = {
    "corpus": None,
    "features": None,
    "schema": None,  # None -> bundled default schema
    "workdir": ".",
    "tokenizer": "pretokenized",
    "min_df": 1,
    "tfidf_filter": False,
    "top_m": None,  # None -> keep the full vocabulary
    "lda": {
        "k": 8,
        "alpha": None,  # None -> 50 / k
        "beta": 0.01,
        "iterations": 500,
        "burn_in": 250,
        "threshold": 0.2,
        "top_words": 10,
        "seed": 0,
    },
    "graph": {
        "include_topics": True,
        "include_courts": True,
        "topic_edge_weight": "theta",
    },
    "node2vec": {
        "p": 1.0,
        "q": 1.0,
        "walk_length": 80,
        "walks_per_node": 10,
        "window": 10,
        "dim": 128,
        "negatives": 5,
        "epochs": 5,
        "learning_rate": 0.025,
        "seed": 0,
    },
    "tau": 0.1,
    "seed": None,  # set -> overrides every stage seed
    "synth": {
        "n_cases": 30,
        "n_articles": 12,
        "n_clusters": 3,
        "seed": 0,
    },
}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors, matching the CLI contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


class StageError(Exception):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key in out and isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise InvalidConfig(f"cannot read config file {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"config file {path!r} is not valid JSON: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise InvalidConfig("config file must contain a JSON object")
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        cfg = _merge(cfg, file_cfg)
    cfg = _merge(cfg, overrides)
    if cfg.get("seed") is not None:
        seed = int(cfg["seed"])
        cfg["lda"]["seed"] = seed
        cfg["node2vec"]["seed"] = seed
        cfg["synth"]["seed"] = seed
    return cfg


def _workpath(cfg: dict, name: str) -> str:
    return os.path.join(cfg["workdir"], name)


def _lda_config(cfg: dict) -> topics_mod.LdaConfig:
    lc = cfg["lda"]
    return topics_mod.LdaConfig(
        k=lc["k"], alpha=lc["alpha"], beta=lc["beta"],
        iterations=lc["iterations"], burn_in=lc["burn_in"], seed=lc["seed"],
    )


def _n2v_config(cfg: dict) -> embed_mod.Node2vecConfig:
    nc = cfg["node2vec"]
    return embed_mod.Node2vecConfig(
        p=nc["p"], q=nc["q"], walk_length=nc["walk_length"],
        walks_per_node=nc["walks_per_node"], window=nc["window"], dim=nc["dim"],
        negatives=nc["negatives"], epochs=nc["epochs"],
        learning_rate=nc["learning_rate"], seed=nc["seed"],
    )


def _load_schema(cfg: dict) -> expert_mod.FeatureSchema:
    if cfg.get("schema"):
        return expert_mod.load_schema(cfg["schema"])
    return expert_mod.default_schema()


# stage implementations ---------------------------------------------------

def stage_synth(cfg: dict) -> None:
    sc = cfg["synth"]
    config = synth_mod.SynthConfig(
        n_cases=sc["n_cases"], n_articles=sc["n_articles"],
        n_clusters=sc["n_clusters"], seed=sc["seed"],
    )
    corpus_path = cfg.get("corpus") or _workpath(cfg, "corpus.jsonl")
    features_path = cfg.get("features") or _workpath(cfg, "features.csv")
    synth_mod.synth_corpus(config, corpus_path, features_path, _load_schema(cfg))
    print(f"wrote {corpus_path} and {features_path}", file=sys.stderr)


def stage_ingest(cfg: dict) -> None:
    if not cfg.get("corpus"):
        raise InvalidConfig("no corpus path configured")
    judgments = corpus_mod.load_corpus(cfg["corpus"])
    _, dtm = corpus_mod.build_dtm(judgments, mode=cfg["tokenizer"], min_df=cfg["min_df"])
    if cfg["tfidf_filter"]:
        weighted = corpus_mod.tfidf_transform(dtm)
        top_m = cfg["top_m"] if cfg["top_m"] is not None else len(dtm.vocab)
        dtm = corpus_mod.filter_vocabulary(dtm, weighted, top_m)
    with open(_workpath(cfg, "dtm.json"), "w", encoding="utf-8") as fh:
        json.dump(corpus_mod.dtm_to_json(dtm), fh)


def stage_features(cfg: dict) -> None:
    if not cfg.get("features"):
        raise InvalidConfig("no features path configured")
    schema = _load_schema(cfg)
    table = expert_mod.load_features(cfg["features"], schema)
    matrix = expert_mod.encode(table)
    expert_mod.write_feature_matrix(matrix, _workpath(cfg, "features_encoded.csv"))


def stage_lda(cfg: dict) -> None:
    with open(_workpath(cfg, "dtm.json"), encoding="utf-8") as fh:
        dtm = corpus_mod.dtm_from_json(json.load(fh))
    model = topics_mod.fit_lda(dtm, _lda_config(cfg))
    topics_mod.save_model(model, _workpath(cfg, "lda_model.json"))
    n = min(cfg["lda"]["top_words"], len(model.terms))
    topics_mod.write_top_words(model, n, _workpath(cfg, "top_words.txt"))


def stage_graph(cfg: dict) -> None:
    judgments = corpus_mod.load_corpus(cfg["corpus"])
    assignment = None
    if cfg["graph"]["include_topics"]:
        model = topics_mod.load_model(_workpath(cfg, "lda_model.json"))
        assignment = topics_mod.assign_topics(model, cfg["lda"]["threshold"])
    g = graph_mod.build_graph(
        judgments,
        assignment,
        include_topics=cfg["graph"]["include_topics"],
        include_courts=cfg["graph"]["include_courts"],
        topic_edge_weight=cfg["graph"]["topic_edge_weight"],
    )
    graph_mod.save_graph(g, _workpath(cfg, "graph.tsv"))
    with open(_workpath(cfg, "graph_report.json"), "w", encoding="utf-8") as fh:
        json.dump(graph_mod.graph_stats(g), fh, indent=2)


def stage_embed(cfg: dict) -> None:
    g = graph_mod.load_graph(_workpath(cfg, "graph.tsv"))
    vectors = embed_mod.judgment2vec(g, _n2v_config(cfg))
    embed_mod.write_embeddings(vectors, _workpath(cfg, "embeddings.txt"))


def stage_sim(cfg: dict, source: str) -> None:
    if source == "embedding":
        vectors = embed_mod.read_embeddings(_workpath(cfg, "embeddings.txt"))
        matrix = sim_mod.similarity_matrix(vectors.as_mapping())
        sim_mod.write_matrix(matrix, _workpath(cfg, "sim_embed.csv"))
    elif source == "features":
        fm = expert_mod.read_feature_matrix(_workpath(cfg, "features_encoded.csv"))
        matrix = expert_mod.expert_similarity(fm)
        sim_mod.write_matrix(matrix, _workpath(cfg, "sim_expert.csv"))
    else:
        raise InvalidConfig(f"unknown sim source: {source!r}")


def stage_compare(cfg: dict) -> None:
    expert_sm = sim_mod.read_matrix(_workpath(cfg, "sim_expert.csv"))
    embed_sm = sim_mod.read_matrix(_workpath(cfg, "sim_embed.csv"))
    comparisons = eval_mod.align_pairs(expert_sm, embed_sm)
    eval_mod.write_comparisons(comparisons, _workpath(cfg, "compare.csv"))
    payload = eval_mod.stats_payload(comparisons, cfg["tau"])
    with open(_workpath(cfg, "stats.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


RUN_SEQUENCE = (
    ("ingest", stage_ingest),
    ("features", stage_features),
    ("lda", stage_lda),
    ("graph", stage_graph),
    ("embed", stage_embed),
    ("sim", lambda cfg: (stage_sim(cfg, "features"), stage_sim(cfg, "embedding"))),
    ("compare", stage_compare),
)


def cmd_run(cfg: dict) -> int:
    os.makedirs(cfg["workdir"], exist_ok=True)
    with open(_workpath(cfg, "resolved_config.json"), "w", encoding="utf-8") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
    for stage_name, fn in RUN_SEQUENCE:
        try:
            fn(cfg)
        except Exception as exc:
            raise StageError(stage_name, exc) from exc
        print(f"stage {stage_name}: done", file=sys.stderr)
    return EXIT_OK


def cmd_query(path: str, case_id: str, k: int) -> int:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().split()
    if len(first) == 2 and all(p.isdigit() for p in first):
        vectors = embed_mod.read_embeddings(path)
        matrix = sim_mod.similarity_matrix(vectors.as_mapping())
    else:
        matrix = sim_mod.read_matrix(path)
    for rank, (cid, score) in enumerate(sim_mod.top_k(matrix, case_id, k), start=1):
        print(f"{rank}\t{cid}\t{score:.6f}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="jurisim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--workdir", help="artifact directory (default: .)")
        p.add_argument("--seed", type=int, help="override every stage seed")

    p_run = sub.add_parser("run", help="execute the full pipeline")
    add_common(p_run)

    p_query = sub.add_parser("query", help="print the k most similar cases")
    p_query.add_argument("path", help="embeddings .txt or similarity matrix .csv")
    p_query.add_argument("case_id")
    p_query.add_argument("k", type=int)

    for name in ("ingest", "features", "graph", "embed", "compare", "synth"):
        p = sub.add_parser(name, help=f"run the {name} stage")
        add_common(p)

    p_lda = sub.add_parser("lda", help="run the lda stage")
    add_common(p_lda)
    p_lda.add_argument("--k", type=int, help="topic count override")

    p_sim = sub.add_parser("sim", help="run the sim stage")
    add_common(p_sim)
    p_sim.add_argument(
        "--source", choices=("features", "embedding", "both"), default="both"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "query":
            return cmd_query(args.path, args.case_id, args.k)

        overrides: dict = {}
        if args.workdir:
            overrides["workdir"] = args.workdir
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.command == "lda" and args.k is not None:
            overrides["lda"] = {"k": args.k}
        cfg = load_config(args.config, overrides)
        os.makedirs(cfg["workdir"], exist_ok=True)

        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "sim":
            if args.source in ("features", "both"):
                stage_sim(cfg, "features")
            if args.source in ("embedding", "both"):
                stage_sim(cfg, "embedding")
            return EXIT_OK
        stage_fn = {
            "synth": stage_synth,
            "ingest": stage_ingest,
            "features": stage_features,
            "lda": stage_lda,
            "graph": stage_graph,
            "embed": stage_embed,
            "compare": stage_compare,
        }[args.command]
        stage_fn(cfg)
        return EXIT_OK
    except StageError as exc:
        print(f"error in stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return EXIT_DATA if isinstance(exc.cause, (JurisimError, OSError)) else EXIT_INTERNAL
    except InvalidConfig as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (JurisimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

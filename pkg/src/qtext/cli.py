"""Command-line entry point.

Subcommands: grover-demo, validate-pm, bbht-bench, extract-features,
train, eval. Settings resolve in three layers, flags over config file
over defaults; the config file is flat JSON with dotted keys
(e.g. "qepfe.n_qubits"). Every successful run writes manifest.json, the
fully resolved configuration plus task, version, and seed, into the
output directory. Feeding a manifest back through --config reproduces
the run's artifacts byte for byte in a fresh directory.

All randomness in a run descends from the one top-level seed through
named child seeds, so no subcommand consumes entropy from the clock or
the OS. Exit codes: 0 success, 2 config error, 3 data error, 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .data import (
    EmbeddingStore,
    OOV_POLICIES,
    load_dataset,
    load_qtpe,
    tokenize,
)
from .encoding import ENCODING_KINDS, WordVector
from .errors import ConfigError, DataError, NumericError
from .features import (
    POOLING_KINDS,
    QepfeConfig,
    extract_sequence_features,
)
from .grover import (
    analytic_success,
    grover_iterate,
    marked_set,
    uniform_superposition,
)
from .head import (
    TrainConfig,
    featurize_dataset,
    load_checkpoint,
    predict,
    save_checkpoint,
    train,
)
from .metrics import compute_metrics, confusion_from_predictions
from .search import (
    K_CONVENTIONS,
    SearchConfig,
    adaptive_search,
    p_m,
    schedule_success_probability,
)
from .seeding import child_seed, stable_hash64
from .statevector import _sample_with_rng, probabilities

CSV_COLUMNS = ("N", "a", "m", "p_m_analytic", "p_m_empirical",
               "mean_calls", "success_rate")

DEFAULTS: dict[str, object] = {
    "seed": 0,
    "paths.dataset": None,
    "paths.embeddings": None,
    "paths.checkpoint": None,
    "paths.output_dir": None,
    "qepfe.n_qubits": 6,
    "qepfe.encoding": "amplitude",
    "qepfe.tau": 0.5,
    "qepfe.pooling": "mean",
    "search.growth": 1.2,
    "search.k_convention": "zero-based",
    "training.lr": 0.001,
    "training.epochs": 50,
    "training.batch_size": 32,
    "data.embedding_dim": 16,
    "data.oov_policy": "hash",
    "grover.n_qubits": 3,
    "grover.marked": "5",
    "grover.iterations": 2,
    "pm.n_qubits": 2,
    "pm.marked_count": 1,
    "pm.m_values": "1,2,4",
    "pm.trials": 2000,
    "bench.n_qubits": 10,
    "bench.marked_counts": "1,4,16",
    "bench.runs": 1000,
}

TASK_KEYS: dict[str, tuple[str, ...]] = {
    "grover-demo": ("grover.n_qubits", "grover.marked", "grover.iterations"),
    "validate-pm": ("pm.n_qubits", "pm.marked_count", "pm.m_values", "pm.trials"),
    "bbht-bench": ("bench.n_qubits", "bench.marked_counts", "bench.runs",
                   "search.growth", "search.k_convention"),
    "extract-features": ("paths.dataset", "paths.embeddings",
                         "data.embedding_dim", "data.oov_policy",
                         "qepfe.n_qubits", "qepfe.encoding", "qepfe.tau",
                         "qepfe.pooling", "search.growth",
                         "search.k_convention"),
    "train": ("paths.dataset", "paths.embeddings", "data.embedding_dim",
              "data.oov_policy", "qepfe.n_qubits", "qepfe.encoding",
              "qepfe.tau", "qepfe.pooling", "search.growth",
              "search.k_convention", "training.lr", "training.epochs",
              "training.batch_size"),
    "eval": ("paths.dataset", "paths.embeddings", "paths.checkpoint",
             "data.embedding_dim", "data.oov_policy", "qepfe.n_qubits",
             "qepfe.encoding", "qepfe.tau", "qepfe.pooling",
             "search.growth", "search.k_convention"),
}


def _as_int(config: dict, key: str) -> int:
    try:
        return int(config[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer, got {config[key]!r}") from None


def _as_float(config: dict, key: str) -> float:
    try:
        return float(config[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {config[key]!r}") from None


def _as_int_list(config: dict, key: str) -> list[int]:
    raw = config[key]
    if isinstance(raw, int):
        return [raw]
    try:
        return [int(part) for part in str(raw).split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(
            f"{key} must be comma-separated integers, got {raw!r}"
        ) from None


def _choice(config: dict, key: str, allowed: tuple[str, ...]) -> str:
    value = config[key]
    if value not in allowed:
        raise ConfigError(f"{key} must be one of {allowed}, got {value!r}")
    return value


def _require_file(config: dict, key: str) -> str:
    path = config[key]
    if not path:
        raise ConfigError(f"{key} is required for this task")
    if not os.path.isfile(path):
        raise ConfigError(f"{key}: no such file: {path}")
    return str(path)


def _fmt(x: float) -> str:
    """Full-precision decimal form; round-trips to the same float."""
    return repr(float(x))


class RunContext:
    """Resolved config plus artifact bookkeeping for one subcommand run.

    Artifacts register themselves as they are created so a failing run
    can remove its partial outputs; the manifest is written only after
    the handler finishes.
    """

    def __init__(self, task: str, config: dict):
        self.task = task
        self.config = config
        self.created: list[str] = []
        out = config["paths.output_dir"] or os.path.join("runs", task)
        self.out_dir = str(out)
        os.makedirs(self.out_dir, exist_ok=True)

    def path(self, name: str, track: bool = True) -> str:
        full = os.path.join(self.out_dir, name)
        if track:
            self.created.append(full)
        return full

    def write_manifest(self) -> None:
        manifest = {"task": self.task, "version": __version__,
                    "seed": _as_int(self.config, "seed")}
        for key in TASK_KEYS[self.task]:
            manifest[key] = self.config[key]
        manifest["paths.output_dir"] = self.out_dir
        with open(self.path("manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def discard(self) -> None:
        for path in self.created:
            try:
                os.unlink(path)
            except OSError:
                pass


def _write_schedule_csv(path: str, rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(
                str(v) if isinstance(v, int) else _fmt(v) for v in row
            ) + "\n")


def run_grover_demo(run: RunContext) -> None:
    c = run.config
    n = _as_int(c, "grover.n_qubits")
    indices = _as_int_list(c, "grover.marked")
    iterations = _as_int(c, "grover.iterations")
    if iterations < 0:
        raise ConfigError(f"grover.iterations must be >= 0, got {iterations}")
    marked = marked_set(n, indices)
    members = np.array(marked.members)
    state = uniform_superposition(n)
    rows = []
    for k in range(iterations + 1):
        if k:
            state = grover_iterate(state, marked)
        simulated = float(probabilities(state)[members].sum())
        analytic = analytic_success(n, len(members), k)
        rows.append((k, analytic, simulated))
    print(f"Grover curve: n={n}, marked={list(marked.members)}")
    print(f"{'k':>4} {'analytic':>12} {'simulated':>12} {'abs diff':>12}")
    for k, analytic, simulated in rows:
        print(f"{k:>4} {analytic:>12.6f} {simulated:>12.6f} "
              f"{abs(analytic - simulated):>12.3e}")
    with open(run.path("grover_curve.csv"), "w", encoding="utf-8") as fh:
        fh.write("k,analytic,simulated\n")
        for k, analytic, simulated in rows:
            fh.write(f"{k},{_fmt(analytic)},{_fmt(simulated)}\n")


def run_validate_pm(run: RunContext) -> None:
    c = run.config
    n = _as_int(c, "pm.n_qubits")
    a = _as_int(c, "pm.marked_count")
    m_values = _as_int_list(c, "pm.m_values")
    trials = _as_int(c, "pm.trials")
    if trials < 1:
        raise ConfigError(f"pm.trials must be >= 1, got {trials}")
    if any(m < 1 for m in m_values):
        raise ConfigError(f"pm.m_values must all be >= 1, got {m_values}")
    dim = 1 << n
    marked = marked_set(n, list(range(a)))
    members = np.array(marked.members)
    rng = np.random.Generator(np.random.PCG64(
        child_seed(_as_int(c, "seed"), "pm")))
    max_m = max(m_values)
    states = [uniform_superposition(n)]
    for _ in range(max_m - 1):
        states.append(grover_iterate(states[-1], marked))
    rows = []
    print(f"P_m validation: N={dim}, a={a}, {trials} trials per m")
    print(f"{'m':>4} {'analytic':>12} {'empirical':>12} {'mean calls':>12}")
    for m in m_values:
        analytic = p_m(n, a, m)
        ks = rng.integers(0, m, size=trials)
        hits = 0
        for k in range(m):
            count = int((ks == k).sum())
            if count == 0:
                continue
            measured = _sample_with_rng(states[k].amplitudes, count, rng)
            hits += int(np.isin(measured, members).sum())
        empirical = hits / trials
        mean_calls = float((ks + 1).mean())
        rows.append((dim, a, m, analytic, empirical, mean_calls, empirical))
        print(f"{m:>4} {analytic:>12.6f} {empirical:>12.6f} {mean_calls:>12.3f}")
    _write_schedule_csv(run.path("pm_validation.csv"), rows)


def run_bbht_bench(run: RunContext) -> None:
    c = run.config
    n = _as_int(c, "bench.n_qubits")
    marked_counts = _as_int_list(c, "bench.marked_counts")
    runs = _as_int(c, "bench.runs")
    if runs < 1:
        raise ConfigError(f"bench.runs must be >= 1, got {runs}")
    growth = _as_float(c, "search.growth")
    convention = _choice(c, "search.k_convention", K_CONVENTIONS)
    seed = _as_int(c, "seed")
    dim = 1 << n
    rows = []
    print(f"Adaptive-search bench: N={dim}, {runs} runs per marked count")
    print(f"{'a':>6} {'analytic':>12} {'success':>12} {'mean calls':>12}")
    for a in marked_counts:
        marked = marked_set(n, list(range(a)))
        base = SearchConfig(growth=growth, k_convention=convention)
        analytic = schedule_success_probability(n, a, base)
        found = 0
        total_calls = 0
        for i in range(runs):
            config = SearchConfig(growth=growth, k_convention=convention,
                                  seed=stable_hash64(seed, "bench", a, i))
            outcome = adaptive_search(marked, config)
            if outcome.found is not None:
                if not marked.contains(outcome.found):
                    raise NumericError(
                        f"false positive: {outcome.found} reported for a={a}"
                    )
                found += 1
            total_calls += outcome.oracle_calls
        success = found / runs
        mean_calls = total_calls / runs
        max_m = float(np.sqrt(dim))
        rows.append((dim, a, max_m, analytic, success, mean_calls, success))
        print(f"{a:>6} {analytic:>12.6f} {success:>12.6f} {mean_calls:>12.2f}")
    _write_schedule_csv(run.path("bbht_bench.csv"), rows)


def _build_store(config: dict) -> EmbeddingStore:
    policy = _choice(config, "data.oov_policy", OOV_POLICIES)
    path = config["paths.embeddings"]
    if path:
        if not os.path.isfile(path):
            raise ConfigError(f"paths.embeddings: no such file: {path}")
        return load_qtpe(str(path), oov_policy=policy)
    dim = _as_int(config, "data.embedding_dim")
    return EmbeddingStore(dim=dim, oov_policy=policy)


def _build_qepfe(config: dict) -> QepfeConfig:
    search = SearchConfig(
        growth=_as_float(config, "search.growth"),
        k_convention=_choice(config, "search.k_convention", K_CONVENTIONS),
        seed=child_seed(_as_int(config, "seed"), "search"),
    )
    return QepfeConfig(
        n_qubits=_as_int(config, "qepfe.n_qubits"),
        encoding=_choice(config, "qepfe.encoding", ENCODING_KINDS),
        tau=_as_float(config, "qepfe.tau"),
        search=search,
        pooling=_choice(config, "qepfe.pooling", POOLING_KINDS),
    )


def run_extract_features(run: RunContext) -> None:
    c = run.config
    dataset_path = _require_file(c, "paths.dataset")
    store = _build_store(c)
    qepfe = _build_qepfe(c)
    examples, _ = load_dataset(dataset_path)
    out_path = run.path("features.jsonl")
    with open(out_path, "w", encoding="utf-8") as fh:
        for ex in examples:
            vectors = [v for v in (store.lookup(t) for t in tokenize(ex.text))
                       if v is not None]
            if not vectors:
                raise DataError(f"example {ex.id!r}: no embeddable tokens")
            p = extract_sequence_features(
                [WordVector(v) for v in vectors], qepfe).p
            fh.write(json.dumps(
                {"id": ex.id, "p": [float(x) for x in p]}) + "\n")
    print(f"wrote features for {len(examples)} examples to {out_path}")


def run_train(run: RunContext) -> None:
    c = run.config
    dataset_path = _require_file(c, "paths.dataset")
    store = _build_store(c)
    qepfe = _build_qepfe(c)
    examples, n_classes = load_dataset(dataset_path)
    train_config = TrainConfig(
        lr=_as_float(c, "training.lr"),
        epochs=_as_int(c, "training.epochs"),
        batch_size=_as_int(c, "training.batch_size"),
        seed=child_seed(_as_int(c, "seed"), "train"),
    )
    head, history = train(examples, store, n_classes, qepfe, train_config)
    save_checkpoint(run.path("head.qtph"), head)
    with open(run.path("history.csv"), "w", encoding="utf-8") as fh:
        fh.write("epoch,loss,accuracy\n")
        for stats in history:
            fh.write(f"{stats.epoch},{_fmt(stats.loss)},{_fmt(stats.accuracy)}\n")
    last = history[-1]
    print(f"trained {last.epoch} epochs; "
          f"final loss {last.loss:.6f}, accuracy {last.accuracy:.4f}")


def run_eval(run: RunContext) -> None:
    c = run.config
    dataset_path = _require_file(c, "paths.dataset")
    checkpoint_path = _require_file(c, "paths.checkpoint")
    store = _build_store(c)
    qepfe = _build_qepfe(c)
    head = load_checkpoint(checkpoint_path)
    if head.feature_dim != (1 << qepfe.n_qubits):
        raise ConfigError(
            f"qepfe.n_qubits: checkpoint expects feature width "
            f"{head.feature_dim}, config gives {1 << qepfe.n_qubits}"
        )
    if head.embed_dim != store.dim:
        raise ConfigError(
            f"data.embedding_dim: checkpoint expects {head.embed_dim}, "
            f"store provides {store.dim}"
        )
    examples, _ = load_dataset(dataset_path)
    bad = [ex.id for ex in examples if ex.label >= head.n_classes]
    if bad:
        raise DataError(
            f"labels out of range for {head.n_classes}-class checkpoint: "
            f"{bad[:5]}"
        )
    z, labels = featurize_dataset(examples, store, qepfe)
    predictions = predict(head, z)
    cm = confusion_from_predictions(labels, predictions, head.n_classes)
    report = compute_metrics(cm)
    seed = _as_int(c, "seed")
    with open(run.path("metrics.json"), "w", encoding="utf-8") as fh:
        json.dump({"seed": seed, **report.to_dict()}, fh, indent=2)
        fh.write("\n")
    log_path = run.path("run_log.csv", track=False)
    fresh = not os.path.exists(log_path)
    with open(log_path, "a", encoding="utf-8") as fh:
        if fresh:
            fh.write("seed,accuracy,precision,recall,f1,degenerate_flags\n")
        fh.write(",".join([
            str(seed),
            _fmt(report.accuracy), _fmt(report.precision),
            _fmt(report.recall), _fmt(report.f1),
            ";".join(report.degenerate_flags),
        ]) + "\n")
    print(f"accuracy {report.accuracy:.6f}  precision {report.precision:.6f}  "
          f"recall {report.recall:.6f}  f1 {report.f1:.6f}")


HANDLERS = {
    "grover-demo": run_grover_demo,
    "validate-pm": run_validate_pm,
    "bbht-bench": run_bbht_bench,
    "extract-features": run_extract_features,
    "train": run_train,
    "eval": run_eval,
}

# maps each argparse dest to its dotted config key, per subcommand
FLAG_KEYS: dict[str, dict[str, str]] = {
    "grover-demo": {"qubits": "grover.n_qubits", "marked": "grover.marked",
                    "iters": "grover.iterations"},
    "validate-pm": {"qubits": "pm.n_qubits", "marked_count": "pm.marked_count",
                    "m": "pm.m_values", "trials": "pm.trials"},
    "bbht-bench": {"qubits": "bench.n_qubits",
                   "marked_counts": "bench.marked_counts",
                   "runs": "bench.runs", "growth": "search.growth",
                   "convention": "search.k_convention"},
    "extract-features": {"dataset": "paths.dataset",
                         "embeddings": "paths.embeddings",
                         "dim": "data.embedding_dim", "oov": "data.oov_policy",
                         "n_qubits": "qepfe.n_qubits",
                         "encoding": "qepfe.encoding", "tau": "qepfe.tau",
                         "pooling": "qepfe.pooling"},
    "train": {"dataset": "paths.dataset", "embeddings": "paths.embeddings",
              "dim": "data.embedding_dim", "oov": "data.oov_policy",
              "n_qubits": "qepfe.n_qubits", "encoding": "qepfe.encoding",
              "tau": "qepfe.tau", "pooling": "qepfe.pooling",
              "lr": "training.lr", "epochs": "training.epochs",
              "batch": "training.batch_size"},
    "eval": {"dataset": "paths.dataset", "embeddings": "paths.embeddings",
             "checkpoint": "paths.checkpoint", "dim": "data.embedding_dim",
             "oov": "data.oov_policy", "n_qubits": "qepfe.n_qubits",
             "encoding": "qepfe.encoding", "tau": "qepfe.tau",
             "pooling": "qepfe.pooling"},
}


def _add_qepfe_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dataset", help="input dataset JSONL")
    sub.add_argument("--embeddings", help="QTPE embedding file (optional)")
    sub.add_argument("--dim", type=int, help="embedding dim when no file given")
    sub.add_argument("--oov", choices=OOV_POLICIES,
                     help="out-of-vocabulary policy")
    sub.add_argument("--n-qubits", type=int, dest="n_qubits",
                     help="feature register width")
    sub.add_argument("--encoding", choices=ENCODING_KINDS)
    sub.add_argument("--tau", type=float, help="oracle threshold in (0, 1]")
    sub.add_argument("--pooling", choices=POOLING_KINDS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtext",
        description="Quantum-search text features with a linear fusion "
                    "classifier on an exact statevector simulator.",
    )
    parser.add_argument("--version", action="version",
                        version=f"qtext {__version__}")
    subs = parser.add_subparsers(dest="task", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", help="flat JSON config (dotted keys); "
                                          "a manifest.json also works")
        sub.add_argument("--out", help="output directory")
        sub.add_argument("--seed", type=int, help="top-level seed")

    demo = subs.add_parser("grover-demo",
                           help="analytic vs simulated success table")
    common(demo)
    demo.add_argument("--qubits", type=int)
    demo.add_argument("--marked", help="comma-separated marked indices")
    demo.add_argument("--iters", type=int)

    pm = subs.add_parser("validate-pm",
                         help="closed-form vs sampled marked probability")
    common(pm)
    pm.add_argument("--qubits", type=int)
    pm.add_argument("--marked-count", type=int, dest="marked_count")
    pm.add_argument("--m", help="comma-separated draw bounds")
    pm.add_argument("--trials", type=int)

    bench = subs.add_parser("bbht-bench",
                            help="seeded adaptive-search benchmark")
    common(bench)
    bench.add_argument("--qubits", type=int)
    bench.add_argument("--marked-counts", dest="marked_counts",
                       help="comma-separated marked-set sizes")
    bench.add_argument("--runs", type=int)
    bench.add_argument("--growth", type=float)
    bench.add_argument("--convention", choices=K_CONVENTIONS)

    extract = subs.add_parser("extract-features",
                              help="write per-example quantum features")
    common(extract)
    _add_qepfe_flags(extract)

    train_p = subs.add_parser("train", help="fit the fusion head")
    common(train_p)
    _add_qepfe_flags(train_p)
    train_p.add_argument("--lr", type=float)
    train_p.add_argument("--epochs", type=int)
    train_p.add_argument("--batch", type=int)

    eval_p = subs.add_parser("eval", help="score a checkpoint on a dataset")
    common(eval_p)
    _add_qepfe_flags(eval_p)
    eval_p.add_argument("--checkpoint", help="QTPH head checkpoint")

    return parser


def _load_config_file(path: str) -> dict:
    if not os.path.isfile(path):
        raise ConfigError(f"config: no such file: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")
    config = {}
    for key, value in raw.items():
        if key in ("task", "version"):
            continue
        if key not in DEFAULTS:
            raise ConfigError(f"config: unknown key {key!r}")
        if value is not None and not isinstance(value, (str, int, float, bool)):
            raise ConfigError(f"config: {key} must be a scalar")
        config[key] = value
    return config


def resolve_config(args: argparse.Namespace) -> dict:
    config = dict(DEFAULTS)
    if getattr(args, "config", None):
        config.update(_load_config_file(args.config))
    for dest, key in FLAG_KEYS[args.task].items():
        value = getattr(args, dest, None)
        if value is not None:
            config[key] = value
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    if getattr(args, "out", None):
        config["paths.output_dir"] = args.out
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        run = RunContext(args.task, config)
        try:
            HANDLERS[args.task](run)
            run.write_manifest()
        except BaseException:
            run.discard()
            raise
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

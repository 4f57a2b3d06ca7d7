"""Command-line entry point.

Subcommands: ingest, synth, fit, predict, evaluate, simulate, compare.
Configuration comes from a JSON file (--config); command-line flags win
over config values. All outputs land under --out with fixed names:

    synth      records.csv
    ingest     splits/train.csv, splits/test.csv, splits/extended_test.csv,
               ingest_report.txt
    fit        model.json
    predict    predictions.csv
    evaluate   evaluation.json
    simulate / compare
               results.csv, comparison.csv, histogram_<policy>.csv

Exit codes: 0 success, 1 environment/IO, 2 data quality under --strict,
3 configuration.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

import numpy as np

from dos_slotting import distribution, manifests, metrics, policies, predictor, records, simulator
from dos_slotting.distribution import empirical_cdf, quantile_vector
from dos_slotting.records import ConfigurationError, SchemaError
from dos_slotting.warehouse import Warehouse

EXIT_OK = 0
EXIT_IO = 1
EXIT_DATA = 2
EXIT_CONFIG = 3


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"bad config {path}: {exc}") from None


def _date(value: str) -> dt.date:
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise ConfigurationError(f"bad date {value!r} (want YYYY-MM-DD)") from None


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _format(value) -> str:
    if isinstance(value, float):
        return repr(float(value))  # builtin repr even for numpy scalars
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format(v) for v in row) + "\n")


# --- synth -----------------------------------------------------------------


def _generator_config(cfg: dict) -> records.GeneratorConfig:
    gen = cfg.get("generator")
    if not gen:
        raise ConfigurationError("config needs a 'generator' section")
    try:
        groups = tuple(
            records.GroupSpec(
                name=g["name"],
                dos=records.DosSpec(**g["dos"]),
                weight=float(g.get("weight", 1.0)),
                description_words=tuple(g.get("description_words", ("frozen", "goods", "pallet"))),
            )
            for g in gen["groups"]
        )
        return records.GeneratorConfig(
            groups=groups,
            start=_date(gen["start"]),
            end=_date(gen["end"]),
            shipments_per_day=int(gen.get("shipments_per_day", 10)),
            mean_shipment_size=float(gen.get("mean_shipment_size", 10.6)),
            customer_types=tuple(gen.get("customer_types", ("retail", "wholesale", "export"))),
            warehouse_ids=tuple(gen.get("warehouse_ids", ("W01",))),
            inbound_locations=tuple(gen.get("inbound_locations", ("plant-a", "plant-b", "port"))),
            outbound_locations=tuple(gen.get("outbound_locations", ("dc-east", "dc-west", "store"))),
            drift_mu_per_year=float(gen.get("drift_mu_per_year", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"bad generator config: {exc}") from None


def cmd_synth(args) -> int:
    cfg = _load_config(args.config)
    config = _generator_config(cfg)
    seed = args.seed[0] if args.seed else int(cfg.get("seed", 0))
    out = _out_dir(args)
    recs = records.synthesize_records(config, seed)
    with open(out / "records.csv", "w", encoding="utf-8", newline="") as fh:
        records.serialize_records(recs, fh)
    print(f"synthesized {len(recs)} records -> {out / 'records.csv'}")
    return EXIT_OK


# --- ingest ----------------------------------------------------------------


def cmd_ingest(args) -> int:
    cfg = _load_config(args.config)
    input_path = args.input or cfg.get("input")
    if not input_path:
        raise ConfigurationError("ingest needs --input or config 'input'")
    split_cfg = cfg.get("split", {})
    cutoff = _date(args.train_exit_cutoff or split_cfg.get("train_exit_cutoff", "2017-06-30"))
    test_window = tuple(_date(d) for d in split_cfg.get("test_window", ["2017-06-30", "2017-07-30"]))
    extended_window = tuple(
        _date(d) for d in split_cfg.get("extended_window", ["2017-09-30", "2017-12-31"])
    )

    with open(input_path, encoding="utf-8") as fh:
        result = records.parse_records(fh)
    shipments = records.group_shipments(result.records) if result.records else []
    split = records.split_dataset(shipments, cutoff, test_window, extended_window)

    out = _out_dir(args)
    splits_dir = out / "splits"
    splits_dir.mkdir(exist_ok=True)
    for name, subset in (
        ("train", split.train),
        ("test", split.test),
        ("extended_test", split.extended_test),
    ):
        with open(splits_dir / f"{name}.csv", "w", encoding="utf-8", newline="") as fh:
            manifests.write_manifest(subset, fh)
    with open(out / "ingest_report.txt", "w", encoding="utf-8") as fh:
        for err in result.errors:
            fh.write(f"{err}\n")

    print(
        f"parsed {len(result.records)} records ({len(result.errors)} rejected rows), "
        f"{len(shipments)} shipments"
    )
    print(
        f"split: train={len(split.train)} test={len(split.test)} "
        f"extended_test={len(split.extended_test)} dropped={split.dropped}"
    )
    if result.errors:
        for err in result.errors[:10]:
            print(f"  {err}", file=sys.stderr)
        if args.strict:
            return EXIT_DATA
    return EXIT_OK


# --- fit / predict / evaluate ------------------------------------------------


def _read_manifest(path: str) -> list[manifests.ManifestRow]:
    with open(path, encoding="utf-8") as fh:
        return manifests.read_manifest(fh)


def cmd_fit(args) -> int:
    cfg = _load_config(args.config)
    train_path = args.train or cfg.get("train_manifest")
    if not train_path:
        raise ConfigurationError("fit needs --train or config 'train_manifest'")
    min_support = args.min_support or int(cfg.get("min_support", 20))
    rows = _read_manifest(train_path)
    model = predictor.fit_group_model([r.shipment for r in rows], min_support=min_support)
    out = _out_dir(args)
    with open(out / "model.json", "w", encoding="utf-8") as fh:
        predictor.save_group_model(model, fh)
    sizes = [len(t) for t in model.tables]
    print(f"fitted group model on {len(rows)} shipments; keys per level: {sizes}")
    return EXIT_OK


def _build_predictor(kind: str, args, cfg: dict, rows: list[manifests.ManifestRow]):
    if kind == "oracle":
        return predictor.OraclePredictor.from_shipments([r.shipment for r in rows])
    if kind == "group":
        model_path = args.model or cfg.get("model")
        if model_path:
            with open(model_path, encoding="utf-8") as fh:
                return predictor.load_group_model(fh)
        train_path = args.train or cfg.get("train_manifest")
        if not train_path:
            raise ConfigurationError("group predictor needs --model or --train")
        train_rows = _read_manifest(train_path)
        min_support = args.min_support or int(cfg.get("min_support", 20))
        return predictor.fit_group_model(
            [r.shipment for r in train_rows], min_support=min_support
        )
    if kind == "constant":
        train_path = args.train or cfg.get("train_manifest")
        if not train_path:
            raise ConfigurationError("constant predictor needs --train")
        train_rows = _read_manifest(train_path)
        pool = [d for r in train_rows for d in r.shipment.pallet_dos]
        return predictor.ConstantPredictor(quantile_vector(empirical_cdf(pool)))
    if kind == "external":
        pred_path = args.predictions or cfg.get("predictions")
        if not pred_path:
            raise ConfigurationError("external predictor needs --predictions")
        with open(pred_path, encoding="utf-8") as fh:
            ext = predictor.load_predictions(fh)
        if ext.report.repaired:
            print(f"repaired {len(ext.report.repaired)} non-monotone prediction rows")
        return ext
    raise ConfigurationError(f"unknown predictor {kind!r}")


def cmd_predict(args) -> int:
    cfg = _load_config(args.config)
    manifest_path = args.manifest or cfg.get("manifest")
    if not manifest_path:
        raise ConfigurationError("predict needs --manifest")
    rows = _read_manifest(manifest_path)
    kind = args.predictor or cfg.get("predictor", "group")
    model = _build_predictor(kind, args, cfg, rows)
    out = _out_dir(args)
    with open(out / "predictions.csv", "w", encoding="utf-8", newline="") as fh:
        predictor.write_predictions(
            ((r.shipment.features.shipment_id, model.predict(r.shipment.features)) for r in rows),
            fh,
        )
    print(f"wrote {len(rows)} predictions -> {out / 'predictions.csv'}")
    return EXIT_OK


def _evaluate_split(rows, model) -> tuple[dict, list[str]]:
    pairs = []
    missing: list[str] = []
    for row in rows:
        try:
            predicted = model.predict(row.shipment.features)
        except predictor.PredictionLookupError:
            missing.append(row.shipment.features.shipment_id)
            continue
        pairs.append((predicted, row.target))
    if not pairs:
        return {"msle": None, "mape": None, "n_shipments": 0, "per_percentile_mape": []}, missing
    report = metrics.evaluate_pairs(pairs)
    payload = json.loads(report.to_json())
    return payload, missing


def cmd_evaluate(args) -> int:
    cfg = _load_config(args.config)
    test_path = args.test or cfg.get("test_manifest")
    if not test_path:
        raise ConfigurationError("evaluate needs --test")
    kind = args.predictor or cfg.get("predictor", "oracle")
    payload = {}
    warnings = 0
    for label, path in (("test", test_path), ("extended_test", args.extended or cfg.get("extended_manifest"))):
        if not path:
            continue
        rows = _read_manifest(path)
        model = _build_predictor(kind, args, cfg, rows)
        split_report, missing = _evaluate_split(rows, model)
        split_report["missing_predictions"] = len(missing)
        warnings += len(missing)
        for sid in missing:
            print(f"{label}: no prediction for shipment {sid}; excluded", file=sys.stderr)
        payload[label] = split_report
        if split_report["n_shipments"]:
            print(
                f"{label}: msle={split_report['msle']:.6f} mape={split_report['mape']:.6f} "
                f"n={split_report['n_shipments']} missing={missing}"
            )
    out = _out_dir(args)
    with open(out / "evaluation.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    if warnings:
        print(f"{warnings} shipments lacked predictions", file=sys.stderr)
    return EXIT_OK


# --- simulate / compare ------------------------------------------------------


def _build_warehouse(cfg: dict, args) -> Warehouse:
    wh_cfg = cfg.get("warehouse", {})
    if args.locations:
        return Warehouse.aisle(args.locations)
    if "geometry" in wh_cfg:
        with open(wh_cfg["geometry"], encoding="utf-8") as fh:
            return Warehouse.from_geometry_file(fh)
    size = wh_cfg.get("size")
    if not size:
        raise ConfigurationError("simulate needs warehouse.size, warehouse.geometry, or -N")
    return Warehouse.aisle(int(size))


def _parse_spec(raw: dict) -> dict:
    spec = {}
    for key, entry in raw.items():
        p = int(key)
        if isinstance(entry, dict):
            spec[p] = simulator.PeriodicArrivals(
                count=int(entry["count"]),
                every=int(entry["every"]),
                phase=int(entry.get("phase", 1)),
            )
        else:
            spec[p] = int(entry)
    return spec


def _build_policies(names, stream0, dist, warehouse, cfg, args):
    turnover = simulator.turnover_from_stream(stream0)
    built = []
    for name in names:
        if name == "greedy":
            built.append((name, policies.GreedyPolicy()))
        elif name == "random":
            built.append((name, policies.RandomPolicy()))
        elif name in ("dos_oracle", "dos_group"):
            if dist is None:
                raise ConfigurationError(f"{name} needs a nonempty stream")
            if name == "dos_oracle":
                model = simulator.oracle_for_stream(stream0)
            else:
                model_path = args.model or cfg.get("model")
                if not model_path:
                    raise ConfigurationError("dos_group needs --model")
                with open(model_path, encoding="utf-8") as fh:
                    model = predictor.load_group_model(fh)
            built.append((name, policies.DosPolicy(model, dist, name=name)))
        elif name == "class":
            try:
                zones = policies.build_class_zones(turnover, warehouse.size)
            except ValueError as exc:
                raise ConfigurationError(str(exc)) from None
            built.append((name, policies.ClassPolicy(zones)))
        elif name == "turnover":
            try:
                built.append((name, policies.TurnoverPolicy.from_table(turnover)))
            except ValueError as exc:
                raise ConfigurationError(str(exc)) from None
        else:
            raise ConfigurationError(f"unknown policy {name!r}")
    return built


def _optimal_rows(stream_factory, warehouse, dist, stream0, seeds, warmup):
    """Exhaustive-optimum rows for the 'optimal' pseudo-policy."""
    rows = []
    for seed in seeds:
        s = stream_factory(seed) if callable(stream_factory) else stream_factory
        init = None
        if warmup > 0:
            if dist is None:
                raise ConfigurationError("optimal with warmup needs a nonempty stream")
            warm_policy = policies.DosPolicy(
                simulator.oracle_for_stream(stream0), dist, name="warmup"
            )
            head, s = simulator.split_stream(s, warmup)
            init = simulator.run_simulation(head, warehouse, warm_policy, seed).end_state
        cost = simulator.brute_force_optimal(s, warehouse, initial_state=init)
        rows.append(
            {
                "policy": "optimal",
                "seed": seed,
                "total_cost": cost,
                "travel_cost": 0.0,
                "mean_percentile": 0.0,
                "median_percentile": 0.0,
                "overflow_events": 0,
                "placements": s.total_arrivals,
            }
        )
    return rows


def _run_comparison(args, default_policies) -> int:
    cfg = _load_config(args.config)
    warehouse = _build_warehouse(cfg, args)
    stream_cfg = cfg.get("stream", {})
    seeds = args.seed or [int(s) for s in cfg.get("seeds", [0])]
    warmup = int(stream_cfg.get("warmup", 0))

    if "spec" in stream_cfg:
        spec = _parse_spec(stream_cfg["spec"])
        horizon = int(stream_cfg.get("horizon", 100)) + warmup
        if not spec:
            stream0 = simulator.ArrivalStream(1, horizon, {})
            stream_factory = stream0
            dist = None
        else:

            def stream_factory(seed: int):
                return simulator.generate_perfect_balance_stream(spec, horizon, seed)

            stream0 = stream_factory(seeds[0])
            dist = simulator.distribution_for_spec(spec, warehouse.size)
    elif "records" in stream_cfg:
        with open(stream_cfg["records"], encoding="utf-8") as fh:
            parsed = records.parse_records(fh)
        stream0 = simulator.stream_from_records(parsed.records)
        stream_factory = stream0
        dist = distribution.debias_warehouse_distribution(parsed.records, warehouse.size)
    else:
        raise ConfigurationError("stream config needs 'spec' or 'records'")

    names = list(args.policy or cfg.get("policies", default_policies))
    run_optimal = "optimal" in names
    names = [n for n in names if n != "optimal"]
    built = _build_policies(names, stream0, dist, warehouse, cfg, args)
    peak = stream0.peak_residents()
    if peak > warehouse.size:
        print(
            f"note: peak concurrent residents {peak} exceed capacity "
            f"{warehouse.size}; overflow staging expected",
            file=sys.stderr,
        )

    if built:
        comparison = simulator.compare_policies(
            stream_factory, warehouse, built, seeds, warmup_periods=warmup
        )
    else:
        comparison = simulator.ComparisonResult(rows=[], aggregates={}, histograms={})
    if run_optimal:
        comparison.rows.extend(
            _optimal_rows(stream_factory, warehouse, dist, stream0, seeds, warmup)
        )
        costs = [r["total_cost"] for r in comparison.rows if r["policy"] == "optimal"]
        comparison.aggregates["optimal"] = {
            "mean_percentile": 0.0,
            "median_percentile": 0.0,
            "mean_total_cost": float(np.mean(costs)),
            "mean_travel_cost": 0.0,
            "overflow_events": 0,
            "seeds": len(costs),
        }

    out = _out_dir(args)
    _write_csv(
        out / "results.csv",
        [
            "policy",
            "seed",
            "total_cost",
            "travel_cost",
            "mean_percentile",
            "median_percentile",
            "overflow_events",
            "placements",
        ],
        [
            [
                r["policy"],
                r["seed"],
                r["total_cost"],
                r["travel_cost"],
                r["mean_percentile"],
                r["median_percentile"],
                r["overflow_events"],
                r["placements"],
            ]
            for r in comparison.rows
        ],
    )
    _write_csv(
        out / "comparison.csv",
        [
            "policy",
            "mean_percentile",
            "median_percentile",
            "mean_total_cost",
            "mean_travel_cost",
            "overflow_events",
            "seeds",
        ],
        [
            [
                name,
                agg["mean_percentile"],
                agg["median_percentile"],
                agg["mean_total_cost"],
                agg["mean_travel_cost"],
                agg["overflow_events"],
                agg["seeds"],
            ]
            for name, agg in comparison.aggregates.items()
        ],
    )
    for name, (edges, counts) in comparison.histograms.items():
        _write_csv(
            out / f"histogram_{name}.csv",
            ["bin_low", "bin_high", "count"],
            [[float(edges[i]), float(edges[i + 1]), int(counts[i])] for i in range(len(counts))],
        )

    for name, agg in comparison.aggregates.items():
        print(f"{name}: mean placement percentile {agg['mean_percentile']:.4f}")
    names_list = list(comparison.aggregates)
    if "dos_oracle" in names_list and "greedy" in names_list:
        dos_mean = comparison.aggregates["dos_oracle"]["mean_percentile"]
        greedy_mean = comparison.aggregates["greedy"]["mean_percentile"]
        if greedy_mean > 0:
            drop = (greedy_mean - dos_mean) / greedy_mean
            print(f"relative drop dos_oracle vs greedy: {drop:.1%}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    return _run_comparison(args, default_policies=["greedy"])


def cmd_compare(args) -> int:
    return _run_comparison(args, default_policies=["dos_oracle", "greedy"])


# --- parser ------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--out", default="out", help="output directory (default: ./out)")
    sub.add_argument("--seed", type=int, action="append", help="seed (repeatable)")
    sub.add_argument("--strict", action="store_true", help="exit 2 on rejected rows")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dos-slotting",
        description="Duration-of-stay storage assignment: data, predictors, simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic records")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="parse records, group shipments, write split manifests")
    _add_common(p)
    p.add_argument("--input", help="records CSV")
    p.add_argument("--train-exit-cutoff", help="train split cutoff date")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit the group quantile model")
    _add_common(p)
    p.add_argument("--train", help="train manifest")
    p.add_argument("--min-support", type=int, help="minimum pallets per key")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="write a prediction interchange file")
    _add_common(p)
    p.add_argument("--manifest", help="manifest to predict for")
    p.add_argument("--predictor", choices=["oracle", "group", "constant", "external"])
    p.add_argument("--model", help="fitted model.json")
    p.add_argument("--train", help="train manifest (for group/constant)")
    p.add_argument("--min-support", type=int)
    p.add_argument("--predictions", help="interchange file (external)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions on the chronological splits")
    _add_common(p)
    p.add_argument("--test", help="test manifest")
    p.add_argument("--extended", help="extended-test manifest")
    p.add_argument("--predictor", choices=["oracle", "group", "constant", "external"])
    p.add_argument("--model")
    p.add_argument("--train")
    p.add_argument("--min-support", type=int)
    p.add_argument("--predictions")
    p.set_defaults(func=cmd_evaluate)

    for name, fn in (("simulate", cmd_simulate), ("compare", cmd_compare)):
        p = sub.add_parser(name, help=f"{name} placement policies on a stream")
        _add_common(p)
        p.add_argument("-N", "--locations", type=int, help="1-D aisle size")
        p.add_argument("--policy", action="append", help="policy name (repeatable)")
        p.add_argument("--model", help="fitted model.json for dos_group")
        p.set_defaults(func=fn)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except records.GroupingError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigurationError, SchemaError, predictor.PredictionFileError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except simulator.SearchLimitExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

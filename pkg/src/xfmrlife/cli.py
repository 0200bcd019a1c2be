"""Command line entry point: ``xfmrlife <subcommand> ...``.

Subcommands mirror the pipeline stages (``ingest``, ``synth``, ``pev-gen``,
``schedule``, ``age``, ``econ``) plus ``run-all`` for the full seven-scenario
study. Exit status is 0 on success and 2 on any validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, kernels
from .bess import plan_net
from .economics import ScenarioResults, annual_profit, evaluate_investment
from .ingest import (DatasetBundle, IngestError, load_bundle, load_csv, synthesize_bundle,
                     write_bundle, write_csv)
from .pev import fleet_series
from .scenarios import Settings, load_config, run_all, write_outputs
from .thermal import simulate_year
from .timeseries import HourlySeries, SeriesError, Unit, zeros_like


def _add_data_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input data")
    g.add_argument("--bundle", type=Path, help="directory with load.csv, temperature.csv, pv.csv [prices.csv]")
    g.add_argument("--load", type=Path)
    g.add_argument("--temperature", type=Path)
    g.add_argument("--pv", type=Path)
    g.add_argument("--prices", type=Path, help="optional hourly wholesale price CSV ($/kWh)")
    g.add_argument("--synthetic", action="store_true", help="generate a synthetic year instead")
    g.add_argument("--days", type=int, default=365)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--config", type=Path, help="flat JSON of overrides, e.g. {\"pev.charger_kw\": 7.2}")
    p.add_argument("--out-dir", type=Path, default=Path("out"))


def _settings(args) -> Settings:
    return load_config(args.config) if getattr(args, "config", None) else Settings()


def _bundle(args, settings: Settings) -> DatasetBundle:
    if args.bundle:
        d = args.bundle
        prices = d / "prices.csv"
        return load_bundle(d / "load.csv", d / "temperature.csv", d / "pv.csv",
                           prices if prices.exists() else None, settings.synthetic.pv_rated_kw)
    files = (args.load, args.temperature, args.pv)
    if any(files):
        if not all(files):
            raise IngestError("--load, --temperature and --pv must be given together")
        return load_bundle(args.load, args.temperature, args.pv, args.prices,
                           settings.synthetic.pv_rated_kw)
    return synthesize_bundle(args.seed, args.days, settings.synthetic)


def _write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_ingest(args) -> None:
    bundle = _bundle(args, _settings(args))
    paths = write_bundle(bundle, args.out_dir)
    summary = {
        "days": bundle.days,
        "start_date": bundle.start_date.isoformat(),
        "load_peak_kw": float(bundle.load_kw.samples.max()),
        "load_energy_kwh": float(bundle.load_kw.samples.sum()),
        "pv_energy_kwh": float(bundle.pv_kw.samples.sum()),
        "temperature_mean_c": float(bundle.temperature_c.samples.mean()),
        "files": {k: str(v) for k, v in paths.items()},
    }
    _write_json(args.out_dir / "summary.json", summary)
    print(json.dumps(summary, indent=2, sort_keys=True))


def cmd_synth(args) -> None:
    settings = _settings(args)
    bundle = synthesize_bundle(args.seed, args.days, settings.synthetic)
    for name, path in write_bundle(bundle, args.out_dir).items():
        print(f"{name}: {path}")


def cmd_pev_gen(args) -> None:
    import dataclasses

    settings = _settings(args)
    params = dataclasses.replace(settings.pev, fleet_size=args.fleet, slots=args.slots)
    series = fleet_series(params, args.days, args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(series, args.out)
    print(f"wrote {args.out} ({series.days} days, peak {series.samples.max():.3f} kW)")


def cmd_schedule(args) -> None:
    settings = _settings(args)
    bundle = _bundle(args, settings)
    pev = load_csv(args.pev, Unit.KILOWATT) if args.pev else zeros_like(bundle.load_kw)
    pv = bundle.pv_kw.scale(args.pv_kw / bundle.pv_rated_kw) if args.pv_kw else zeros_like(bundle.load_kw)
    net = bundle.load_kw + pev - pv
    params = settings.bess_params(args.capacity_kwh)
    if args.rated_kw is not None:
        import dataclasses
        params = dataclasses.replace(params, rated_kw=args.rated_kw)
    plan = plan_net(net, params, settings.ga, args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(plan.power, args.out_dir / "battery.csv")
    write_csv(net + plan.power, args.out_dir / "flow.csv")
    _write_json(args.out_dir / "schedule.json", {"days": plan.day_report()})
    print(f"wrote {args.out_dir / 'battery.csv'} and schedule.json")


def cmd_age(args) -> None:
    settings = _settings(args)
    flow = load_csv(args.flow, Unit.KILOWATT)
    ambient = load_csv(args.temperature, Unit.CELSIUS)
    result = simulate_year(flow, ambient, settings.transformer)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(HourlySeries(flow.start_date, result.theta_h, Unit.CELSIUS), args.out_dir / "theta_h.csv")
    write_csv(HourlySeries(flow.start_date, result.faa_series, Unit.DIMENSIONLESS), args.out_dir / "faa.csv")
    _write_json(args.out_dir / "aging.json", result.summary())
    print(json.dumps(result.summary(), indent=2, sort_keys=True))


def cmd_econ(args) -> None:
    settings = _settings(args)
    bundle = _bundle(args, settings)
    base = load_csv(args.baseline_flow, Unit.KILOWATT)
    cand = load_csv(args.flow, Unit.KILOWATT)
    t = settings.transformer
    base_age = simulate_year(base, bundle.temperature_c, t)
    cand_age = simulate_year(cand, bundle.temperature_c, t)
    bess = settings.bess_params(args.bess_kwh) if args.bess_kwh > 0 else None
    results = ScenarioResults(
        scenario_id=args.scenario_id,
        lol_percent=cand_age.loss_of_life_percent,
        period_hours=float(len(cand)),
        pv_kw=args.pv_kw,
        bess=bess,
        energy_profit=annual_profit(bundle, cand, base),
        baseline_lol_percent=base_age.loss_of_life_percent,
    )
    report = evaluate_investment(results, settings.finance, t)
    _write_json(args.out_dir / f"{args.scenario_id}.json", report.to_dict())
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))


def cmd_run_all(args) -> None:
    settings = _settings(args)
    bundle = _bundle(args, settings)
    results = run_all(bundle, args.seed, settings, days=min(args.days, bundle.days), workers=args.workers)
    write_outputs(results, args.out_dir)
    for sid, r in results.reports.items():
        pb = lambda x: "never" if x is None else str(x)
        print(f"{sid:4s} LOL {r.lol_percent:10.5f} %  saving {r.annual_saving:10.2f} $/yr  "
              f"payback {pb(r.payback_with_lol)} / {pb(r.payback_without_lol)} yr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xfmrlife", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate input CSVs and write canonical copies")
    _add_data_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="write a synthetic load/PV/temperature year")
    p.add_argument("--days", type=int, default=365)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pev-gen", help="Monte Carlo EV charging load")
    p.add_argument("--days", type=int, default=365)
    p.add_argument("--fleet", type=int, default=12)
    p.add_argument("--slots", type=int, default=10)
    p.add_argument("--out", type=Path, default=Path("pev.csv"))
    _add_common(p)
    p.set_defaults(func=cmd_pev_gen)

    p = sub.add_parser("schedule", help="day-ahead battery schedule over the horizon")
    _add_data_args(p)
    p.add_argument("--pev", type=Path, help="EV load CSV (kW)")
    p.add_argument("--pv-kw", type=float, default=0.0, help="installed PV, 0 to ignore PV")
    p.add_argument("--capacity-kwh", type=float, required=True)
    p.add_argument("--rated-kw", type=float)
    _add_common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("age", help="transformer hot spot and loss of life for a flow series")
    p.add_argument("--flow", type=Path, required=True, help="transformer flow CSV (kW)")
    p.add_argument("--temperature", type=Path, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_age)

    p = sub.add_parser("econ", help="price an investment against a baseline flow")
    _add_data_args(p)
    p.add_argument("--baseline-flow", type=Path, required=True)
    p.add_argument("--flow", type=Path, required=True)
    p.add_argument("--pv-kw", type=float, default=0.0)
    p.add_argument("--bess-kwh", type=float, default=0.0)
    p.add_argument("--scenario-id", default="candidate")
    _add_common(p)
    p.set_defaults(func=cmd_econ)

    p = sub.add_parser("run-all", help="all seven scenarios, tables and reports")
    _add_data_args(p)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_run_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (IngestError, SeriesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

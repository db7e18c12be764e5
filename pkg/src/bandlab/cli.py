"""bandlab command line driver.

Every run takes a JSON config (--config) whose fields can be overridden by
flags; the merged configuration is echoed to resolved_config.json next to
the outputs, so a run can be reproduced from its artifacts alone.  Outputs
are plain CSV (full double precision) plus a JSON summary and are
byte-identical across repeat runs with the same config and seed.

Exit codes: 0 success, 2 configuration or validation problem, 3 solver
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .analysis import (
    convergence_study,
    energy_vs_cell_parameter,
    make_reference,
    periodicity_report,
    regularity_probe,
)
from .blowup import BlowupSpec, build_blowup
from .fiber import Scheme, kdependent_scheme, modified_scheme, uniform_scheme
from .lattice import Lattice, kpath, lattice_from_dict, new_lattice, uniform_grid
from .observables import TruncationWarning, fermi_level, idoe, idos
from .potential import (
    FourierPotential,
    load_potential,
    potential_from_coeffs,
    save_potential,
    synth_power_law,
)
from .spectra import SolverFailure, bands_to_csv, compute_bands

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

_SCHEME_NAMES = {"uniform": "uniform", "kdep": "kdependent", "modified": "modified"}


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ValueError(f"config is missing the {key!r} field")
    return cfg[key]


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    cfg = json.loads(Path(path).read_text())
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    return cfg


def _parse_path_flag(text: str) -> dict:
    nodes = []
    for token in text.split():
        label, _, coords = token.partition(":")
        if not coords:
            raise ValueError(f"path node {token!r} must look like LABEL:c1,c2")
        nodes.append([label, [float(v) for v in coords.split(",")]])
    if len(nodes) < 2:
        raise ValueError("--path needs at least two nodes")
    return {"nodes": nodes}


def _merge_flags(cfg: dict, args) -> dict:
    cfg = dict(cfg)
    simple = {
        "ec": "ec", "nbands": "nbands", "grid": "grid", "electrons": "electrons",
        "seed": "seed", "threads": "threads", "out": "out",
    }
    for attr, key in simple.items():
        value = getattr(args, attr, None)
        if value is not None:
            cfg[key] = value
    if getattr(args, "ec_ladder", None) is not None:
        cfg["ec_ladder"] = [float(v) for v in args.ec_ladder.split(",")]
    if getattr(args, "scheme", None) is not None:
        cfg["scheme"] = args.scheme
    if getattr(args, "path", None) is not None:
        merged = _parse_path_flag(args.path)
        samples = cfg.get("path", {}).get("samples")
        if samples is not None:
            merged["samples"] = samples
        cfg["path"] = merged
    blow = dict(cfg.get("blowup", {}))
    for attr, key in (("blowup_m", "m"), ("blowup_p", "p"),
                      ("blowup_c", "c"), ("blowup_a", "a")):
        value = getattr(args, attr, None)
        if value is not None:
            blow[key] = value
    if blow:
        cfg["blowup"] = blow
    return cfg


def _build_lattice(cfg: dict) -> Lattice:
    return lattice_from_dict(_need(cfg, "lattice"))


def _build_potential(cfg: dict, lat: Lattice) -> FourierPotential:
    spec = cfg.get("potential")
    if spec is None:
        return potential_from_coeffs(lat, [])
    if "file" in spec:
        V = load_potential(spec["file"])
        if V.lattice.to_dict() != lat.to_dict():
            raise ValueError("potential file was built for a different lattice")
        return V
    if "synth" in spec:
        s = spec["synth"]
        return synth_power_law(
            lat, t=float(_need(s, "t")), gmax=int(_need(s, "gmax")),
            seed=int(s.get("seed", cfg.get("seed", 0))),
            amplitude=float(s.get("amplitude", 1.0)),
        )
    if "coeffs" in spec:
        entries = [
            (tuple(int(v) for v in item["g"]), complex(item["re"], item.get("im", 0.0)))
            for item in spec["coeffs"]
        ]
        return potential_from_coeffs(lat, entries,
                                     real_valued=bool(spec.get("real_valued", True)))
    raise ValueError("potential config needs one of: file, synth, coeffs")


def _build_blowup_from_cfg(cfg: dict):
    blow = cfg.get("blowup", {"m": 1, "p": 1.5, "c": 1.0})
    spec = BlowupSpec(
        m=int(_need(blow, "m")), p=float(_need(blow, "p")),
        C=None if blow.get("c") is None else float(blow["c"]),
        a=float(blow.get("a", 0.75)),
        msmooth=None if blow.get("msmooth") is None else int(blow["msmooth"]),
    )
    return build_blowup(spec)


def _build_scheme(cfg: dict) -> Scheme:
    name = _SCHEME_NAMES.get(cfg.get("scheme", "kdep"))
    if name is None:
        raise ValueError(f"unknown scheme {cfg.get('scheme')!r}")
    if name == "uniform":
        return uniform_scheme()
    if name == "kdependent":
        return kdependent_scheme()
    return modified_scheme(_build_blowup_from_cfg(cfg))


def _build_kset(cfg: dict, lat: Lattice, require: str | None = None):
    has_path, has_grid = "path" in cfg, "grid" in cfg
    if require == "grid" or (require is None and has_grid and not has_path):
        return uniform_grid(lat, int(_need(cfg, "grid")))
    if require == "path" or (require is None and has_path and not has_grid):
        path = _need(cfg, "path")
        nodes = [
            (str(label), lat.reciprocal @ np.asarray(frac, dtype=float))
            for label, frac in _need(path, "nodes")
        ]
        return kpath(lat, nodes, int(path.get("samples", 100)))
    raise ValueError("exactly one of 'path' and 'grid' must be configured")


def _outdir(cfg: dict) -> Path:
    out = Path(cfg.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def _resolve(cfg: dict, out: Path) -> None:
    _write_json(out / "resolved_config.json", cfg)


def cmd_bands(args) -> int:
    cfg = _merge_flags(_load_config(args.config), args)
    lat = _build_lattice(cfg)
    V = _build_potential(cfg, lat)
    scheme = _build_scheme(cfg)
    kset = _build_kset(cfg, lat)
    bands = compute_bands(lat, V, kset, float(_need(cfg, "ec")), scheme,
                          int(cfg.get("nbands", 4)), threads=int(cfg.get("threads", 1)))
    out = _outdir(cfg)
    _resolve(cfg, out)
    bands_to_csv(bands, out / "bands.csv")
    _write_json(out / "summary.json", {
        "command": "bands", "n_k": len(kset), "labels": {str(i): s for i, s in kset.labels.items()},
        **bands.metadata,
    })
    print(f"wrote {out / 'bands.csv'} ({len(kset)} k-points, {bands.n_bands} bands)")
    return EXIT_OK


def cmd_dos(args) -> int:
    cfg = _merge_flags(_load_config(args.config), args)
    lat = _build_lattice(cfg)
    V = _build_potential(cfg, lat)
    scheme = _build_scheme(cfg)
    grid = _build_kset(cfg, lat, require="grid")
    bands = compute_bands(lat, V, grid, float(_need(cfg, "ec")), scheme,
                          int(cfg.get("nbands", 4)), threads=int(cfg.get("threads", 1)))
    lo, hi = float(bands.energies.min()), float(bands.energies.max())
    margin = 0.05 * (hi - lo) if hi > lo else 1.0
    mus = np.linspace(lo - margin, hi + margin, int(cfg.get("mu_points", 200)))
    truncated = False
    rows = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        for mu in mus:
            rows.append((mu, idos(bands, mu), idoe(bands, mu)))
        truncated = any(issubclass(w.category, TruncationWarning) for w in caught)
    out = _outdir(cfg)
    _resolve(cfg, out)
    _write_csv(out / "dos.csv", ["mu", "idos", "idoe"], rows)
    _write_json(out / "summary.json", {
        "command": "dos", "truncated_top_band": truncated, **bands.metadata,
    })
    print(f"wrote {out / 'dos.csv'} ({len(mus)} levels)")
    return EXIT_OK


def cmd_fermi(args) -> int:
    cfg = _merge_flags(_load_config(args.config), args)
    lat = _build_lattice(cfg)
    V = _build_potential(cfg, lat)
    scheme = _build_scheme(cfg)
    grid = _build_kset(cfg, lat, require="grid")
    bands = compute_bands(lat, V, grid, float(_need(cfg, "ec")), scheme,
                          int(cfg.get("nbands", 4)), threads=int(cfg.get("threads", 1)))
    level = fermi_level(bands, float(cfg.get("electrons", 1.0)))
    out = _outdir(cfg)
    _resolve(cfg, out)
    payload = {
        "command": "fermi", "mu": level.mu, "plateau_lower": level.lower,
        "plateau_upper": level.upper,
        "gap_width": None if level.gap is None else level.gap.width,
        **bands.metadata,
    }
    _write_json(out / "fermi.json", payload)
    print(f"fermi level mu = {level.mu:.12g} (plateau [{level.lower:.12g}, {level.upper:.12g}])")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _merge_flags(_load_config(args.config), args)
    lat = _build_lattice(cfg)
    V = _build_potential(cfg, lat)
    scheme = _build_scheme(cfg)
    kset = _build_kset(cfg, lat)
    ladder = [float(v) for v in _need(cfg, "ec_ladder")]
    ec_ref = float(cfg.get("ec_reference", 16.0 * max(ladder)))
    band_index = int(cfg.get("band_index", 1))
    threads = int(cfg.get("threads", 1))
    r = cfg.get("sobolev_r")
    if r is None and "synth" in cfg.get("potential", {}):
        r = float(cfg["potential"]["synth"]["t"]) - lat.dim / 2.0
    reference = make_reference(lat, V, kset, ec_ref, band_index, threads=threads)
    study = convergence_study(lat, V, band_index, kset, ladder, scheme, reference,
                              r_potential=r, threads=threads)
    out = _outdir(cfg)
    _resolve(cfg, out)
    _write_csv(out / "converge.csv", ["ec", "error", "clamped"],
               zip(study.ec_ladder, study.errors, study.clamped))
    _write_json(out / "converge.json", {
        "command": "converge", "fitted_rate": study.fitted_rate,
        "fitted_rate_full": study.fitted_rate_full,
        "r_potential": study.r_potential,
        "predicted_rate": study.predicted_rate, "ec_reference": ec_ref,
        "band_index": band_index, "scheme": scheme.tag,
    })
    print(f"fitted rate {study.fitted_rate:.3f}"
          + ("" if study.predicted_rate is None
             else f" (predicted {study.predicted_rate:.3f})"))
    return EXIT_OK


def cmd_regularity(args) -> int:
    cfg = _merge_flags(_load_config(args.config), args)
    lat = _build_lattice(cfg)
    V = _build_potential(cfg, lat)
    blow = cfg.get("blowup", {})
    spec = BlowupSpec(
        m=int(_need(blow, "m")), p=float(_need(blow, "p")),
        C=None if blow.get("c") is None else float(blow["c"]),
        a=float(blow.get("a", 0.75)),
        msmooth=None if blow.get("msmooth") is None else int(blow["msmooth"]),
    )
    deltas = cfg.get("deltas", [1e-2, 5e-3, 2.5e-3, 1.25e-3])
    probe = regularity_probe(
        lat, V, float(_need(cfg, "ec")), spec,
        band_index=int(cfg.get("band_index", 1)),
        order=int(cfg.get("derivative_order", 1)),
        deltas=deltas, threads=int(cfg.get("threads", 1)),
    )
    out = _outdir(cfg)
    _resolve(cfg, out)
    _write_csv(out / "regularity.csv", ["delta", "peak"], zip(probe.deltas, probe.peaks))
    _write_json(out / "regularity.json", {
        "command": "regularity", "verdict": probe.verdict,
        "band_index": probe.band_index, "derivative_order": probe.order,
        "change_points": [list(map(float, k)) for k in probe.change_points],
    })
    print(f"order-{probe.order} derivative of band {probe.band_index}: {probe.verdict}")
    return EXIT_OK


def cmd_periodicity(args) -> int:
    cfg = _merge_flags(_load_config(args.config), args)
    lat = _build_lattice(cfg)
    V = _build_potential(cfg, lat)
    names = cfg.get("schemes", ["uniform", "kdep", "modified"])
    schemes = []
    for name in names:
        schemes.append(_build_scheme({**cfg, "scheme": name}))
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    count = int(cfg.get("k_samples", 50))
    fracs = rng.uniform(-0.5, 0.5, size=(count, lat.dim))
    samples = fracs @ lat.reciprocal.T
    shifts = [tuple(int(v) for v in s) for s in cfg.get("shifts", [[1] + [0] * (lat.dim - 1)])]
    report = periodicity_report(lat, V, float(_need(cfg, "ec")), schemes, samples,
                                shifts, n_bands=int(cfg.get("nbands", 1)),
                                threads=int(cfg.get("threads", 1)))
    out = _outdir(cfg)
    _resolve(cfg, out)
    _write_json(out / "periodicity.json", {"command": "periodicity", **report})
    for tag, worst in report.items():
        print(f"{tag:>10}: max |e(k) - e(k+G)| = {worst:.3e}")
    return EXIT_OK


def cmd_cellscan(args) -> int:
    cfg = _merge_flags(_load_config(args.config), args)
    base = _build_lattice(cfg)
    ladder = cfg.get("a_ladder", {})
    center = float(ladder.get("center", 1.0))
    span = float(ladder.get("span", 0.05))
    count = int(ladder.get("count", 50))
    a_values = np.linspace(center * (1.0 - span), center * (1.0 + span), count)
    unit = base.primitive / center

    def make_lattice(a: float):
        return new_lattice(a * unit)

    def make_potential(lat):
        return _build_potential(cfg, lat)

    names = cfg.get("schemes", ["kdep", "modified"])
    schemes = [_build_scheme({**cfg, "scheme": name}) for name in names]
    scan = energy_vs_cell_parameter(
        make_lattice, make_potential, float(_need(cfg, "ec")), schemes, a_values,
        n_electrons=float(cfg.get("electrons", 1.0)), grid_n=int(cfg.get("grid", 6)),
        n_bands=int(cfg.get("nbands", 6)), threads=int(cfg.get("threads", 1)),
    )
    out = _outdir(cfg)
    _resolve(cfg, out)
    tags = [s.tag for s in schemes]
    rows = [
        [a] + [scan.energies[tag][i] for tag in tags]
        for i, a in enumerate(scan.a_values)
    ]
    _write_csv(out / "cellscan.csv", ["a"] + [f"energy_{t}" for t in tags], rows)
    _write_json(out / "cellscan.json", {
        "command": "cellscan",
        "second_differences": scan.second_differences,
    })
    for tag in tags:
        print(f"{tag:>10}: max |second difference| = {scan.second_differences[tag]:.6g}")
    return EXIT_OK


def cmd_potential_synth(args) -> int:
    cfg = _merge_flags(_load_config(args.config), args)
    lat = _build_lattice(cfg)
    V = synth_power_law(lat, t=float(args.t), gmax=int(args.gmax),
                        seed=int(cfg.get("seed", 0)), amplitude=float(args.amplitude))
    target = _outdir(cfg) / "potential.json"
    save_potential(V, target)
    print(f"wrote {target} ({len(V.coeffs)} coefficients)")
    return EXIT_OK


def cmd_blowup_check(args) -> int:
    spec = BlowupSpec(
        m=int(args.m), p=float(args.p),
        C=None if args.c is None else float(args.c),
        a=float(args.a),
        msmooth=None if args.msmooth is None else int(args.msmooth),
    )
    fn = build_blowup(spec)
    payload = {
        **fn.spec.to_dict(),
        "value_at_half": fn.eval(0.5),
        "value_at_a": fn.eval(fn.spec.a),
        "domination_margin": fn.validation["domination_margin"],
        "junction_mismatch": fn.validation["junction_mismatch"],
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _add_common_flags(sub) -> None:
    sub.add_argument("--config", help="JSON configuration file")
    sub.add_argument("--ec", type=float, help="plane-wave cutoff energy")
    sub.add_argument("--ec-ladder", dest="ec_ladder", help="comma-separated cutoffs")
    sub.add_argument("--scheme", choices=sorted(_SCHEME_NAMES), help="discretization scheme")
    sub.add_argument("--blowup-m", dest="blowup_m", type=int, help="blow-up order m")
    sub.add_argument("--blowup-p", dest="blowup_p", type=float, help="blow-up tail exponent p")
    sub.add_argument("--blowup-c", dest="blowup_c", type=float, help="blow-up tail constant C")
    sub.add_argument("--blowup-a", dest="blowup_a", type=float, help="blow-up junction point a")
    sub.add_argument("--nbands", type=int, help="number of bands")
    sub.add_argument("--grid", type=int, help="uniform grid size per dimension")
    sub.add_argument("--path", help="k-path nodes, e.g. 'G:0 X:0.5' (fractional)")
    sub.add_argument("--electrons", type=float, help="electrons per unit cell")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--seed", type=int, help="random seed")
    sub.add_argument("--threads", type=int, help="worker threads for k-point solves")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandlab",
        description="plane-wave band structures with k-dependent and "
                    "blow-up-modified discretizations",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    for name, func, doc in (
        ("bands", cmd_bands, "band structure along a path or grid"),
        ("dos", cmd_dos, "integrated density of states and energy sweep"),
        ("fermi", cmd_fermi, "Fermi level for a given electron count"),
        ("converge", cmd_converge, "cutoff convergence study against a reference"),
        ("regularity", cmd_regularity, "band derivative mesh-refinement probe"),
        ("periodicity", cmd_periodicity, "band periodicity violation report"),
        ("cellscan", cmd_cellscan, "total energy along a cell parameter ladder"),
    ):
        sub = subs.add_parser(name, help=doc)
        _add_common_flags(sub)
        sub.set_defaults(func=func)

    pot = subs.add_parser("potential", help="potential utilities")
    pot_subs = pot.add_subparsers(dest="subcommand", required=True)
    synth = pot_subs.add_parser("synth", help="synthesize a power-law potential")
    _add_common_flags(synth)
    synth.add_argument("--t", type=float, required=True, help="decay exponent")
    synth.add_argument("--gmax", type=int, required=True, help="coefficient box radius")
    synth.add_argument("--amplitude", type=float, default=1.0, help="global scale")
    synth.set_defaults(func=cmd_potential_synth)

    blow = subs.add_parser("blowup", help="blow-up function utilities")
    blow_subs = blow.add_subparsers(dest="subcommand", required=True)
    check = blow_subs.add_parser("check", help="validate a blow-up specification")
    check.add_argument("--m", type=int, required=True, help="smoothness order m")
    check.add_argument("--p", type=float, required=True, help="tail exponent p")
    check.add_argument("--c", type=float, default=None, help="tail constant C")
    check.add_argument("--a", type=float, default=0.75, help="junction point a")
    check.add_argument("--msmooth", type=int, default=None, help="junction smoothness order")
    check.set_defaults(func=cmd_blowup_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: JSON config in, deterministic JSON document out.

Exit codes: 0 success, 2 invalid configuration, 3 an oracle contradicted
the closed form.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ultraspec import oracle as orc
from ultraspec.berkline import (
    CLOSED,
    BerkPoint,
    Disk,
    Spectrum,
    separation,
)
from ultraspec.diffmod import (
    AffinoidDomain,
    ClosedDiskDomain,
    DiffModuleSpec,
    DiffPoly,
    DisjointUnionDomain,
    DomainError,
    PointDomain,
    validate_domain,
)
from ultraspec.specengine import (
    derivation_spectrum,
    module_spectrum,
    spectra_report,
)
from ultraspec.valcore import (
    Exponent,
    FieldSpec,
    InvalidScalarError,
    factorial_valuation,
    format_exponent,
    format_scalar,
    omega,
    parse_exponent,
    valuation,
)
from ultraspec import vary as vry

SCHEMA = "ultraspec/1"
COMMANDS = ("spectrum", "compare", "oracle", "vary")
PROBES = ("power-norm", "spectral-estimate", "kernel", "divergence", "annulus", "resolvent", "type4")

EXIT_OK, EXIT_INVALID, EXIT_MISMATCH = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


# --------------------------------------------------------------------------
# Parsing


def _keys(doc, where: str, required=(), optional=()) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(where, "expected an object")
    for k in required:
        if k not in doc:
            raise ConfigError(f"{where}.{k}", "missing")
    extra = set(doc) - set(required) - set(optional)
    if extra:
        raise ConfigError(f"{where}.{sorted(extra)[0]}", "unknown key")


def _scalar(text, f: FieldSpec, where: str):
    if not isinstance(text, str):
        raise ConfigError(where, "scalars are given as strings")
    try:
        return f.scalar(text)
    except (InvalidScalarError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(where, str(exc)) from None


def _exponent(text, where: str) -> Exponent:
    if not isinstance(text, str):
        raise ConfigError(where, "exponents are given as strings")
    try:
        e = parse_exponent(text)
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None
    if e.inf:
        raise ConfigError(where, "radius must be positive")
    return e


def parse_field(doc) -> FieldSpec:
    _keys(doc, "field", ("mode",), ("p",))
    try:
        if doc["mode"] == "p-adic":
            if not isinstance(doc.get("p"), int):
                raise ConfigError("field.p", "p-adic mode needs an integer prime")
            return FieldSpec.padic(doc["p"])
        if "p" in doc:
            raise ConfigError("field.p", f"{doc['mode']} mode takes no prime")
        return FieldSpec(doc["mode"])
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("field", str(exc)) from None


def _parse_connected(doc, f: FieldSpec, where: str):
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "closed-disk":
        _keys(doc, where, ("kind", "center", "radius_exp"))
        return ClosedDiskDomain(
            _scalar(doc["center"], f, f"{where}.center"),
            _exponent(doc["radius_exp"], f"{where}.radius_exp"),
        )
    if kind == "affinoid":
        _keys(doc, where, ("kind", "center", "radius_exp", "holes"))
        if not isinstance(doc["holes"], list):
            raise ConfigError(f"{where}.holes", "expected a list")
        holes = []
        for i, h in enumerate(doc["holes"]):
            hw = f"{where}.holes[{i}]"
            _keys(h, hw, ("center", "radius_exp"))
            holes.append((_scalar(h["center"], f, f"{hw}.center"), _exponent(h["radius_exp"], f"{hw}.radius_exp")))
        return AffinoidDomain(
            _scalar(doc["center"], f, f"{where}.center"),
            _exponent(doc["radius_exp"], f"{where}.radius_exp"),
            tuple(holes),
        )
    raise ConfigError(f"{where}.kind", f"unknown domain kind {kind!r}")


def parse_point(doc, f: FieldSpec, where: str) -> BerkPoint:
    t = doc.get("type") if isinstance(doc, dict) else None
    if t in ("type2", "type3", "type23"):
        _keys(doc, where, ("type", "center", "radius_exp"), ("kind",))
        return BerkPoint.shilov(
            _scalar(doc["center"], f, f"{where}.center"), _exponent(doc["radius_exp"], f"{where}.radius_exp")
        )
    if t == "type4":
        _keys(doc, where, ("type", "radius_exp", "family"), ("kind",))
        fam = []
        if not isinstance(doc["family"], list):
            raise ConfigError(f"{where}.family", "expected a list")
        for i, d in enumerate(doc["family"]):
            fw = f"{where}.family[{i}]"
            _keys(d, fw, ("center", "radius_exp"))
            fam.append((_scalar(d["center"], f, f"{fw}.center"), _exponent(d["radius_exp"], f"{fw}.radius_exp")))
        return BerkPoint.type4(_exponent(doc["radius_exp"], f"{where}.radius_exp"), fam)
    raise ConfigError(f"{where}.type", f"unknown point type {t!r}")


def parse_domain(doc, f: FieldSpec, where: str = "domain"):
    if not isinstance(doc, dict):
        raise ConfigError(where, "expected an object")
    kind = doc.get("kind")
    if kind == "disjoint-union":
        _keys(doc, where, ("kind", "parts"))
        if not isinstance(doc["parts"], list):
            raise ConfigError(f"{where}.parts", "expected a list")
        dom = DisjointUnionDomain(
            tuple(_parse_connected(p, f, f"{where}.parts[{i}]") for i, p in enumerate(doc["parts"]))
        )
    elif kind == "point":
        dom = PointDomain(parse_point(doc, f, where))
        if dom.point.kind == "type23" and doc["type"] in ("type2", "type3"):
            want = int(doc["type"][-1])
            if dom.point.point_type(f) != want:
                raise ConfigError(f"{where}.type", f"radius makes this a type ({dom.point.point_type(f)}) point")
    else:
        dom = _parse_connected(doc, f, where)
    try:
        validate_domain(dom, f)
    except DomainError as exc:
        raise ConfigError(where, str(exc)) from None
    return dom


def parse_module(doc, f: FieldSpec) -> DiffModuleSpec:
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "matrix":
        _keys(doc, "module", ("kind", "entries"))
        rows = doc["entries"]
        if not isinstance(rows, list) or not rows or any(not isinstance(r, list) or len(r) != len(rows) for r in rows):
            raise ConfigError("module.entries", "expected a nonempty square matrix")
        G = [[_scalar(x, f, f"module.entries[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]
        return DiffModuleSpec.from_matrix(G, f)
    if kind == "diffpoly":
        _keys(doc, "module", ("kind", "coeffs"))
        cs = doc["coeffs"]
        if not isinstance(cs, list) or not cs:
            raise ConfigError("module.coeffs", "expected a nonempty list g_0..g_{nu-1}")
        P = DiffPoly(tuple(_scalar(x, f, f"module.coeffs[{i}]") for i, x in enumerate(cs)))
        return DiffModuleSpec.from_diffpoly(P, f)
    raise ConfigError("module.kind", f"unknown module kind {kind!r}")


@dataclass
class RunConfig:
    field: FieldSpec
    domain: object
    module: DiffModuleSpec | None
    command: str
    oracle: dict
    vary: dict
    raw: dict


_ORACLE_KEYS = ("probes", "points", "n_max", "K", "levels", "N", "samples", "seed")
_VARY_KEYS = ("center", "rho_high", "rho_low", "grid", "margins", "witness_at")


def parse_config(doc) -> RunConfig:
    _keys(doc, "config", ("field", "command"), ("schema", "domain", "module", "oracle", "vary"))
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise ConfigError("config.schema", f"expected {SCHEMA!r}")
    f = parse_field(doc["field"])
    cmd = doc["command"]
    if cmd not in COMMANDS:
        raise ConfigError("config.command", f"expected one of {', '.join(COMMANDS)}")
    dom = parse_domain(doc["domain"], f) if "domain" in doc else None
    mod = parse_module(doc["module"], f) if "module" in doc else None
    if cmd in ("spectrum", "compare", "oracle") and dom is None:
        raise ConfigError("config.domain", f"{cmd} needs a domain")
    if cmd in ("spectrum", "compare", "vary") and mod is None:
        raise ConfigError("config.module", f"{cmd} needs a module")
    if cmd == "compare" and mod.source is None:
        raise ConfigError("module.kind", "compare needs a differential polynomial")
    oc = doc.get("oracle", {})
    _keys(oc, "oracle", (), _ORACLE_KEYS)
    for p in oc.get("probes", []):
        if p not in PROBES:
            raise ConfigError("oracle.probes", f"unknown probe {p!r}")
    vc = doc.get("vary", {})
    _keys(vc, "vary", (), _VARY_KEYS)
    if cmd == "vary":
        for k in ("rho_high", "rho_low"):
            if k not in vc:
                raise ConfigError(f"vary.{k}", "missing")
    return RunConfig(f, dom, mod, cmd, oc, vc, doc)


# --------------------------------------------------------------------------
# Documents


def field_doc(f: FieldSpec) -> dict:
    return {"mode": f.mode, "p": f.p} if f.p else {"mode": f.mode}


def disk_doc(d: Disk) -> dict:
    return {"center": format_scalar(d.center), "radius_exp": format_exponent(d.radius), "kind": d.kind}


def spectrum_doc(s: Spectrum) -> dict:
    return {
        "spectrum": [disk_doc(d) for d in s.disks],
        "components": [list(c) for c in s.components],
    }


def report_doc(rep) -> dict:
    doc = spectrum_doc(rep.spectrum)
    doc["enclosing_radius_exp"] = format_exponent(rep.enclosing_radius)
    doc["case"] = rep.case
    doc["flags"] = list(rep.flags)
    doc["eigenvalues"] = [{"value": format_scalar(a), "multiplicity": int(m)} for a, m in rep.eigenvalues]
    if rep.symbolic:
        doc["symbolic"] = [
            {
                "factor": [format_scalar(c) for c in s.factor],
                "root_valuation": format_exponent(s.root_valuation),
                "multiplicity": int(s.multiplicity),
                "radius_exp": format_exponent(s.radius),
                "kind": s.kind,
            }
            for s in rep.symbolic
        ]
    return doc


def _exp_or_str(x):
    return x if isinstance(x, str) else format_exponent(x)


# --------------------------------------------------------------------------
# Commands


def cmd_spectrum(cfg: RunConfig) -> tuple[dict, int, object]:
    rep = module_spectrum(cfg.module, cfg.domain, cfg.field)
    return report_doc(rep), EXIT_OK, rep.spectrum


def cmd_compare(cfg: RunConfig) -> tuple[dict, int, object]:
    cmp_ = spectra_report(cfg.module.source, cfg.domain, cfg.field)
    doc = {
        "module": report_doc(cmp_.module),
        "operator": spectrum_doc(cmp_.operator),
        "verdict": cmp_.verdict,
    }
    return doc, EXIT_OK, cmp_.operator


def _default_points(f: FieldSpec, sigma: Spectrum) -> list:
    R = sigma.disks[0].radius
    out = []
    for k in range(-2, 3):
        e = R + Fraction(k, 2)
        try:
            out.append(f.uniformizer_power(e))
        except ValueError:
            continue
    return out


def _probe_doc(name, inputs, verdict, exps=()) -> dict:
    return {"probe": name, "inputs": inputs, "verdict": verdict, "exponents": [_exp_or_str(e) for e in exps]}


def _run_probe(name: str, cfg: RunConfig, sigma: Spectrum) -> dict:
    f, dom, oc = cfg.field, cfg.domain, cfg.oracle
    pts = [_scalar(x, f, "oracle.points") for x in oc.get("points", [])] or _default_points(f, sigma)
    if name == "power-norm":
        n_max = int(oc.get("n_max", 16))
        norms = orc.truncated_power_norms(n_max, dom, f, n_max + 1)
        rho = orc._dominant_radius_exp(dom)
        ok = all(norms[n] == factorial_valuation(n, f) - rho * n for n in range(n_max + 1))
        return _probe_doc(name, {"n_max": n_max}, "agree" if ok else "mismatch", norms)
    if name == "spectral-estimate":
        K = int(oc.get("K", 5))
        est = orc.spectral_norm_estimate(dom, f, K)
        n = est.ns[-1]
        ok = est.monotone and est.gap == omega(f) - factorial_valuation(n, f) / n
        return _probe_doc(name, {"K": K, "gap": format_exponent(est.gap)}, "agree" if ok else "mismatch", est.exponents)
    if name == "kernel":
        if not isinstance(dom, (ClosedDiskDomain,)):
            return _probe_doc(name, {}, "skipped")
        R = sigma.disks[0].radius
        res = []
        ok = True
        for a in pts:
            k = orc.kernel_witness(a, dom, f)
            ok &= k == (valuation(a, f) > R)
            ok &= (not k) or sigma.contains(BerkPoint.rigid(a))
            res.append(f"{format_scalar(a)}:{str(k).lower()}")
        return _probe_doc(name, {"points": res}, "agree" if ok else "mismatch")
    if name == "divergence":
        if f.mode != "p-adic" or not isinstance(dom, ClosedDiskDomain):
            return _probe_doc(name, {}, "skipped")
        L = int(oc.get("levels", 4))
        exps = orc.divergence_witness(f, dom.radius, L)
        ok = all(e == dom.radius - Fraction(l, 2) for l, e in enumerate(exps))
        return _probe_doc(name, {"levels": L}, "agree" if ok else "mismatch", exps)
    if name == "annulus":
        try:
            orc._hole_radius(dom)
        except orc.OracleError:
            return _probe_doc(name, {}, "skipped")
        res, ok = [], True
        for a in pts:
            if not a:
                continue
            pr = orc.annulus_resolvent_probe(a, dom, f, int(oc.get("N", 256)))
            inside = sigma.contains(BerkPoint.rigid(a))
            ok &= (pr.verdict == "diverges") == inside
            res.append(f"{format_scalar(a)}:{pr.verdict}")
        return _probe_doc(name, {"points": res}, "agree" if ok else "mismatch")
    if name == "resolvent":
        res, ok = [], True
        for a in pts:
            pt = BerkPoint.rigid(a)
            if sigma.contains(pt):
                continue
            pr = orc.resolvent_radius_probe(a, dom, f)
            sep = separation(pt, sigma)
            ok &= abs(float(pr.separation) - float(sep)) <= 0.1
            res.append(f"{format_scalar(a)}:{format_exponent(pr.separation)}")
        return _probe_doc(name, {"points": res}, "agree" if ok else "mismatch")
    if name == "type4":
        if not (isinstance(dom, PointDomain) and dom.point.kind == "type4" and f.residue_char_zero):
            return _probe_doc(name, {}, "skipped")
        try:
            a = f.uniformizer_power(-dom.point.radius)
        except ValueError:
            return _probe_doc(name, {}, "skipped")
        rep = orc.type4_bound_check(
            dom.point, a, f, samples=int(oc.get("samples", 20)), seed=int(oc.get("seed", 0))
        )
        return _probe_doc(
            name, {"a": format_scalar(a), "min_ratio_exp": format_exponent(rep.min_ratio)},
            "agree" if rep.holds else "mismatch",
        )
    raise ConfigError("oracle.probes", f"unknown probe {name!r}")


def cmd_oracle(cfg: RunConfig, probes=None) -> tuple[dict, int, object]:
    sigma = derivation_spectrum(cfg.domain, cfg.field)
    names = probes or cfg.oracle.get("probes") or list(PROBES)
    reports = [_run_probe(n, cfg, sigma) for n in names]
    code = EXIT_MISMATCH if any(r["verdict"] == "mismatch" for r in reports) else EXIT_OK
    doc = {"closed_form": spectrum_doc(sigma), "probes": reports}
    return doc, code, sigma


def cmd_vary(cfg: RunConfig, grid_n=None) -> tuple[dict, int, object]:
    f, vc = cfg.field, cfg.vary
    center = _scalar(vc.get("center", "0"), f, "vary.center")
    hi = _exponent(vc["rho_high"], "vary.rho_high")
    lo = _exponent(vc["rho_low"], "vary.rho_low")
    try:
        if grid_n is not None or "grid" not in vc:
            seg = vry.SegmentSpec.uniform(center, hi, lo, int(grid_n or 17))
        else:
            seg = vry.SegmentSpec(center, hi, lo, tuple(_exponent(g, "vary.grid") for g in vc["grid"]))
    except ValueError as exc:
        raise ConfigError("vary", str(exc)) from None
    analysis = cfg.module.analyze(f)
    if not analysis.resolved:
        raise ConfigError("module", "valuation-only module: vary needs resolved eigenvalues")
    margins = [Fraction(m) for m in vc.get("margins", ["1/4", "1/2", "1"])]
    samples = vry.sample_segment(analysis, seg, f)
    rows, code = [], EXIT_OK
    for s in samples:
        row = {"rho": format_exponent(s.rho), "type": s.point_type, **spectrum_doc(s.spectrum), "flags": []}
        thresholds = []
        for eps in margins:
            n = vry.margin_neighborhood(s.spectrum, eps)
            t = vry.left_continuity_threshold(analysis, seg, s.rho, n, f)
            entry = {"margin": str(eps), "left": None if t is None else format_exponent(t)}
            if s.point_type == 3:
                t2 = vry.two_sided_threshold(analysis, seg, s.rho, n, f)
                entry["two_sided"] = None if t2 is None else format_exponent(t2)
                if t2 is None:
                    code = EXIT_MISMATCH
            if t is None:
                code = EXIT_MISMATCH
            thresholds.append(entry)
        row["continuity"] = thresholds
        rows.append(row)
    doc = {"samples": rows}
    if "witness_at" in vc:
        y = _exponent(vc["witness_at"], "vary.witness_at")
        try:
            w = vry.discontinuity_witness(analysis, seg, y, f)
        except ValueError as exc:
            raise ConfigError("vary.witness_at", str(exc)) from None
        doc["discontinuity"] = {
            "y": format_exponent(y),
            "witness": format_scalar(w.witness),
            "boundary_exp": format_exponent(w.boundary_exp),
            "in_sigma_y": w.in_sigma_y,
            "separations": [[format_exponent(r), _exp_or_str(s)] for r, s in w.samples],
            "constant": w.constant,
            "never_enters": w.never_enters,
        }
        if not (w.in_sigma_y and w.constant and w.never_enters):
            code = EXIT_MISMATCH
    return doc, code, samples


# --------------------------------------------------------------------------
# Rendering


def _disk_line(d: Disk) -> str:
    body = f"c={format_scalar(d.center)} rexp={format_exponent(d.radius)} {d.kind}"
    return f"[ {body} ]" if d.kind == CLOSED else f"( {body} ]ˢ"


def render_dendrogram(s: Spectrum) -> str:
    """One line per disk, components with several disks under a header."""
    lines = []
    for ci, comp in enumerate(s.components):
        if len(comp) == 1:
            lines.append(_disk_line(s.disks[comp[0]]))
            continue
        lines.append(f"* component {ci}: {len(comp)} disks touching at a Shilov point")
        lines.extend("  " + _disk_line(s.disks[i]) for i in comp)
    return "\n".join(lines) + "\n"


def _px(e: Exponent) -> float:
    # log-radius scale: exponent 0 -> 60px, each unit halves/doubles the size
    return round(max(4.0, 60.0 * 2.0 ** (-float(e))), 3)


def render_svg(obj) -> str:
    """Nested circles for a spectrum; a radius strip chart for vary samples."""
    out = ['<svg xmlns="http://www.w3.org/2000/svg" version="1.1"']
    if isinstance(obj, Spectrum):
        sizes = [_px(d.radius) for d in obj.disks]
        width = sum(2 * r + 20 for r in sizes) + 20
        height = 2 * max(sizes) + 40
        out[0] += f' width="{width:.3f}" height="{height:.3f}">'
        x = 20.0
        for d, r in zip(obj.disks, sizes):
            dash = "" if d.kind == CLOSED else ' stroke-dasharray="4 2"'
            out.append(
                f'<circle cx="{x + r:.3f}" cy="{height / 2:.3f}" r="{r:.3f}" fill="none" stroke="black"{dash}>'
                f"<title>{_disk_line(d)}</title></circle>"
            )
            x += 2 * r + 20
    else:
        samples = list(obj)
        width = 40 * len(samples) + 40
        out[0] += f' width="{width}" height="200">'
        out.append('<line x1="20" y1="180" x2="%d" y2="180" stroke="black"/>' % (width - 20))
        for i, s in enumerate(samples):
            d = s.spectrum.disks[0]
            y = round(180 - min(160.0, _px(d.radius)), 3)
            cx = 40 + 40 * i
            out.append(
                f'<line class="tick" x1="{cx}" y1="180" x2="{cx}" y2="{y:.3f}" stroke="black">'
                f"<title>rho={format_exponent(s.rho)} type={s.point_type}</title></line>"
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ultraspec", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, help="JSON configuration file ('-' for stdin)")
    ap.add_argument("--out", help="write the result document here instead of stdout")
    ap.add_argument("--render", choices=("ascii", "svg", "none"), default="none")
    ap.add_argument("--probe", help="comma-separated oracle probes (overrides the config)")
    ap.add_argument("--grid", type=int, help="uniform grid size for vary")
    return ap


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def run(doc: dict, probes=None, grid=None) -> tuple[dict, int, object]:
    cfg = parse_config(doc)
    if cfg.command == "spectrum":
        body, code, obj = cmd_spectrum(cfg)
    elif cfg.command == "compare":
        body, code, obj = cmd_compare(cfg)
    elif cfg.command == "oracle":
        body, code, obj = cmd_oracle(cfg, probes)
    else:
        body, code, obj = cmd_vary(cfg, grid)
    out = {"schema": SCHEMA, "command": cfg.command, "field": field_doc(cfg.field)}
    out.update(body)
    return out, code, obj


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"error: config line {exc.lineno} column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_INVALID
    probes = None
    if args.probe:
        probes = [p.strip() for p in args.probe.split(",") if p.strip()]
        bad = [p for p in probes if p not in PROBES]
        if bad:
            print(f"error: --probe: unknown probe {bad[0]!r}", file=sys.stderr)
            return EXIT_INVALID
    try:
        out, code, obj = run(doc, probes, args.grid)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = dumps(out)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.render != "none":
        if isinstance(obj, Spectrum):
            rendered = render_dendrogram(obj) if args.render == "ascii" else render_svg(obj)
        elif args.render == "svg":
            rendered = render_svg(obj)
        else:
            rendered = "".join(render_dendrogram(s.spectrum) for s in obj)
        if args.out and args.render == "svg":
            Path(args.out).with_suffix(".svg").write_text(rendered)
        else:
            sys.stdout.write(rendered)
    if code == EXIT_MISMATCH:
        print("error: an oracle verdict contradicts the closed form", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

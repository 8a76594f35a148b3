"""Command-line front end: document ingestion, dispatch, machine-readable
reports, and the bundled corpus regression.

Reports are deterministic: identical (input, config, seed) produce
byte-identical JSON. Exit codes: 0 success, 1 usage, 2 parse/validate
failure, 3 regression mismatch, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import resources

import numpy as np

from . import __version__, corpus
from . import _linalg as la
from ._linalg import format_fraction, parse_fraction
from .coadjoint import (
    Covector,
    InvariantViolation,
    enumerate_strata,
    has_flat_orbits,
    is_on_gamma_partial,
    jump_indices,
    observed_top_stratum,
    pfaffian_on_center_dual,
    vergne_polarization,
)
from .hellip import (
    BvEOperatorSpec,
    RocklandCheckConfig,
    bve_symbol,
    check_bve_sphere,
    check_engel_gamma,
    rockland_bruteforce,
)
from .lagrangian import (
    Lagrangian,
    SymplecticSpace,
    lion_cocycle_check,
    random_lagrangian,
)
from .liealg import (
    GradedNilpotentLieAlgebra,
    LieAlgebraError,
    center,
    flag_from_permutation,
    jordan_holder_basis,
    mohsen_modification,
    mohsen_standard_flag,
    step_length,
    validate,
)
from .symbolrep import flat_rep

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_REGRESSION = 3
EXIT_INTERNAL = 4

COMMANDS = (
    "validate",
    "orbits",
    "stratify",
    "polarize",
    "maslov-demo",
    "helliptic",
    "engel-check",
    "mohsen",
    "corpus-regression",
)


class DocumentError(ValueError):
    """Algebra document failed to parse or validate."""


# -- documents -----------------------------------------------------------------


def _coeff_to_complex(entry) -> complex:
    if isinstance(entry, (list, tuple)):
        re, im = entry
        return complex(float(parse_fraction(re)), float(parse_fraction(im)))
    return complex(float(parse_fraction(entry)), 0.0)


def document_to_algebra(doc: dict):
    """(algebra, flag-or-None, operator-block-or-None) from a parsed document."""
    try:
        dim = int(doc["dimension"])
        weights = tuple(int(w) for w in doc["weights"])
        brackets: dict = {}
        for ent in doc.get("brackets", []):
            i, j, k = int(ent["i"]) - 1, int(ent["j"]) - 1, int(ent["k"]) - 1
            coeff = parse_fraction(ent["coeff"])
            if i == j:
                raise DocumentError(f"bracket [X_{i+1},X_{i+1}] is not allowed")
            key = (i, j) if i < j else (j, i)
            if i > j:
                coeff = -coeff
            row = brackets.setdefault(key, {})
            row[k] = row.get(k, Fraction(0)) + coeff
        algebra = GradedNilpotentLieAlgebra(
            dim, weights, brackets, name=str(doc.get("name", ""))
        )
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"malformed algebra document: {exc}") from exc
    diags = validate(algebra)
    if diags:
        raise DocumentError("algebra violates axioms: " + "; ".join(diags))
    flag = None
    if "flag" in doc and doc["flag"] is not None:
        try:
            flag = flag_from_permutation(
                algebra, [int(p) - 1 for p in doc["flag"]]
            )
        except LieAlgebraError as exc:
            raise DocumentError(f"invalid flag: {exc}") from exc
    operator = doc.get("operator")
    return algebra, flag, operator


def algebra_to_document(algebra: GradedNilpotentLieAlgebra, extra=None) -> dict:
    entries = []
    for (i, j), row in sorted(algebra.brackets.items()):
        for k, c in sorted(row.items()):
            entries.append(
                {"i": i + 1, "j": j + 1, "k": k + 1, "coeff": format_fraction(c)}
            )
    doc = {
        "name": algebra.name,
        "dimension": algebra.dim,
        "weights": list(algebra.weights),
        "brackets": entries,
    }
    if extra:
        doc.update(extra)
    return doc


def load_document(path: str) -> dict:
    if path.endswith(".toml"):
        try:
            import tomllib  # py >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentError(
                f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def document_fingerprint(doc: dict) -> str:
    body = {k: v for k, v in doc.items() if k != "provenance"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


def operator_spec_from_block(algebra, flag, block) -> BvEOperatorSpec:
    if block is None or "gamma" not in block:
        raise DocumentError("document has no operator block with gamma data")
    gams = []
    for gmat in block["gamma"]:
        gams.append([[_coeff_to_complex(e) for e in row] for row in gmat])
    metric = None
    if block.get("metric") is not None:
        metric = tuple(
            tuple(parse_fraction(x) for x in row) for row in block["metric"]
        )
    return BvEOperatorSpec(algebra, tuple(gams), flag, metric)


# -- reports -------------------------------------------------------------------


def build_report(command: str, options: dict, results: dict, warnings, doc=None):
    report = {
        "schema_version": "1",
        "tool": {"name": "nilcalc", "version": __version__},
        "command": {"name": command, "options": options},
        "input": None,
        "results": results,
        "warnings": sorted(warnings),
    }
    if doc is not None:
        report["input"] = {
            "name": doc.get("name", ""),
            "fingerprint": document_fingerprint(doc),
        }
    return report


def emit_report(report: dict, path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def report_schema() -> dict:
    data = resources.files("nilcalc.data").joinpath("report-schema.json")
    return json.loads(data.read_text(encoding="utf-8"))


# -- covector helpers ------------------------------------------------------------


def parse_xi(algebra, flag, text: str) -> Covector:
    parts = [parse_fraction(p) for p in text.split(",")]
    if len(parts) == flag.center_dim:
        return Covector.from_center_dual(algebra, flag, parts)
    if len(parts) == algebra.dim:
        return Covector.from_coords(parts)
    raise DocumentError(
        f"--xi needs {flag.center_dim} (z*) or {algebra.dim} (g*) coordinates"
    )


# -- command implementations --------------------------------------------------


def cmd_validate(algebra, flag, operator, args):
    diags = validate(algebra)
    return {
        "diagnostics": diags,
        "valid": not diags,
        "dimension": algebra.dim,
        "weights": list(algebra.weights),
    }, []


def cmd_orbits(algebra, flag, operator, args):
    flag = flag or jordan_holder_basis(algebra)
    z = center(algebra)
    pf = pfaffian_on_center_dual(algebra, flag)
    flat, witness = has_flat_orbits(algebra, flag)
    results = {
        "center_dimension": z.dim,
        "center_codimension": algebra.dim - z.dim,
        "step": step_length(algebra),
        "flag": [p + 1 for p in flag.permutation],
        "pfaffian": str(pf.poly),
        "pfaffian_degree": pf.poly.degree(),
        "odd_codimension": pf.odd_codimension,
        "has_flat_orbits": flat,
    }
    warnings = []
    if pf.odd_codimension:
        results["no_flat_reason"] = "odd codimension of center"
    elif not flat:
        results["no_flat_reason"] = "pfaffian vanishes identically"
    if flat:
        zc = witness.restrict_to_center(algebra, flag)
        results["witness_zstar"] = [format_fraction(c) for c in zc]
        results["witness_on_gamma_partial"] = is_on_gamma_partial(
            algebra, flag, witness
        )
    return results, warnings


def _stratify_samples(algebra, flag, resolution, seed):
    n = algebra.dim
    rng = np.random.default_rng(seed)
    samples = []
    for i in range(n):
        samples.append(Covector.from_coords(la.unit_vec(n, i)))
    while len(samples) < resolution:
        coords = tuple(
            Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
            for _ in range(n)
        )
        if any(coords):
            samples.append(Covector.from_coords(coords))
    return samples[:resolution] if resolution >= n else samples


def cmd_stratify(algebra, flag, operator, args):
    flag = flag or jordan_holder_basis(algebra)
    samples = _stratify_samples(algebra, flag, max(args.resolution, algebra.dim), args.seed)
    strata = enumerate_strata(algebra, flag, samples)
    top = observed_top_stratum(strata)
    profiles = []
    for profile in sorted(
        strata, key=lambda p: (-p.orbit_dim, [sorted(s) for s in p.sets])
    ):
        profiles.append(
            {
                "jump_sets": [sorted(s) for s in profile.sets],
                "orbit_dimension": profile.orbit_dim,
                "sample_count": len(strata[profile]),
            }
        )
    return {
        "flag": [p + 1 for p in flag.permutation],
        "profiles": profiles,
        "observed_top_orbit_dimension": top.orbit_dim,
        "note": "sampling-based evidence, not an exact stratification",
    }, []


def cmd_polarize(algebra, flag, operator, args):
    flag = flag or jordan_holder_basis(algebra)
    if not args.xi:
        raise DocumentError("polarize needs --xi")
    xi = parse_xi(algebra, flag, args.xi)
    h = vergne_polarization(algebra, flag, xi)
    profile = jump_indices(algebra, flag, xi)
    return {
        "flag": [p + 1 for p in flag.permutation],
        "xi": [format_fraction(c) for c in xi.coords],
        "polarization_basis": [
            [format_fraction(x) for x in row] for row in h.basis
        ],
        "polarization_dimension": h.dim,
        "orbit_dimension": profile.orbit_dim,
        "jump_sets": [sorted(s) for s in profile.sets],
    }, []


def cmd_maslov_demo(algebra, flag, operator, args):
    space = SymplecticSpace.standard(1)
    L1 = Lagrangian.from_vectors([(1, 0)])
    L2 = Lagrangian.from_vectors([(0, 1)])
    L3 = Lagrangian.from_vectors([(1, 1)])
    ref = lion_cocycle_check(space, L1, L2, L3)
    rng = np.random.default_rng(args.seed)
    trials = []
    worst = 0.0
    for d in (1, 2, 3):
        spd = SymplecticSpace.standard(d)
        done = skipped = 0
        while done < max(args.resolution, 4):
            Ls = [random_lagrangian(spd, rng) for _ in range(3)]
            chk = lion_cocycle_check(spd, *Ls)
            if chk.near_degenerate:
                skipped += 1
                continue
            done += 1
            worst = max(worst, chk.residual)
        trials.append({"dimension": 2 * d, "checked": done, "skipped": skipped})
    return {
        "reference_triple": {
            "maslov": ref.maslov,
            "etas": [ref.eta_12, ref.eta_23, ref.eta_31],
            "residual": ref.residual,
        },
        "random_triples": trials,
        "worst_residual": worst,
    }, []


def cmd_helliptic(algebra, flag, operator, args):
    flag = flag or jordan_holder_basis(algebra)
    spec = operator_spec_from_block(algebra, flag, operator)
    config = RocklandCheckConfig(
        truncation=args.truncation,
        tolerance=args.tolerance,
        resolution=args.resolution,
        seed=args.seed,
    )
    report = check_bve_sphere(spec, config)
    samples = []
    for rec in report.samples:
        samples.append(
            {
                "xi": list(rec.zcoords),
                "branch": rec.branch,
                "verdict": rec.verdict,
                "layer_cutoff": rec.layer_cutoff,
                "layers": [
                    {"k": l.layer, "sigma_min": l.smallest_singular_value}
                    for l in rec.layers
                ],
                "singular_layers": [w for w in rec.witnesses if isinstance(w, int)],
                "flags": list(rec.flags),
            }
        )
    results = {
        "verdict": report.verdict,
        "exhaustive": report.exhaustive,
        "note": report.note,
        "samples": samples,
    }
    warnings = []
    if spec.flag.center_dim == 1:
        ladders = {}
        symbol = bve_symbol(spec)
        for label, zc in (("+1", (Fraction(1),)), ("-1", (Fraction(-1),))):
            xi = Covector.from_center_dual(algebra, spec.flag, zc)
            rep = flat_rep(algebra, spec.flag, xi)
            brute = rockland_bruteforce(rep, symbol, config)
            ladders[label] = {
                "sigma_min": [
                    {"truncation": p.truncation, "value": p.sigma_min}
                    for p in brute.ladder
                ],
                "classification": brute.classify(),
            }
        results["bruteforce"] = ladders
    else:
        warnings.append("bruteforce cross-check only runs for one-dimensional centers")
    return results, warnings


def cmd_engel_check(algebra, flag, operator, args):
    if not args.gamma:
        raise DocumentError("engel-check needs --gamma (JSON matrix)")
    try:
        raw = json.loads(args.gamma)
        gm = [[_coeff_to_complex(e) for e in row] for row in raw]
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad --gamma: {exc}") from exc
    chk = check_engel_gamma(gm, args.tolerance)
    return {
        "h_elliptic": chk.value,
        "undetermined": chk.undetermined,
        "eigenvalues": [[m.real, m.imag] for m in chk.eigenvalues],
        "forbidden_set": "S0 = {Re != 0 or |Im| < 1/2}",
    }, []


def cmd_mohsen(algebra, flag, operator, args):
    modified = mohsen_modification(algebra)
    mflag = mohsen_standard_flag(algebra, modified)
    flat, witness = has_flat_orbits(modified, mflag)
    doc = algebra_to_document(
        modified, extra={"flag": [p + 1 for p in mflag.permutation]}
    )
    return {
        "document": doc,
        "dimension": modified.dim,
        "step": step_length(modified),
        "center_dimension": center(modified).dim,
        "has_flat_orbits": flat,
    }, []


# -- corpus regression -----------------------------------------------------------


def corpus_expectations() -> list[dict]:
    data = resources.files("nilcalc.data").joinpath("corpus-expectations.json")
    return json.loads(data.read_text(encoding="utf-8"))["entries"]


def _corpus_algebra(entry):
    family = entry["family"]
    if family == "mohsen-of":
        base = corpus.generate(entry["base_family"], entry.get("base_param"))
        return corpus.mohsen_of(base)
    return corpus.generate(family, entry.get("param"))


def _check_corpus_entry(entry) -> dict:
    name = entry["name"]
    try:
        algebra = _corpus_algebra(entry)
        # round-trip through the document format
        doc = algebra_to_document(algebra)
        algebra2, _, _ = document_to_algebra(doc)
        mismatches = []
        if algebra2.brackets != algebra.brackets:
            mismatches.append("document round-trip changed the bracket table")
        diags = validate(algebra)
        if diags:
            mismatches.append(f"validate: {diags}")
        if entry["family"] == "mohsen-of":
            base = corpus.generate(entry["base_family"], entry.get("base_param"))
            flag = mohsen_standard_flag(base, algebra)
        else:
            flag = jordan_holder_basis(algebra)
        pf = pfaffian_on_center_dual(algebra, flag)
        flat, _ = has_flat_orbits(algebra, flag)
        got = {
            "dimension": algebra.dim,
            "step": step_length(algebra),
            "center_dimension": center(algebra).dim,
            "has_flat_orbits": flat,
            "pfaffian": str(pf.poly),
        }
        for key, expected in entry["expect"].items():
            if got.get(key) != expected:
                mismatches.append(f"{key}: expected {expected!r}, got {got.get(key)!r}")
        return {"name": name, "ok": not mismatches, "mismatches": mismatches}
    except Exception as exc:  # noqa: BLE001 - regression must report, not die
        return {"name": name, "ok": False, "mismatches": [f"error: {exc}"]}


def cmd_corpus_regression(algebra, flag, operator, args):
    entries = corpus_expectations()
    workers = int(os.environ.get("NILCALC_THREADS", "0")) or min(8, len(entries))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_check_corpus_entry, entries))
    rows.sort(key=lambda r: r["name"])
    failed = [r for r in rows if not r["ok"]]
    return {
        "total": len(rows),
        "passed": len(rows) - len(failed),
        "failed": len(failed),
        "entries": rows,
    }, []


HANDLERS = {
    "validate": cmd_validate,
    "orbits": cmd_orbits,
    "stratify": cmd_stratify,
    "polarize": cmd_polarize,
    "maslov-demo": cmd_maslov_demo,
    "helliptic": cmd_helliptic,
    "engel-check": cmd_engel_check,
    "mohsen": cmd_mohsen,
    "corpus-regression": cmd_corpus_regression,
}

NEEDS_ALGEBRA = {
    "validate",
    "orbits",
    "stratify",
    "polarize",
    "helliptic",
    "mohsen",
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilcalc",
        description="Exact and spectral analysis of graded nilpotent Lie algebras",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--algebra", help="algebra document (JSON or TOML)")
    parser.add_argument("--family", help="bundled family name")
    parser.add_argument("--param", help="family parameter")
    parser.add_argument("--xi", help="covector coordinates a,b,...")
    parser.add_argument("--gamma", help="inline JSON matrix for engel-check")
    parser.add_argument("--resolution", type=int, default=16)
    parser.add_argument("--truncation", type=int, default=24)
    parser.add_argument("--tolerance", type=float, default=1e-6)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--json", dest="json_out", help="write the report here")
    return parser


def resolve_algebra(args):
    if args.algebra:
        doc = load_document(args.algebra)
        algebra, flag, operator = document_to_algebra(doc)
        return algebra, flag, operator, doc
    if args.family:
        if args.family == "mohsen-of":
            raise DocumentError("mohsen-of needs --algebra FILE; use the mohsen command")
        algebra = corpus.generate(args.family, args.param)
        doc = algebra_to_document(algebra)
        return algebra, None, None, doc
    raise DocumentError("this command needs --algebra FILE or --family NAME")


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    command = args.command
    algebra = flag = operator = doc = None
    try:
        if command in NEEDS_ALGEBRA:
            algebra, flag, operator, doc = resolve_algebra(args)
        options = {
            "algebra": args.algebra,
            "family": args.family,
            "param": args.param,
            "xi": args.xi,
            "resolution": args.resolution,
            "truncation": args.truncation,
            "tolerance": args.tolerance,
            "seed": args.seed,
        }
        results, warnings = HANDLERS[command](algebra, flag, operator, args)
        report = build_report(command, options, results, warnings, doc)
        emit_report(report, args.json_out)
        if command == "validate" and not results["valid"]:
            return EXIT_PARSE
        if command == "corpus-regression" and results["failed"]:
            return EXIT_REGRESSION
        return EXIT_OK
    except DocumentError as exc:
        print(f"nilcalc: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LieAlgebraError as exc:
        print(f"nilcalc: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"nilcalc: internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (KeyError, ValueError) as exc:
        print(f"nilcalc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success (or certified), 1 bad input or failed precondition,
2 verification failure (uncertified comparison, packing-bound violation).
Without ``--out`` results go to stdout, or into $SLOPEBOUNDS_OUT when set.
"""

import argparse
import os
import re
import sys
from pathlib import Path

from . import bounds, comparison, lattice, reports, spectra
from .hypmath import AREA_CONVENTIONS, PAPER_VARIANT, DomainError

OUT_ENV = "SLOPEBOUNDS_OUT"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not verification failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_components(spec):
    """Parse ``"t:2;g:2,3"`` into (torus_count, [genera])."""
    tori, genera = 0, []
    for part in filter(None, (p.strip() for p in spec.split(";"))):
        key, _, val = part.partition(":")
        try:
            if key == "t":
                tori += int(val)
            elif key == "g":
                genera += [int(x) for x in val.split(",") if x.strip()]
            else:
                raise InputError(f"component spec {part!r}: expected 't:<count>' or 'g:<g1>,<g2>,...'")
        except ValueError:
            raise InputError(f"component spec {part!r}: not an integer") from None
    return tori, genera


def parse_seeds(spec):
    """``"1..100"`` (inclusive) or ``"1,5,9"``."""
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", spec)
    try:
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise InputError(f"empty seed range {spec!r}")
            return list(range(lo, hi + 1))
        return [int(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"bad seed list {spec!r}") from None


def parse_floats(spec):
    try:
        return [float(s) for s in str(spec).split(",") if s.strip()]
    except ValueError:
        raise InputError(f"bad number list {spec!r}") from None


def builtin_profile(name, U):
    kind, _, arg = name.partition(":")
    try:
        if kind == "constant":
            return comparison.CurvatureProfile.constant(float(arg), U)
        if kind in ("quadratic", "quartic"):
            a = float(arg or 1.0)
            p = 2 if kind == "quadratic" else 4
            return comparison.CurvatureProfile.from_callable(lambda u: -1.0 - a * u**p, U, name=name)
        if kind == "random":
            return comparison.random_smooth_profile(int(arg), U)
    except ValueError:
        raise InputError(f"bad builtin profile argument in {name!r}") from None
    raise InputError(f"unknown builtin profile {name!r}; use constant:<K>, quadratic:<a>, quartic:<a>, random:<seed>")


def _emit(args, kind, config, result, default_name):
    text = reports.dumps(reports.envelope(kind, config, result))
    _write(args, text, default_name)


def _write(args, text, default_name):
    out = args.out
    if out is None and os.environ.get(OUT_ENV):
        out = Path(os.environ[OUT_ENV]) / default_name
    if out is None:
        sys.stdout.write(text)
    else:
        reports.write_atomic(out, text)


def cmd_bound(args):
    config = {k: getattr(args, k) for k in ("g", "gb", "components", "N", "n", "L", "U_star", "convention")}
    if args.sweep:
        if args.g_max is None or args.gb_max is None:
            raise InputError("--sweep needs --g-max and --gb-max")
        rows = bounds.sweep_table(range(0, args.g_max + 1), range(2, args.gb_max + 1), args.L, args.convention)
        if args.format == "csv":
            _write(args, reports.csv_text(rows, bounds.SWEEP_COLUMNS), "bound_sweep.csv")
        else:
            config.update(g_max=args.g_max, gb_max=args.gb_max)
            _emit(args, "bound_sweep", config, {"rows": rows}, "bound_sweep.json")
        return EXIT_OK
    if args.g is None:
        raise InputError("--g is required")
    if args.components is not None:
        if args.gb is not None:
            raise InputError("give either --gb or --components, not both")
        tori, genera = parse_components(args.components)
        inp = bounds.BoundInput(g=args.g, n=args.n, L=args.L, N_torus=args.N, components=genera,
                                torus_count=tori, convention=args.convention)
        report = bounds.multi_component_bound(inp)
    else:
        if args.gb is None and args.U_star is None:
            raise InputError("give --gb, --components or --U-star")
        if args.gb is not None and args.gb < 2 and args.U_star is None:
            raise InputError(
                f"boundary genus {args.gb}: the collar-width formula has a pole at genus 1;"
                " describe torus boundary components with --components 't:<k>' and --N <N(g)>"
            )
        report = bounds.combined_bound(args.g, args.gb, args.L, args.convention, n=args.n, U_star=args.U_star)
    if args.format == "csv":
        d = report.to_dict()
        _write(args, reports.csv_text([d], bounds.SWEEP_COLUMNS), "bound.csv")
    else:
        _emit(args, "bound_report", config, report.to_dict(), "bound.json")
    return EXIT_OK


def cmd_verify(args):
    if (args.builtin is None) == (args.profile is None):
        raise InputError("give exactly one of --builtin or --profile")
    if args.profile is not None:
        path = Path(args.profile)
        if not path.is_file():
            raise InputError(f"profile file {path} not found")
        profile = comparison.CurvatureProfile.from_file(path)
        if args.U is not None:
            profile = profile.truncated(args.U)
    else:
        profile = builtin_profile(args.builtin, args.U if args.U is not None else 5.0)
    report = comparison.verify_comparison(profile, args.step, args.tol)
    config = {"profile": args.profile, "builtin": args.builtin, "U": profile.U, "step": args.step,
              "tol": args.tol, "max_points": args.max_points}
    _emit(args, "comparison_report", config, report.to_dict(args.max_points), "verify.json")
    return EXIT_OK if report.certified else EXIT_FAILED


def cmd_pack(args):
    radii = parse_floats(args.R)
    seeds = parse_seeds(args.seeds)
    if not radii or not seeds:
        raise InputError("need at least one radius and one seed")
    out_dir = Path(args.out_dir) if args.out_dir else None
    campaigns = []
    failed = False
    for R in radii:
        audits = []
        for seed in seeds:
            exp = lattice.greedy_pack(R, args.L, seed, args.attempts, args.convention)
            audit = lattice.audit_bound(exp, args.convention)
            audits.append(audit)
            flags = audit["flags"]
            failed |= flags["rigorous_violation"] or not (flags["separation_ok"] and flags["containment_ok"])
            if out_dir is not None:
                config = {"R": R, "L": args.L, "seed": seed, "attempts": args.attempts, "convention": args.convention}
                text = reports.dumps(reports.envelope("packing_experiment", config, exp.to_dict(flags)))
                reports.write_atomic(out_dir / f"pack_R{R:g}_L{args.L:g}_seed{seed}.json", text)
        campaigns.append({"summary": lattice.summarize(audits),
                          "per_seed": [{"seed": a["seed"], "count": a["count"], **a["flags"]} for a in audits]})
    config = {"R": radii, "L": args.L, "seeds": seeds, "attempts": args.attempts, "convention": args.convention}
    text = reports.dumps(reports.envelope("pack_summary", config, {"campaigns": campaigns}))
    if out_dir is not None and args.out is None:
        reports.write_atomic(out_dir / "summary.json", text)
    else:
        _write(args, text, "pack_summary.json")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_spectrum(args):
    if (args.preset is None) == (args.group is None):
        raise InputError("give exactly one of --preset or --group")
    if args.group is not None:
        try:
            group = spectra.FuchsianGroup.from_json(args.group)
        except FileNotFoundError:
            raise InputError(f"group file {args.group} not found") from None
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"group file {args.group}: {exc}") from None
    else:
        group = spectra.preset(args.preset)
    spec = spectra.enumerate_spectrum(group, args.Lmax, args.max_word_length)
    collar = spectra.collar_report(spec.entries, args.L, group.genus)
    config = {"preset": args.preset, "group": args.group, "Lmax": args.Lmax,
              "max_word_length": args.max_word_length, "L": args.L, "genus": group.genus}
    if args.format == "csv":
        rows = [e.to_dict() for e in spec.entries]
        _write(args, reports.csv_text(rows, spectra.SPECTRUM_COLUMNS), "spectrum.csv")
        if args.out is not None:
            side = Path(str(args.out) + ".collar.json")
            reports.write_atomic(side, reports.dumps(reports.envelope("collar_report", config, collar)))
    else:
        _emit(args, "spectrum", config, {"spectrum": spec.to_dict(), "collar_report": collar}, "spectrum.json")
    return EXIT_OK


def cmd_claim(args):
    result = bounds.paper_claim_sweep(args.max_g, args.max_component_genus, args.max_components,
                                      args.max_tori, args.N, args.L, args.convention)
    config = {"max_g": args.max_g, "max_component_genus": args.max_component_genus,
              "max_components": args.max_components, "max_tori": args.max_tori, "N": args.N,
              "L": args.L, "convention": args.convention}
    _emit(args, "claim_sweep", config, result, "claim_sweep.json")
    return EXIT_OK


def build_parser():
    p = _Parser(prog="slopebounds", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt=True):
        sp.add_argument("--out", type=Path, help="output file (default: stdout or $%s)" % OUT_ENV)
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    b = sub.add_parser("bound", help="boundary-slope count bounds n(g, g_b)")
    b.add_argument("--g", type=int, help="surface genus")
    b.add_argument("--gb", type=int, help="genus of the (connected) boundary")
    b.add_argument("--components", help="boundary components, e.g. 't:2;g:2,3'")
    b.add_argument("--N", type=int, help="external slope count N(g) per torus component")
    b.add_argument("--n", type=int, help="number of boundary components of the surface")
    b.add_argument("--L", type=float, default=bounds.DEFAULT_L)
    b.add_argument("--U-star", dest="U_star", type=float, help="override the collar width")
    b.add_argument("--convention", choices=AREA_CONVENTIONS, default=PAPER_VARIANT)
    b.add_argument("--sweep", action="store_true", help="emit a (g, g_b) grid")
    b.add_argument("--g-max", type=int)
    b.add_argument("--gb-max", type=int)
    common(b)
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="certify k_g <= h for a curvature profile")
    v.add_argument("--builtin", help="constant:<K>, quadratic:<a>, quartic:<a>, random:<seed>")
    v.add_argument("--profile", help="two-column (u, K) text file")
    v.add_argument("--U", type=float)
    v.add_argument("--step", type=float)
    v.add_argument("--tol", type=float, default=comparison.DEFAULT_TOLERANCE)
    v.add_argument("--max-points", type=int, default=1001, help="samples kept in the JSON report")
    common(v, fmt=False)
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("pack", help="greedy packing campaign against the count bounds")
    k.add_argument("--R", required=True, help="disk radius, or comma list")
    k.add_argument("--L", type=float, default=bounds.DEFAULT_L)
    k.add_argument("--seeds", default="1..100", help="'1..100' or '1,2,3'")
    k.add_argument("--attempts", type=int, default=20_000, help="consecutive rejections before stopping")
    k.add_argument("--convention", choices=AREA_CONVENTIONS, default=PAPER_VARIANT)
    k.add_argument("--out-dir", help="write one JSON file per experiment plus summary.json here")
    common(k, fmt=False)
    k.set_defaults(func=cmd_pack)

    s = sub.add_parser("spectrum", help="short closed geodesics of a Fuchsian group")
    s.add_argument("--preset", choices=sorted(spectra.PRESETS))
    s.add_argument("--group", help="JSON group file {name, genus, generators}")
    s.add_argument("--Lmax", type=float, required=True)
    s.add_argument("--max-word-length", type=int, default=8)
    s.add_argument("--L", type=float, default=bounds.DEFAULT_L, help="cutoff for the collar report")
    common(s)
    s.set_defaults(func=cmd_spectrum)

    c = sub.add_parser("claim", help="sweep the component-sum inequality for n(g, g_b)")
    c.add_argument("--max-g", type=int, default=5)
    c.add_argument("--max-component-genus", type=int, default=5)
    c.add_argument("--max-components", type=int, default=3)
    c.add_argument("--max-tori", type=int, default=1)
    c.add_argument("--N", type=int, default=0)
    c.add_argument("--L", type=float, default=bounds.DEFAULT_L)
    c.add_argument("--convention", choices=AREA_CONVENTIONS, default=PAPER_VARIANT)
    common(c, fmt=False)
    c.set_defaults(func=cmd_claim)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    try:
        return args.func(args)
    except comparison.ProfileError as exc:
        print(f"slopebounds: precondition failed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, DomainError, bounds.ConfigError, ValueError, OSError) as exc:
        print(f"slopebounds: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except comparison.IntegrationError as exc:
        print(f"slopebounds: integration failed: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())

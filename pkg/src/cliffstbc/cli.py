"""Command line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
errors (bad flags, infeasible parameters, unreadable files).
"""

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import SCHEMA_VERSION, __version__
from .construct import CodeDescriptor, construct_general, preset_dsd, preset_ssd
from .diversity import Constellation, code_transform, dp_consistent, dp_report, standard_constellations
from .linksim import CSV_COLUMNS, SimConfig, run_simulation
from .verify import verify_code


class UsageError(Exception):
    pass


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_code(path):
    try:
        return CodeDescriptor.from_json(_load_json(path))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"{path}: invalid code descriptor: {exc}") from exc


def load_constellation(path):
    try:
        return Constellation.from_json(_load_json(path))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"{path}: invalid constellation: {exc}") from exc


def parse_snr(text):
    try:
        parts = [float(p) for p in text.split(":")]
    except ValueError as exc:
        raise UsageError(f"bad --snr {text!r}; expected start:step:stop") from exc
    if len(parts) == 1:
        return [parts[0]]
    if len(parts) != 3 or parts[1] <= 0 or parts[2] < parts[0]:
        raise UsageError(f"bad --snr {text!r}; expected start:step:stop with step > 0")
    start, step, stop = parts
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def cmd_construct(args):
    try:
        if args.kind == "general":
            if args.g is None:
                raise UsageError("construct general needs --g")
            code = construct_general(args.nt, args.g, args.u)
        else:
            a = int(args.nt).bit_length() - 1
            if args.nt < 4 or 2 ** a != args.nt:
                raise UsageError(f"{args.kind} codes need nt = 2^a with a >= 2, got {args.nt}")
            code = preset_ssd(a) if args.kind == "ssd" else preset_dsd(a)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = code.to_json()
    doc["meta"] = dict(doc["meta"], command={"kind": args.kind, "nt": args.nt, "g": args.g, "u": args.u})
    text = json.dumps(doc, indent=1)
    summary = (
        f"nt={code.nt} m={code.m} n={code.n} K={code.K} groups={code.grouping.g_total} "
        f"group_sizes={code.grouping.sizes} real_rate={code.real_rate} complex_rate={code.complex_rate}"
    )
    if args.out:
        _write(text, args.out)
        print(summary)
    else:
        _write(text, None)
        print(summary, file=sys.stderr)
    return 0


def cmd_verify(args):
    code = load_code(args.code)
    report = verify_code(code, trials=args.trials, seed=args.seed)
    doc = {"schema_version": SCHEMA_VERSION, **report.to_json(),
           "config": {"code": args.code, "trials": args.trials, "seed": args.seed}}
    _write(json.dumps(doc, indent=1), args.out)
    return 0 if report.ok else 1


def _to_y(code, const, domain):
    if domain == "y":
        return const
    return code_transform(code, const).forward(const)


def cmd_dp(args):
    code = load_code(args.code)
    const = load_constellation(args.constellation)
    if const.dim != code.n:
        raise UsageError(f"constellation dim {const.dim} does not match group size n={code.n}")
    try:
        a_y = _to_y(code, const, args.domain)
        rep = dp_report(code, a_y, samples=args.samples, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ok = dp_consistent(rep)
    doc = {"schema_version": SCHEMA_VERSION, **rep, "consistent": ok,
           "config": {"code": args.code, "constellation": args.constellation,
                      "domain": args.domain, "samples": args.samples, "seed": args.seed}}
    _write(json.dumps(doc, indent=1), args.out)
    return 0 if ok else 1


def cmd_simulate(args):
    code = load_code(args.code)
    const = load_constellation(args.constellation)
    snr = parse_snr(args.snr)
    try:
        if args.domain == "y":
            const = code_transform(code, const).inverse(const)
        cfg = SimConfig(code, const, snr, args.trials, n_r=args.nr, seed=args.seed,
                        decoder=args.decoder, workers=args.workers)
        t0 = time.perf_counter()
        res = run_simulation(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in res.rows():
        writer.writerow(row)
    _write(buf.getvalue(), args.out)
    meta = {"schema_version": SCHEMA_VERSION, "config": res.config,
            "inputs": {"code": args.code, "constellation": args.constellation, "domain": args.domain},
            "decoder_disagreements": res.decoder_disagreements,
            "elapsed_s": round(time.perf_counter() - t0, 3)}
    if args.out and args.out != "-":
        _write(json.dumps(meta, indent=1), args.out + ".json")
    else:
        print(json.dumps(meta), file=sys.stderr)
    return 0 if res.decoder_disagreements == 0 else 1


def cmd_constellation(args):
    try:
        c = standard_constellations(args.name, args.size, dim=args.dim, angle=args.angle)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = c.to_json()
    doc["meta"] = {"name": args.name, "size": args.size, "dim": c.dim, "angle": args.angle}
    _write(json.dumps(doc, indent=1), args.out)
    return 0


def cmd_selftest(args):
    from .selftest import run_selftest

    return 0 if run_selftest(verbose=True) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="cliffstbc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version",
                   version=f"cliffstbc {__version__} (schema {SCHEMA_VERSION})")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a code and write its descriptor JSON")
    c.add_argument("kind", choices=["general", "ssd", "dsd"])
    c.add_argument("--nt", type=int, required=True)
    c.add_argument("--g", type=int)
    c.add_argument("--u", default="default", choices=["default", "identity", "hadamard", "dft"])
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="discover the group partition of a code")
    v.add_argument("--code", required=True)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dp", help="closed-form and brute-force diversity product")
    d.add_argument("--code", required=True)
    d.add_argument("--constellation", required=True)
    d.add_argument("--domain", choices=["y", "x"], default="y",
                   help="whether the constellation is A_y (default) or A_x")
    d.add_argument("--samples", type=int, default=10_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dp)

    s = sub.add_parser("simulate", help="Monte Carlo BER/SER sweep")
    s.add_argument("--code", required=True)
    s.add_argument("--constellation", required=True)
    s.add_argument("--domain", choices=["y", "x"], default="y")
    s.add_argument("--snr", required=True, help="start:step:stop in dB")
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--nr", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--decoder", choices=["groupwise", "exhaustive", "both"], default="groupwise")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("constellation", help="write a named constellation as JSON")
    k.add_argument("--name", required=True,
                   choices=["rotated-square-2d", "rotated-zn-lattice-nd", "qam-as-pairs"])
    k.add_argument("--size", type=int, required=True)
    k.add_argument("--dim", type=int)
    k.add_argument("--angle", type=float)
    k.add_argument("--out")
    k.set_defaults(func=cmd_constellation)

    t = sub.add_parser("selftest", help="run the built-in invariant checks")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cliffstbc {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

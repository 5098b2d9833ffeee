"""Quick end-to-end invariant checks behind ``cliffstbc selftest``."""

import numpy as np

from .clifford import gamma_representation, verify_gamma
from .construct import construct_general, preset_dsd, preset_ssd
from .diversity import Constellation, dp_consistent, dp_report, standard_constellations
from .linksim import exhaustive_ml_decode, groupwise_ml_decode
from .verify import discover_partition, max_cross_group_hr, verify_decomposition


def _gamma_checks():
    for a in range(1, 5):
        rep = verify_gamma(gamma_representation(a))
        yield f"clifford relations a={a}", rep.ok, "; ".join(rep.violations)


def _preset_checks():
    codes = {"example-2 (nt=6, g=4)": construct_general(6, 4, "identity")}
    for a in (2, 3, 4):
        codes[f"ssd a={a}"] = preset_ssd(a)
        codes[f"dsd a={a}"] = preset_dsd(a)
    for name, code in codes.items():
        part = discover_partition(code.weights)
        res = verify_decomposition(code, trials=20, seed=1)
        hr = max_cross_group_hr(code)
        ok = part == code.grouping and res <= 1e-9 * code.K and hr <= 1e-10
        yield f"construction {name}", ok, f"groups={part.sizes} residual={res:.2e} hr={hr:.2e}"


def _decoder_checks(instances=200):
    rng = np.random.default_rng(7)
    cases = [
        ("ssd a=2", preset_ssd(2), Constellation(np.array([[a, b] for a in (-1, 1) for b in (-1, 1)]))),
        ("example-2", construct_general(6, 4, "identity"), Constellation(rng.standard_normal((2, 3)))),
    ]
    for name, code, const in cases:
        agree = 0
        for _ in range(instances):
            idx = rng.integers(0, len(const), size=code.grouping.g_total)
            x = np.concatenate([const.points[i] for i in idx])
            h = (rng.standard_normal((code.nt, 1)) + 1j * rng.standard_normal((code.nt, 1))) / np.sqrt(2)
            y = np.tensordot(x, code.stacked, axes=1) @ h
            y = y + 0.7 * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
            a = groupwise_ml_decode(code, code.grouping, const, y, h)
            b = exhaustive_ml_decode(code, const, y, h)
            agree += a.indices == b.indices
        yield f"decoder equivalence {name}", agree == instances, f"{agree}/{instances} agree"


def _oracle_checks():
    a_y = standard_constellations("rotated-square-2d", 4)
    rep = dp_report(preset_ssd(2), a_y, samples=2000, seed=3)
    yield "diversity oracle ssd a=2", dp_consistent(rep), f"closed={rep['closed_form_dp']:.6g} oracle={rep['oracle_dp']:.6g}"
    pts = standard_constellations("rotated-zn-lattice-nd", 8, dim=3).points[:4]
    rep = dp_report(construct_general(6, 4, "identity"), Constellation(pts), samples=2000, seed=3)
    yield "diversity oracle example-2", dp_consistent(rep), f"closed={rep['closed_form_dp']:.6g} oracle={rep['oracle_dp']:.6g}"


def run_selftest(verbose=True):
    ok_all = True
    for check in (_gamma_checks, _preset_checks, _decoder_checks, _oracle_checks):
        for name, ok, detail in check():
            ok_all &= bool(ok)
            if verbose:
                print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return ok_all

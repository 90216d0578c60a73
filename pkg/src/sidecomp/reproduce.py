"""Golden-number checks behind ``sidecomp reproduce``."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import correlation, mi_oracle, netcomp, redundancy
from .source_models import PRINTED_MARKOV256_DIMENSION, ParamVector, SourceClass, log_fisher_integral

INF = math.inf


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tolerance: float
    relative: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        err = abs(self.value - self.expected)
        if self.relative:
            err /= abs(self.expected)
        return err <= self.tolerance


def _markov256_query(n, m=INF, t=INF, entropy_rate=0.5):
    return redundancy.RedundancyQuery.for_source(
        SourceClass.markov1(256), n=n, entropy_rate=entropy_rate, m=m, t=t,
        d_override=PRINTED_MARKOV256_DIMENSION)


def golden_checks() -> list[Check]:
    net = netcomp.fig5_network()
    checks = [
        Check("fig5 d(S,C)", netcomp.shortest_hops(net, "S", "C"), 3, 0),
        Check("fig5 d(S,M)", netcomp.shortest_hops(net, "S", "M"), 2, 0),
        Check("fig5 G_BH at g=5", netcomp.gain_bh(net, "S", "C", 5.0).gain_bh, 3 / 1.4, 1e-6),
        Check("memory threshold, delta=0.01, H/n=0.5, d=62580",
              redundancy.memory_threshold(1, PRINTED_MARKOV256_DIMENSION, 0.5, 0.01),
              8.94e6, 0.01, relative=True),
    ]
    q = _markov256_query(512 * 1024)
    checks.append(Check("gain limit, Markov k=256, n=512kB", redundancy.gain(q), 2.35, 0.10,
                        relative=True))
    n = 32 * 1024
    log_c = log_fisher_integral(SourceClass.markov1(256))
    d = PRINTED_MARKOV256_DIMENSION
    pf = redundancy.normalized_rate(n, redundancy.maximin_redundancy(n, d, log_c))
    o2o = redundancy.normalized_rate(n, redundancy.one_to_one_lower_bound(n, d, log_c))
    checks.append(Check("prefix-free vs one-to-one rate, n=32kB, H/n=1", abs(pf - o2o) / pf,
                        0.0, 0.01))
    q0 = _markov256_query(32 * 1024, m=8 * 2**20, t=0)
    checks.append(Check("gain at t=0", redundancy.gain(q0), 1.0, 0.0))
    pair = SourceClass.memoryless(2)
    a = ParamVector(pair, [0.3, 0.7])
    b = ParamVector(pair, [0.85, 0.15])
    checks.append(Check("f^0", correlation.f_t_exact(a, b, 0), 1.0, 0.0))
    for t in (1, 2, 4, 6):
        value, _ = correlation.kernel_prior_integral(b, t)
        checks.append(Check(f"int f^{t} w dtheta1", value, 1.0, 1e-6))
    checks.append(Check("I(X^1; theta)", mi_oracle.mi_unconditional(1).value_bits,
                        math.log2(math.e) - 1.0, 1e-12))
    ident = mi_oracle.mi_gap_identity_check(64, 64, INF)
    checks.append(Check("I(X;theta) - I(X;theta|Y) - I(X;Y), n=m=64", ident.residual, 0.0, 1e-4))
    rel = []
    for n_, m_ in ((256, 1024), (512, 2048)):
        exact = mi_oracle.mi_conditional(n_, m_, INF).value_bits
        approx = redundancy.r_hat(n_, m_, INF, 1)
        rel.append(abs(exact - approx) / approx)
    checks.append(Check("conditional MI vs effective-length formula, n=256 m=1024", rel[0],
                        0.0, 0.25))
    checks.append(Check("relative gap shrinks at n=512 m=2048", float(rel[1] < rel[0]), 1.0, 0.0))
    return checks


def format_table(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'value':>14}  {'expected':>14}  result"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {c.value:>14.7g}  {c.expected:>14.7g}  "
                     f"{'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)


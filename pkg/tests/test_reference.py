"""The frozen constants stay reproducible from their defining formulas.

Only the series-based constants are regenerated here (fast); the
quadrature-based ones take minutes and are covered by running
`python -m tests.oracle_gen` manually, whose self-check pins the pipeline
to the m=2 closed forms.
"""

from mpmath import mp, mpf, fabs

from fockberezin._reference import S_A1_M4_Z1, S_COMPLEX, S_REAL
from tests.oracle_gen import s_series, self_check


def test_series_constants_regenerate():
    mp.dps = 60
    got = s_series(1, 4, 1).real
    assert fabs(got - mpf(repr(S_A1_M4_Z1))) < mpf("1e-15")
    mp.dps = 40
    for (a, m, t), want in S_REAL.items():
        got = s_series(mpf(repr(a)), mpf(repr(m)), mpf(repr(t)))
        assert fabs(got - mpf(repr(want))) < mpf("1e-14") * fabs(got)
    for (a, m, z), want in S_COMPLEX.items():
        got = s_series(mpf(repr(a)), mpf(repr(m)), z)
        assert fabs(got - want) < mpf("1e-14") * fabs(got)


def test_oracle_pipeline_self_check():
    mp.dps = 25
    self_check()

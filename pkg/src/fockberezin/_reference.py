"""Frozen reference values from an independent high-precision run.

Computed once with mpmath (40-60 significant digits) by naive term-by-term
summation of the defining series and adaptive quadrature of the defining
integrals, after cross-validating that pipeline against the m=2 closed forms
to better than 1e-18 relative.  The verification suite and the tests compare
the double-precision implementation against these constants; they are never
consumed by the numerical paths themselves.
"""

# S(alpha=1, m=4, zeta=1), 52 significant digits
S_A1_M4_Z1 = 5.573169664310039753257904049775582400538385313564665

# S(alpha, m, t) on real arguments
S_REAL = {
    (0.7, 1.0, 3.5): 1.31136859026769565439409174803,
    (2.0, 3.0, 10.0): 1.7523842939550077480454790253e28,
    (1.3, 6.0, 2.2): 17766700.8086553403409233844484,
    (5.0, 2.0, 20.0): 2.68811714181613544841262555158e43,
    (0.5, 0.75, 7.0): 0.692353453183610910986304409933,
}

# S(alpha, m, zeta) on complex arguments
S_COMPLEX = {
    (1.0, 4.0, 2.0 + 1.0j): -22.0793568561073501696474790722 - 87.0932010116858213741964267834j,
    (1.5, 3.0, -1.2 + 0.8j): 0.0502753281188191106889045960617 + 0.0775172203326778084910264649264j,
}

# U functionals at m=4, keyed (inner alpha, outer beta, n)
U_M4 = {
    (1.0, 1.0, 0): 1.17668753840196530609,
    (1.0, 2.0, 0): 1.034114880611292618534,
    (2.0, 1.0, 0): 0.9073292828918283820893,
    (1.0, 2.0, 1): 0.4665491948745732524085,
    (2.0, 1.0, 1): 0.7636943616221831072803,
}

# symmetry gaps U_{1,2}(n) - U_{2,1}(n) at m=4
U_GAP_M4_12 = {
    0: 0.1267855977194642364449,
    1: -0.2971451667476098548718,
}

# radial transform of the exponential test symbol: m=4, alpha=1, delta=1, r=1
BEREZIN_EXP_M4_A1_D1_R1 = 0.3204792545029320220103

# nested transforms at 0 for m=4, delta=1: forward (inner 1, outer 2) and
# backward (inner 2, outer 1), plus their difference
NESTED_M4_FWD_1_2_D1 = 0.553670013258250745648
NESTED_M4_BWD_2_1_D1 = 0.5638946102008567371058
DEFECT_M4_1_2_D1 = -0.01022459694260599145781

"""Gaussian basis data for the molecules used in the bundled fixtures.

Values follow the standard Pople tabulations (STO-3G hydrogen with the
zeta=1.24 scaling, 6-31G hydrogen, 6-31G* fluorine with one cartesian d
shell of six components).
"""

# shell = (angular momentum letter, [(exponent, contraction coeff), ...])

STO3G = {
    "H": [
        ("S", [(3.42525091, 0.15432897),
               (0.62391373, 0.53532814),
               (0.16885540, 0.44463454)]),
    ],
}

POPLE_631GS = {
    "H": [
        ("S", [(18.7311370, 0.03349460),
               (2.8253937, 0.23472695),
               (0.6401217, 0.81375733)]),
        ("S", [(0.1612778, 1.0)]),
    ],
    "F": [
        ("S", [(7001.71309, 0.0018196169),
               (1051.36609, 0.0139160796),
               (239.285690, 0.0684053245),
               (67.3974453, 0.2331857600),
               (21.9186166, 0.4712674390),
               (7.13644577, 0.3566185460)]),
        ("S", [(20.8479528, -0.1085069750),
               (4.80830834, -0.1464516580),
               (1.34406986, 1.1286885800)]),
        ("P", [(20.8479528, 0.0716287243),
               (4.80830834, 0.3459121030),
               (1.34406986, 0.7224699560)]),
        ("S", [(0.358151393, 1.0)]),
        ("P", [(0.358151393, 1.0)]),
        ("D", [(0.8, 1.0)]),
    ],
}

ATOMIC_NUMBER = {"H": 1, "F": 9}

# cartesian component exponents (lx, ly, lz) per angular momentum
CARTESIAN_COMPONENTS = {
    "S": [(0, 0, 0)],
    "P": [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
    "D": [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)],
}

BOHR_PER_ANGSTROM = 1.0 / 0.52917721092

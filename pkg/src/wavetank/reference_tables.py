"""Golden reference values for the five-mode McEwan benchmark.

Previously tabulated phase speeds, dispersion coefficients and nonlinear
interaction tensors for N = 1.23 1/s, h = 0.25 m, modes (2, 4, 6, 8, 10).
The reconciliation report compares freshly computed coefficients against
these tables entry by entry; it documents disagreements, it never
"corrects" either side.  Printed precision varies between one and four
significant figures, so loose matches are expected.
"""

MCEWAN_N = 1.23
MCEWAN_DEPTH = 0.25
MCEWAN_MODES = (2, 4, 6, 8, 10)

# phase speeds c_n [m/s], printed to 1-2 significant figures
REFERENCE_C = {2: 0.05, 4: 0.025, 6: 0.016, 8: 0.012, 10: 0.0098}

# dispersion coefficients d_n [m^3/s], printed to 1 significant figure
REFERENCE_D = {2: 4e-5, 4: 5e-6, 6: 2e-6, 8: 1e-6, 10: 3e-7}

# nonlinear tensors g^n_{m,k}; one table per n, rows m, columns k,
# both running over MCEWAN_MODES
REFERENCE_G = {
    2: (
        (0.0, 72.3, 0.0, 0.0, 0.0),
        (28.9, 0.0, 202.4, 0.0, 0.0),
        (0.0, 130.0, 0.0, 390.1, 0.0),
        (0.0, 0.0, 289.0, 0.0, 635.7),
        (0.0, 0.0, 0.0, 505.7, 0.0),
    ),
    4: (
        (28.9, 0.0, 57.8, 0.0, 0.0),
        (0.0, 0.0, 0.0, 144.5, 0.0),
        (0.0, 0.0, 0.0, 0.0, 260.0),
        (0.0, 57.8, 0.0, 0.0, 0.0),
        (0.0, 0.0, 144.5, 0.0, 0.0),
    ),
    6: (
        (0.0, 33.7, 0.0, 53.0, 0.0),
        (48.2, 0.0, 0.0, 0.0, 125.2),
        (0.0, 0.0, 0.0, 0.0, 0.0),
        (-19.3, 0.0, 0.0, 0.0, 0.0),
        (0.0, 24.0, 0.0, 0.0, 0.0),
    ),
    8: (
        (0.0, 0.0, 36.1, 0.0, 50.6),
        (0.0, 57.8, 0.0, 0.0, 0.0),
        (65.0, 0.0, 0.0, 0.0, 0.0),
        (0.0, 0.0, 0.0, 0.0, 0.0),
        (-36.0, 0.0, 0.0, 0.0, 0.0),
    ),
    10: (
        (0.0, 0.0, 0.0, 37.6, 0.0),
        (0.0, 0.0, 63.6, 0.0, 0.0),
        (0.0, 78.0, 0.0, 0.0, 0.0),
        (80.9, 0.0, 0.0, 0.0, 0.0),
        (0.0, 0.0, 0.0, 0.0, 0.0),
    ),
}

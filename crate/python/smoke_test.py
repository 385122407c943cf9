#!/usr/bin/env python3
"""Smoke test for the qpoincare_py extension module.

Builds nothing itself: run `cargo build --release -p qpoincare-py` first,
then `python3 python/smoke_test.py`.  The script copies the built cdylib
into a temporary directory under the importable name and exercises one
representative call per binding family, cross-checking the analytic values
against mpmath where that gives an independent oracle.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libqpoincare_py.so",
        ROOT / "target" / "debug" / "libqpoincare_py.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "libqpoincare_py.so not found; run `cargo build --release -p qpoincare-py` first"
        )
    tmp = Path(tempfile.mkdtemp(prefix="qpoincare-py-"))
    shutil.copy2(built, tmp / "qpoincare_py.so")
    sys.path.insert(0, str(tmp))
    import qpoincare_py

    return qpoincare_py


PASSED = 0


def check(name, condition, detail=""):
    global PASSED
    if not condition:
        sys.exit(f"FAIL {name}: {detail}")
    PASSED += 1
    print(f"PASS {name}")


def main():
    qp = load_module()

    # exactarith ------------------------------------------------------------
    check("kronecker", qp.kronecker_symbol(2, 7) == 1 and qp.kronecker_symbol(3, 8) == -1)
    check("epsilon", qp.epsilon(1) == 1 and qp.epsilon(3) == 1j)
    check("euler_phi", qp.euler_phi(12) == 4 and qp.euler_phi(1) == 1)
    check("mod_inv", qp.mod_inv(3, 10) == 7 and qp.mod_inv(2, 4) is None)
    check("dim_cusp_forms", qp.dim_cusp_forms_level1(24) == 2 and qp.dim_cusp_forms_level1(12) == 1)

    kv = qp.kloosterman(48, 1, 1, 5)
    ks = qp.kloosterman(48, 2, 3, 5)
    sym = qp.kloosterman(48, 3, 2, 5)
    check(
        "kloosterman",
        abs(kv["im"]) <= kv["rounding_bound"]
        and kv["terms"] == 4
        and abs(ks["re"] - sym["re"]) <= ks["rounding_bound"] + sym["rounding_bound"],
        f"K(1,1,5) = {kv}",
    )

    # special ---------------------------------------------------------------
    x = 1.7
    jh = qp.bessel_j(1, x)  # J_{1/2}(x) = sqrt(2/(pi x)) sin x
    closed = math.sqrt(2.0 / (math.pi * x)) * math.sin(x)
    check(
        "bessel_half_order",
        abs(jh["value"] - closed) <= jh["abs_error"] + 1e-14,
        f"{jh} vs {closed}",
    )

    import mpmath

    mpmath.mp.dps = 40
    want = float(mpmath.besselj(11, mpmath.mpf("151.0")))
    got = qp.bessel_j(22, 151.0)
    check(
        "bessel_large_argument",
        abs(got["value"] - want) <= got["abs_error"] + 1e-13 and got["abs_error"] < 1e-20,
        f"{got} vs {want}",
    )

    gamma = qp.incomplete_gamma_upper("1", 2.0)  # Gamma(1, x) = e^{-x}
    check(
        "incomplete_gamma",
        abs(gamma["value"] - math.exp(-2.0)) <= gamma["abs_error"] + 1e-15,
        str(gamma),
    )

    # qseries ---------------------------------------------------------------
    j = qp.j_invariant(2)
    check(
        "j_invariant",
        j["lowest_exponent"] == -1 and j["coeffs"] == ["1", "744", "196884", "21493760"],
        str(j),
    )
    tau = qp.tau_coeffs(3, 14, -1)
    check(
        "tau_coeffs",
        tau["lowest_exponent"] == -3 and tau["coeffs"] == ["1", "48", "-195660"],
        str(tau),
    )
    check(
        "form_equals_quotient",
        qp.weakly_holomorphic_level1(24, ["1"], 2) == qp.tau_coeffs(3, 14, 2),
    )
    basis = qp.cusp_basis_level1(24, 3)
    check(
        "cusp_basis",
        len(basis) == 2
        and basis[0]["coeffs"][0] == "1"
        and basis[0]["lowest_exponent"] == 1
        and basis[1]["coeffs"][0] == "1"
        and basis[1]["lowest_exponent"] == 2,
        str(basis),
    )

    # poincare --------------------------------------------------------------
    a12 = qp.classical_coeff(1, "24", 2)
    check(
        "classical_coeff",
        abs(a12["re"] - 132.9889772927912) < 1e-9 and a12["total_bound"] <= 1e-9,
        str(a12),
    )
    bz = qp.maass_coeff_zero(1, "12")
    check("maass_zero", abs(bz["re"] - (-94.8191027496382)) < 5e-9, str(bz))
    bp = qp.maass_coeff_positive(1, "12", 1)
    check("maass_positive", abs(bp["re"] - (-1842.89472692409)) < 5e-9, str(bp))
    bn = qp.maass_coeff_negative(1, "24", -2, target_error=1e-30)
    check("maass_negative", abs(bn["re"] - (-1.41045473631538e-26)) < 1e-31, str(bn))
    half = qp.classical_coeff(1, "15/2", 1, level=4, target_error=1e-8)
    check("half_integral", abs(half["re"] - 0.984013286133409) < 1e-7, str(half))

    # relations -------------------------------------------------------------
    rel = qp.corollary_relation(24)
    check(
        "corollary",
        rel["coeffs"] == {"1": "-195660", "2": "402653184", "3": "94143178827"}
        and rel["provenance"] == "corollary",
        str(rel),
    )
    check("find_empty", qp.find_relations(24, 2) == [])
    found = qp.find_relations(26, 2)
    check(
        "find_k26",
        len(found) == 1 and found[0]["coeffs"] == {"1": "48", "2": "33554432"},
        str(found),
    )
    check("oracle_true", qp.dual_pairing_oracle(rel))
    perturbed = {"k": "24", "N": 1, "coeffs": {"1": "-195661", "2": "402653184", "3": "94143178827"}}
    check("oracle_false", not qp.dual_pairing_oracle(perturbed))

    solved = qp.solve_principal_part_level1(24, {3: "1", 2: "48", 1: "-195660"}, order=2)
    check("solve", solved == qp.tau_coeffs(3, 14, 2), str(solved))
    check("solve_obstructed", qp.solve_principal_part_level1(24, {1: "1"}) is None)

    report = qp.verify_relation(qp.corollary_relation(12), nmax=2, target_error=1e-8)
    check(
        "verify",
        report["verdict"] == "consistent" and len(report["entries"]) == 2,
        str(report),
    )

    # error mapping ---------------------------------------------------------
    try:
        qp.classical_coeff(1, "24", 1, target_error=1e-20, precision=64)
        sys.exit("FAIL error_mapping: expected ValueError")
    except ValueError as e:
        check("error_mapping", "cannot certify" in str(e), str(e))

    print(f"all {PASSED} checks passed")


if __name__ == "__main__":
    main()

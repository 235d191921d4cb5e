"""Scalar scans and sampled field checks behind the convergence analysis.

Each line reports the worst margin (bound minus observed value); a negative
margin beyond the listed slack would be a violation.  The second part
weakens one bound on purpose to show the scan notices.
"""

from truncspde import verify

results = verify.verify_inequalities()
for r in results:
    print(r.line())
print(f"{sum(r.passed for r in results)}/{len(results)} passed")

print("\nwith (j x)^kappa / (1 + x)^j bounded by 2 instead of 4:")
saved = verify.BOUNDS["limplicit_bound"]
verify.BOUNDS["limplicit_bound"] = 2.0
try:
    for r in verify.verify_inequalities(only="limplicit_bound"):
        print(r.line())
finally:
    verify.BOUNDS["limplicit_bound"] = saved

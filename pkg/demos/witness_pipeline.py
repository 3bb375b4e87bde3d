"""
From triple systems to a signed certificate
===========================================

The full pipeline: search a disjoint pair of order-t systems, cone an apex
over their union, evaluate the designated weighting exactly, certify every
small subgraph, and write the result as a hash-stamped JSON certificate
that an independent run can re-verify.
"""

import json
import tempfile
from fractions import Fraction
from pathlib import Path

from hyperjump import (
    assemble_witness,
    emit_certificate,
    reverify_certificate,
)

# One call runs both certification legs and finalizes the status.
cg, cert = assemble_witness(t=13, m=4, seed=0)
print("status      :", cert.status)
print("lower bound :", cert.lower_bound, "=", float(cert.lower_bound))
print("target      :", cert.lower_bound_exceeds, "=", float(cert.lower_bound_exceeds))
print("margin      :", cert.lower_bound - Fraction(4, 9))
print("weighting   :", cert.weighting)
print("subgraphs   :", cert.subgraphs_checked, "checked,",
      len(cert.failures), "failures,", cert.subgraph_policy)

# The lower bound is an exact rational: 4/9 + 4/(27 t) - 16/(27 t^2).
t = 13
assert cert.lower_bound == Fraction(4, 9) + Fraction(4, 27 * t) - Fraction(16, 27 * t * t)

# Certificates travel as {content, content_hash, generated_at}. The hash
# covers the canonical content bytes, so a rerun is byte-identical apart
# from the timestamp.
out = Path(tempfile.mkdtemp()) / "witness_t13.json"
envelope = emit_certificate(cert, out)
print("\nwrote", out)
print("content hash:", envelope["content_hash"][:32], "...")

# Shallow re-verification recomputes the hash and the exact comparisons.
report = reverify_certificate(out)
print("reverify    : hash_ok =", report.hash_ok,
      " arithmetic_ok =", report.arithmetic_ok)

# Tamper with one digit of the bound and the envelope no longer checks out.
data = json.loads(out.read_text())
data["content"]["lower_bound"] = "689/1521"
out.write_text(json.dumps(data))
report = reverify_certificate(out)
print("tampered    : hash_ok =", report.hash_ok, " ok =", report.ok)

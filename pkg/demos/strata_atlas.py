"""Print measured and closed-form codimensions of every stratum for small n."""
import sys

from eqcodim.strata import enumerate_strata, stratum_codim, top_label

n = int(sys.argv[1]) if len(sys.argv) > 1 else 3
for field in "RCH":
    for kind in ("nilpotent", "center"):
        top = top_label(field, n, kind)
        rows = sorted((stratum_codim(lab), str(lab)) for lab in enumerate_strata(field, n, kind))
        print(f"{field}^{n} {kind}: {len(rows)} strata, top = {top} (codim {stratum_codim(top)})")
        for c, s in rows[:6]:
            print(f"   codim {c:3d}  {s}")
        if len(rows) > 6:
            print(f"   ... {len(rows) - 6} more")

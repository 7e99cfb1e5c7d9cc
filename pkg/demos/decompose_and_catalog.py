"""Decompose a few small representations and list their low-codimension sub-descriptors."""
from eqcodim.algebra import decompose, nilpotent_monoid_rep, q8_rep, z3_plus_trivial_rep, z3_rep
from eqcodim.codim import C_U, K_U, catalog

for name, make in [("Z3 on R^3", z3_rep), ("Z3 + trivial on R^4", z3_plus_trivial_rep),
                   ("Q8 on R^4", q8_rep), ("nilpotent monoid on R^2", nilpotent_monoid_rep)]:
    dec = decompose(make())
    W = dec.descriptor
    print(f"{name}: dim End = {dec.end.dim_end}, dim radical = {dec.end.dim_radical}")
    print(f"  descriptor {W.to_dict()}  K = {K_U(W)}  C = {C_U(W)}")
    steady, hopf = catalog(W, 2)
    for e in steady[1:]:
        print(f"  steady  K={e.K}  {e.U.to_dict()}")
    for e in hopf[1:]:
        print(f"  hopf    C={e.C}  {e.U.to_dict()}")

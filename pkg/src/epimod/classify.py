"""Module-class predicates and per-point decomposition.

Eight boolean flags describe where a module sits relative to the torsion
and divisibility theory of an instance.  Two independent evaluation paths
are provided: the definitional one runs the functor calculus, the
structural one reads normal-form invariants.  They must agree, and the
disagreement of the two paths on any input is a bug in one of them.
"""

from dataclasses import dataclass

from .engine import (DEFAULT_WINDOW, NoStabilization, _HomConnect,
                     _kron_hom_towers, _kron_tensor_towers, _tower_vanishes,
                     _unit_component_maps, counit_image_full, default_budget,
                     functor_vanishes, unit_map_injective)
from .fpmod import FPModPID
from .kron import INF, KronRep, sub_rep
from .linalg import Mat
from .pencil import Regular, pencil_decompose, pencil_invariants

PATHS = ("definitional", "structural")
SIDES = ("comodule", "contramodule")
FLAG_NAMES = ("torsion", "torsionfree", "divisible", "reduced", "special",
              "cospecial", "comodule", "contramodule")


@dataclass(frozen=True)
class ClassFlags:
    torsion: bool
    torsionfree: bool
    divisible: bool
    reduced: bool
    special: bool
    cospecial: bool
    comodule: bool
    contramodule: bool
    path: str

    def __post_init__(self):
        # comodules are torsion and contramodules are reduced; these
        # implications are checked on every construction, never assumed
        assert self.torsion or not self.comodule
        assert self.reduced or not self.contramodule

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in FLAG_NAMES}
        d["path"] = self.path
        return d


@dataclass
class BlockDecomp:
    """Per-point splitting of a comodule or contramodule.

    `components` maps each marked point to its local summand, finite
    points in ascending order with infinity last; `witness` is the pair
    of invertible matrices carrying the ordered direct sum onto the
    input.
    """
    components: dict
    witness: tuple
    side: str


def _flags(path, torsion, torsionfree, divisible, reduced, special,
           cospecial, comodule, contramodule) -> ClassFlags:
    return ClassFlags(torsion=torsion, torsionfree=torsionfree,
                      divisible=divisible, reduced=reduced, special=special,
                      cospecial=cospecial, comodule=comodule,
                      contramodule=contramodule, path=path)


def _all_true(path) -> ClassFlags:
    return _flags(path, *([True] * 8))


def _cpid_structural(inst, M: FPModPID) -> ClassFlags:
    total = M.torsion_dim()
    y_dim = sum(d.root_multiplicity(p) for d in M.divisors
                for p in inst.points)
    out_dim = total - y_dim
    torsion = out_dim == 0
    torsionfree = y_dim == 0
    return _flags("structural", torsion, torsionfree, torsionfree, torsion,
                  True, True, torsion, torsion)


def _cpid_definitional(inst, M, budget, window) -> ClassFlags:
    def dies(functor):
        return functor_vanishes(inst, M, functor, budget, window)[0]

    torsion = dies("Tor0U")
    reduced = dies("HomU")
    comodule = torsion and dies("Tor1U")
    contramodule = reduced and dies("Ext1U")
    torsionfree = unit_map_injective(inst, M, budget, window)[0]
    divisible = counit_image_full(inst, M, budget, window)[0]
    return _flags("definitional", torsion, torsionfree, divisible, reduced,
                  dies("Tor0K"), dies("Ext0K"), comodule, contramodule)


def _kron_structural(inst, M: KronRep) -> ClassFlags:
    if M.dim() == 0:
        return _all_true("structural")
    inv = pencil_invariants(M)
    marked = sum(inv.mult_at(p) for p in inst.points)
    outside = inv.outside_dim(inst.points)
    torsion = not inv.pp_present and outside == 0
    torsionfree = not inv.pi_present and marked == 0
    divisible = not inv.pp_present and marked == 0
    reduced = not inv.pi_present and outside == 0
    comodule = torsion and not inv.pi_present
    return _flags("structural", torsion, torsionfree, divisible, reduced,
                  not inv.pp_present, not inv.pi_present, comodule,
                  comodule)


def _kron_definitional(inst, M: KronRep, budget, window) -> ClassFlags:
    if M.dim() == 0:
        return _all_true("definitional")
    if budget is None:
        budget = default_budget(inst, M)
    ulevs, ut1, ut0 = _kron_tensor_towers(inst, M, budget, "U")
    _, kt1, kt0 = _kron_tensor_towers(inst, M, budget, "K")
    uhlevs, uhom, uext = _kron_hom_towers(inst, M, budget, "U")
    khlevs, khom, _kext = _kron_hom_towers(inst, M, budget, "K")

    def dies(pair, mode, name):
        stages, maps = pair
        return _tower_vanishes(inst, stages, maps, mode, budget, window,
                               name=name)[0]

    torsion = dies(ut0, "colim", "Tor0U")
    reduced = dies(uhom, "lim", "HomU")
    comodule = torsion and dies(ut1, "colim", "Tor1U")
    contramodule = reduced and dies(uext, "lim", "Ext1U")
    special = dies(kt0, "colim", "Tor0K")
    cospecial = dies(khom, "lim", "Ext0K")

    kdims = []
    for lev in ulevs:
        unit = _unit_component_maps(lev, M)
        kdims.append(unit[2].kernel().cols + unit[1].kernel().cols)
    tail = kdims[-window:]
    if len(set(tail)) != 1:
        raise NoStabilization(budget, "unit kernel keeps moving")
    torsionfree = tail[0] == 0

    images = []
    for n in range(1, budget + 1):
        conn = _HomConnect(inst, n, M, uhlevs[n - 1], khlevs[n - 1])
        ev = conn.counit_repmap()
        images.append((ev.A1.rank(), ev.A2.rank()))
    tail = images[-window:]
    if len(set(tail)) != 1:
        raise NoStabilization(budget, "counit image keeps moving")
    divisible = tail[0] == (M.d1, M.d2)

    return _flags("definitional", torsion, torsionfree, divisible, reduced,
                  special, cospecial, comodule, contramodule)


def classify(inst, M, path="definitional", budget=None,
             window=DEFAULT_WINDOW) -> ClassFlags:
    """Evaluate the eight class flags of M on the chosen path."""
    if path not in PATHS:
        raise ValueError(f"path must be one of {PATHS}")
    if inst.kind == "cpid":
        if not isinstance(M, FPModPID):
            raise ValueError("cpid classification expects a finitely "
                             "presented module")
        if M.free_rank > 0:
            raise ValueError("classification covers finite-length modules; "
                             "a free summand belongs to neither class")
        if path == "structural":
            return _cpid_structural(inst, M)
        return _cpid_definitional(inst, M, budget, window)
    if not isinstance(M, KronRep):
        raise ValueError("kron classification expects a representation")
    if path == "structural":
        return _kron_structural(inst, M)
    return _kron_definitional(inst, M, budget, window)


def is_point_module(comp: KronRep, point) -> bool:
    """All blocks of comp regular at the single given point."""
    if comp.dim() == 0:
        return True
    inv = pencil_invariants(comp)
    if inv.pp_present or inv.pi_present:
        return False
    return inv.mult_at(point) == inv.reg_total


def lambda_decompose(inst, M: KronRep, side="comodule") -> BlockDecomp:
    """Split a comodule or contramodule into its per-point summands."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    if inst.kind != "kron":
        raise ValueError("per-point decomposition applies to the kron "
                         "family")
    flags = classify(inst, M, path="structural")
    if not getattr(flags, side):
        raise ValueError(f"input is not a {side} over this instance")

    order = sorted(inst.finite_points) + [INF]
    if M.dim() == 0:
        comps = {p: KronRep.zero() for p in order}
        return BlockDecomp(components=comps,
                           witness=(Mat.identity(0), Mat.identity(0)),
                           side=side)

    dec = pencil_decompose(M)
    a1, a2 = dec.change_of_basis
    spans: dict = {}
    c1 = c2 = 0
    for label, mult in dec.blocks:
        assert isinstance(label, Regular) and label.point in inst.points
        w = label.size * mult
        idx = spans.setdefault(label.point, ([], []))
        idx[0].extend(range(c1, c1 + w))
        idx[1].extend(range(c2, c2 + w))
        c1 += w
        c2 += w

    comps = {}
    w1 = Mat.zeros(M.d1, 0)
    w2 = Mat.zeros(M.d2, 0)
    for p in order:
        idx1, idx2 = spans.get(p, ([], []))
        if not idx1:
            comps[p] = KronRep.zero()
            continue
        b1 = a1.take_cols(idx1).image_basis()
        b2 = a2.take_cols(idx2).image_basis()
        comp = sub_rep(M, b1, b2)
        assert is_point_module(comp, p)
        comps[p] = comp
        w1 = w1.hstack(b1)
        w2 = w2.hstack(b2)

    model = KronRep.zero()
    for p in order:
        model = model.direct_sum(comps[p])
    assert w1.is_iso() and w2.is_iso()
    assert M.F * w1 == w2 * model.F and M.G * w1 == w2 * model.G
    return BlockDecomp(components=comps, witness=(w1, w2), side=side)

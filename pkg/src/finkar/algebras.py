"""Algebras and coalgebras for the state monad, projectivity witnesses,
compliant vs. consistent hom predicates, and the splitting-based passage
between projective algebras and machine-form projectors.

The algebra/coalgebra categories stay implicit: structures are verified by
predicates and law reports, never enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Optional

from .finset import (CheckConfig, FinSetObj, Morphism, ShapeError,
                     compose, equal_mor, identity)
from .idempotents import Splitting, karoubi_hom_check, split_idempotent
from .report import VerifyReport, combine, failing, passing
from .statemonad import (StateContext, eta, exp_mor, g_mor, g_obj, eps,
                         mealy_of_kleisli, mu, nu, prod_mor, prod_obj, t_mor,
                         t_obj, transpose_up)


class SearchBoundExceeded(RuntimeError):
    """Raised when a brute-force search space exceeds the configured bound."""


@dataclass(frozen=True)
class AlgebraStruct:
    """A carrier A with a structure map TA -> A (laws checked, not assumed)."""

    ctx: StateContext
    carrier: FinSetObj
    structure: Morphism

    def __post_init__(self):
        if self.structure.dom != t_obj(self.ctx, self.carrier) \
                or self.structure.cod != self.carrier:
            raise ShapeError("structure map must have shape TA -> A")


@dataclass(frozen=True)
class CoalgebraStruct:
    """A carrier B with a structure map B -> GB."""

    ctx: StateContext
    carrier: FinSetObj
    structure: Morphism

    def __post_init__(self):
        if self.structure.dom != self.carrier \
                or self.structure.cod != g_obj(self.ctx, self.carrier):
            raise ShapeError("structure map must have shape B -> GB")


@dataclass(frozen=True)
class ProjectiveWitness:
    """An algebra together with its hom-section and the induced projector.

    coretraction: A -> TA, an algebra hom into the free algebra with
    structure . coretraction = id.  projector: the machine-form transpose
    S x A -> S x A, idempotent, and the exponential image of the
    coretraction-after-structure composite.
    """

    algebra: AlgebraStruct
    coretraction: Morphism
    projector: Morphism


def check_algebra(a: AlgebraStruct,
                  config: CheckConfig | None = None) -> VerifyReport:
    """Unit and multiplication laws for one algebra."""
    cfg = config or a.ctx.config
    al = a.structure
    unit = equal_mor(compose(eta(a.ctx, a.carrier), al), identity(a.carrier),
                     cfg, check="structure.eta=id")
    assoc = equal_mor(compose(t_mor(a.ctx, al), al),
                      compose(mu(a.ctx, a.carrier), al),
                      cfg, check="structure.Tstructure=structure.mu")
    return combine("algebra-laws", [unit, assoc])


def check_coalgebra(c: CoalgebraStruct,
                    config: CheckConfig | None = None) -> VerifyReport:
    """Counit and comultiplication laws for one coalgebra."""
    cfg = config or c.ctx.config
    be = c.structure
    counit = equal_mor(compose(be, eps(c.ctx, c.carrier)), identity(c.carrier),
                       cfg, check="eps.structure=id")
    coassoc = equal_mor(compose(be, g_mor(c.ctx, be)),
                        compose(be, nu(c.ctx, c.carrier)),
                        cfg, check="Gstructure.structure=nu.structure")
    return combine("coalgebra-laws", [counit, coassoc])


def free_algebra(ctx: StateContext, x: FinSetObj) -> AlgebraStruct:
    """The free algebra on x: carrier TX with the multiplication."""
    return AlgebraStruct(ctx=ctx, carrier=t_obj(ctx, x), structure=mu(ctx, x))


def algebra_hom_check(f: Morphism, a: AlgebraStruct, c: AlgebraStruct,
                      coretractions: Optional[tuple[Morphism, Morphism]] = None,
                      config: CheckConfig | None = None) -> bool:
    """Is f: A -> C an algebra homomorphism (f . alpha = gamma . Tf)?

    With `coretractions` = (abar, cbar) the section-preservation square
    Tf . abar = cbar . f is required as well (the hom-sets of the
    section-carrying presentation).
    """
    cfg = config or a.ctx.config
    if f.dom != a.carrier or f.cod != c.carrier:
        raise ShapeError("hom candidate must map carrier to carrier")
    ok = equal_mor(compose(a.structure, f),
                   compose(t_mor(a.ctx, f), c.structure), cfg).passed
    if ok and coretractions is not None:
        abar, cbar = coretractions
        ok = equal_mor(compose(abar, t_mor(a.ctx, f)),
                       compose(f, cbar), cfg).passed
    return ok


# ---------------------------------------------------------------------------
# projectivity


def _verify_witness(w: ProjectiveWitness, cfg: CheckConfig) -> VerifyReport:
    ctx, a = w.algebra.ctx, w.algebra
    al, ab = a.structure, w.coretraction
    subs = [
        equal_mor(compose(ab, al), identity(a.carrier), cfg,
                  check="structure.section=id"),
        passing("section-is-hom") if algebra_hom_check(
            ab, a, free_algebra(ctx, a.carrier), config=cfg)
        else failing("section-is-hom", [{"hom": False}]),
        equal_mor(compose(w.projector, w.projector), w.projector, cfg,
                  check="projector-idempotent"),
        equal_mor(compose(al, ab), exp_mor(ctx, w.projector), cfg,
                  check="section.structure=exp-projector"),
    ]
    return combine("projective-witness", subs)


def make_witness(a: AlgebraStruct, coretraction: Morphism,
                 config: CheckConfig | None = None) -> ProjectiveWitness:
    """Package a hom-section into a witness, verifying all its invariants."""
    cfg = config or a.ctx.config
    proj = mealy_of_kleisli(a.ctx, coretraction)
    w = ProjectiveWitness(algebra=a, coretraction=coretraction, projector=proj)
    rep = _verify_witness(w, cfg)
    if not rep.passed:
        raise ValueError(f"witness invariants failed: {rep.to_dict()}")
    return w


def construct_coretraction(a: AlgebraStruct,
                           retract: tuple[FinSetObj, Morphism, Morphism],
                           config: CheckConfig | None = None
                           ) -> ProjectiveWitness:
    """Build the hom-section from retract data (X, q, i).

    q must be an algebra hom from the free algebra on X onto a, i a hom
    section of it; the coretraction is then Tq . Teta . i.
    """
    cfg = config or a.ctx.config
    ctx = a.ctx
    x, q, i = retract
    fx = free_algebra(ctx, x)
    if not algebra_hom_check(q, fx, a, config=cfg):
        raise ValueError("q is not an algebra hom from the free algebra")
    if not algebra_hom_check(i, a, fx, config=cfg):
        raise ValueError("i is not an algebra hom into the free algebra")
    if not equal_mor(compose(i, q), identity(a.carrier), cfg).passed:
        raise ValueError("q . i is not the identity")
    ab = compose(compose(i, t_mor(ctx, eta(ctx, x))), t_mor(ctx, q))
    return make_witness(a, ab, cfg)


def search_sections(a: AlgebraStruct, config: CheckConfig | None = None,
                    search_bound: int = 1 << 20) -> list[Morphism]:
    """All hom-sections of an algebra, by exhaustive fiber-pruned search.

    Candidates pick one structure-preimage per carrier element; each
    candidate is then checked to be an algebra homomorphism into the free
    algebra (with early exit).  Deterministic order: fibers ascending.
    """
    ctx, al = a.ctx, a.structure
    n = a.carrier.card
    ta = t_obj(ctx, a.carrier)
    fibers = [[t for t in range(ta.card) if al(t) == v] for v in range(n)]
    space = 1
    for f in fibers:
        space *= len(f)
        if space > search_bound:
            raise SearchBoundExceeded(
                f"section search space exceeds {search_bound}")
    mu_tab = mu(ctx, a.carrier).table
    al_tab = al.table
    # decode each behavior once: T(section) re-ranks digit (s1, x) to
    # (s1, section(x)) with the step weights of T(carrier)
    m1, m2 = ctx.ns * n, ctx.ns * ta.card
    decoded = []
    for t in range(ta.card):
        digs = []
        tv = t
        for _ in range(ctx.ns):
            tv, d = divmod(tv, m1)
            digs.append(divmod(d, n))
        decoded.append(digs)
    out = []
    for choice in iproduct(*fibers):
        ok = True
        for t in range(ta.card):
            t_rank = 0
            w = 1
            for s1, x in decoded[t]:
                t_rank += (s1 * ta.card + choice[x]) * w
                w *= m2
            if choice[al_tab[t]] != mu_tab[t_rank]:
                ok = False
                break
        if ok:
            out.append(Morphism(a.carrier, ta, table=list(choice)))
    return out


def is_projective(a: AlgebraStruct, config: CheckConfig | None = None,
                  search_bound: int = 1 << 20
                  ) -> Optional[ProjectiveWitness]:
    """Search for a hom-section of the structure map.

    Returns a witness built from the first section in canonical search
    order, or None.  Sections need not be unique; use search_sections to
    enumerate them all.
    """
    cfg = config or a.ctx.config
    sections = search_sections(a, cfg, search_bound)
    if not sections:
        return None
    return make_witness(a, sections[0], cfg)


# ---------------------------------------------------------------------------
# compliant / consistent homs and the machine-form object condition


def compliant_hom_check(h: Morphism, phi: Morphism, psi: Morphism,
                        config: CheckConfig = CheckConfig()) -> bool:
    """Machine-form compliance: psi . h . phi = h (envelope hom condition)."""
    return karoubi_hom_check(h, phi, psi, config)


def consistent_hom_check(ctx: StateContext, f: Morphism, phi: Morphism,
                         psi: Morphism,
                         config: CheckConfig | None = None) -> bool:
    """Consistency of a carrier map f: X -> Y: psi . (S x f) = (S x f) . phi."""
    cfg = config or ctx.config
    sf = prod_mor(ctx, f)
    if phi.dom != sf.dom or psi.dom != sf.cod:
        raise ShapeError("projectors must sit on S x dom(f) and S x cod(f)")
    return equal_mor(compose(sf, psi), compose(phi, sf), cfg).passed


def karm_object_condition(ctx: StateContext, carrier: FinSetObj,
                          phi: Morphism,
                          config: CheckConfig | None = None) -> VerifyReport:
    """Does the exponential transport of phi split back through the carrier?

    For an idempotent phi on S x X, the image of S => phi is exactly the
    set of maps S -> Fix(phi), so in finite sets a splitting of S => phi
    through X exists iff |Fix(phi)|^|S| = |X|.  Both cardinalities are
    reported.
    """
    cfg = config or ctx.config
    if phi.dom != prod_obj(ctx, carrier) or phi.cod != phi.dom:
        raise ShapeError("expected an endomorphism of S x carrier")
    if not equal_mor(compose(phi, phi), phi, cfg).passed:
        return failing("karm-object-condition",
                       [{"reason": "projector is not idempotent"}])
    nfix = sum(1 for k in range(phi.dom.card) if phi(k) == k)
    image_card = nfix ** ctx.ns
    ok = image_card == carrier.card
    details = {"image_card": image_card, "carrier_card": carrier.card,
               "fixed_points": nfix}
    if ok:
        return passing("karm-object-condition", **details)
    return VerifyReport(check="karm-object-condition", status="fail",
                        witnesses=[details], details=details)


def karm_retraction(ctx: StateContext, carrier: FinSetObj, phi: Morphism,
                    config: CheckConfig | None = None
                    ) -> tuple[Morphism, Morphism]:
    """The canonical section/retraction of S => phi through the carrier.

    The section is the transpose of phi; the retraction inverts it on the
    image of S => phi.  Raises if the transpose is not injective or misses
    part of that image (then no splitting through the carrier exists in
    the structured sense and the equivalence would fail).
    """
    abar = transpose_up(ctx, phi)
    ta = t_obj(ctx, carrier)
    inv = {}
    for x in range(carrier.card):
        v = abar(x)
        if v in inv:
            raise ValueError("transpose of the projector is not injective")
        inv[v] = x
    fphi = exp_mor(ctx, phi)
    table = []
    for t in range(ta.card):
        v = fphi(t)
        if v not in inv:
            raise ValueError(
                "image of the exponential projector escapes the transpose")
        table.append(inv[v])
    alpha = Morphism(ta, carrier, table=table)
    return abar, alpha


# ---------------------------------------------------------------------------
# the two functors between projective algebras and machine-form projectors


def functor_h(w: ProjectiveWitness) -> Morphism:
    """Object part: the machine-form projector of a witnessed algebra."""
    return w.projector


def functor_h_mor(f: Morphism, w1: ProjectiveWitness, w2: ProjectiveWitness,
                  config: CheckConfig | None = None) -> Morphism:
    """Arrow part: send an algebra hom to its compliant machine form.

    The image is the codomain-side composite (machine form of the
    codomain section after f), which is always compliant.  The two
    defining composites through either projector agree exactly when f
    preserves the chosen sections; that agreement is asserted whenever
    the section-preservation square holds.
    """
    ctx = w1.algebra.ctx
    cfg = config or ctx.config
    if not algebra_hom_check(f, w1.algebra, w2.algebra, config=cfg):
        raise ValueError("not an algebra homomorphism")
    sf = prod_mor(ctx, f)
    via_cod = compose(sf, w2.projector)
    via_dom = compose(w1.projector, sf)
    compatible = algebra_hom_check(
        f, w1.algebra, w2.algebra,
        coretractions=(w1.coretraction, w2.coretraction), config=cfg)
    agree = equal_mor(via_cod, via_dom, cfg).passed
    if compatible and not agree:
        raise AssertionError("section-compatible hom with diverging composites")
    if not compatible and agree:
        raise AssertionError("diverging sections with agreeing composites")
    if not compliant_hom_check(via_cod, w1.projector, w2.projector, cfg):
        raise AssertionError("arrow part is not compliant")
    return via_cod


@dataclass(frozen=True)
class SplitAlgebra:
    """Result of splitting an exponential projector inside the algebras.

    carrier_map records the forced identification mid -> original fixed
    points (the splitting section composed with the structure retraction
    when one exists).
    """

    algebra: AlgebraStruct
    splitting: Splitting  # of S => phi on T(carrier)


def functor_k(ctx: StateContext, carrier: FinSetObj, phi: Morphism,
              config: CheckConfig | None = None) -> SplitAlgebra:
    """Split S => phi on the free algebra; the mid inherits the structure.

    Canonical fixed-point splitting: the mid is an Atom listing the fixed
    points of S => phi ascending, and the structure is q . mu . T(i).
    """
    cfg = config or ctx.config
    fphi = exp_mor(ctx, phi)
    s = split_idempotent(fphi)
    structure = compose(compose(t_mor(ctx, s.i), mu(ctx, carrier)), s.q)
    alg = AlgebraStruct(ctx=ctx, carrier=s.mid, structure=structure)
    rep = check_algebra(alg, cfg)
    if not rep.passed:
        raise AssertionError("split of an exponential projector broke the laws")
    return SplitAlgebra(algebra=alg, splitting=s)


def functor_k_mor(ctx: StateContext, h: Morphism, k1: SplitAlgebra,
                  k2: SplitAlgebra,
                  config: CheckConfig | None = None) -> Morphism:
    """Arrow part: induced map between the splitting mids.

    h must be compliant between the projectors; the induced map is an
    algebra homomorphism between the mids.
    """
    cfg = config or ctx.config
    kh = compose(compose(k1.splitting.i, exp_mor(ctx, h)), k2.splitting.q)
    if not algebra_hom_check(kh, k1.algebra, k2.algebra, config=cfg):
        raise AssertionError("induced mid-to-mid map is not an algebra hom")
    return kh


def coretraction_of_split(ctx: StateContext, carrier: FinSetObj,
                          k: SplitAlgebra,
                          config: CheckConfig | None = None
                          ) -> ProjectiveWitness:
    """The canonical witness of a split algebra, via its retract data."""
    cfg = config or ctx.config
    return construct_coretraction(
        k.algebra, (carrier, k.splitting.q, k.splitting.i), cfg)


def iso_witness_i_prime(ctx: StateContext, carrier: FinSetObj, phi: Morphism,
                        config: CheckConfig | None = None
                        ) -> tuple[Morphism, Morphism, VerifyReport]:
    """The mutually inverse envelope homs between a projector and its
    witnessed double-transfer image.

    iPrime is the machine form of the splitting mono, iDoublePrime the
    composite of the unit, the splitting epi, and the induced projector.
    Verifies i'' . i' = induced projector and i' . i'' = phi, and that
    i' is compliant.
    """
    cfg = config or ctx.config
    k = functor_k(ctx, carrier, phi, cfg)
    w = coretraction_of_split(ctx, carrier, k, cfg)
    i_prime = mealy_of_kleisli(ctx, k.splitting.i)
    i_double = compose(compose(prod_mor(ctx, eta(ctx, carrier)),
                               prod_mor(ctx, k.splitting.q)),
                       w.projector)
    subs = [
        equal_mor(compose(i_prime, i_double), w.projector, cfg,
                  check="idouble.iprime=witness-projector"),
        equal_mor(compose(i_double, i_prime), phi, cfg,
                  check="iprime.idouble=phi"),
        passing("iprime-compliant") if compliant_hom_check(
            i_prime, w.projector, phi, cfg)
        else failing("iprime-compliant", [{"compliant": False}]),
    ]
    return i_prime, i_double, combine("iso-witness", subs)

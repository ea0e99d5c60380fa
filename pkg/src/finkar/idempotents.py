"""Projectors, their splittings, Karoubi-style hom checking, and the
split-equalizer verifier.

The ambient category never gets materialized: an object of the envelope is
just an idempotent Morphism, membership of a hom-set is a predicate, and
composition is inherited composition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .finset import (Atom, CheckConfig, FinSetObj, Morphism, SeededRng,
                     ShapeError, compose, equal_mor, identity, image_factor)
from .report import VerifyReport, combine, failing, passing


@dataclass(frozen=True)
class Splitting:
    """A projector together with its epi-mono factorization through mid.

    Satisfies compose(q, i) = projector and compose(i, q) = identity(mid).
    """

    projector: Morphism
    mid: FinSetObj
    q: Morphism  # Y -> mid
    i: Morphism  # mid -> Y


def is_idempotent(e: Morphism, config: CheckConfig = CheckConfig()) -> bool:
    if e.dom != e.cod:
        raise ShapeError("idempotence only makes sense for endomorphisms")
    return equal_mor(compose(e, e), e, config).passed


def fixed_ranks(e: Morphism) -> list[int]:
    """Ranks fixed by an endomorphism, ascending."""
    return [k for k, v in enumerate(e.table) if v == k]


def split_idempotent(e: Morphism) -> Splitting:
    """Split a projector through its fixed points, ordered ascending.

    For an idempotent the image and the fixed-point set coincide, so this
    is the epi-mono factorization with the canonical mid.
    """
    if not is_idempotent(e):
        raise ValueError("split_idempotent needs an idempotent morphism")
    q, i, mid = image_factor(e)
    return Splitting(projector=e, mid=mid, q=q, i=i)


def verify_split_equalizer(e: Morphism, s: Splitting,
                           config: CheckConfig = CheckConfig()) -> VerifyReport:
    """Check that the splitting exhibits mid as fixed points of e.

    Clauses: (i) e fixes the included elements, (ii) every fixed element
    factors uniquely through i, (iii) q coequalizes e and the identity,
    (iv) q is surjective.
    """
    subs = []
    subs.append(equal_mor(compose(s.i, e), s.i, config, check="e.i=i"))

    fixed = [k for k in range(e.dom.card) if e(k) == k]
    itab = s.i.table
    preimages = {}
    wit = []
    for j, v in enumerate(itab):
        preimages.setdefault(v, []).append(j)
    for x in fixed:
        hits = preimages.get(x, [])
        if len(hits) != 1:
            wit.append({"fixed_rank": x, "preimages": hits})
    for v, hits in preimages.items():
        if len(hits) > 1:
            wit.append({"included_rank": v, "preimages": hits})
    subs.append(passing("fixed-points-factor-uniquely") if not wit
                else failing("fixed-points-factor-uniquely", wit))

    subs.append(equal_mor(compose(e, s.q), s.q, config, check="q.e=q"))

    hit = set(s.q.table)
    missing = [j for j in range(s.mid.card) if j not in hit]
    subs.append(passing("q-surjective") if not missing
                else failing("q-surjective", [{"mid_rank": j} for j in missing]))
    return combine("split-equalizer", subs)


def karoubi_hom_check(f: Morphism, phi: Morphism, psi: Morphism,
                      config: CheckConfig = CheckConfig()) -> bool:
    """Membership of f in the envelope hom-set from phi to psi.

    The square condition psi . f . phi = f is equivalent to the pair
    f . phi = f and psi . f = f; both routes are evaluated and must agree.
    """
    if phi.dom != f.dom or psi.dom != f.cod:
        raise ShapeError("projectors must sit on dom(f) and cod(f)")
    sandwich = equal_mor(compose(compose(phi, f), psi), f, config).passed
    pair = (equal_mor(compose(phi, f), f, config).passed
            and equal_mor(compose(f, psi), f, config).passed)
    assert sandwich == pair, "envelope hom criteria diverged"
    return sandwich


def karoubi_compose(f: Morphism, g: Morphism, phi: Morphism, psi: Morphism,
                    chi: Morphism,
                    config: CheckConfig = CheckConfig()) -> Morphism:
    """Compose envelope homs f: phi -> psi and g: psi -> chi."""
    if not karoubi_hom_check(f, phi, psi, config):
        raise ValueError("f is not an envelope hom from phi to psi")
    if not karoubi_hom_check(g, psi, chi, config):
        raise ValueError("g is not an envelope hom from psi to chi")
    gf = compose(f, g)
    assert karoubi_hom_check(gf, phi, chi, config)
    return gf


def check_split_equalizer_diagram(i: Morphism, q: Morphism, f: Morphism,
                                  j: Morphism, r: Morphism,
                                  config: CheckConfig = CheckConfig()
                                  ) -> VerifyReport:
    """Verify the split-equalizer hypotheses and the resulting biconditional.

    Shapes: i: A -> B, q: B -> A, f, j: B -> C, r: C -> B.  Hypotheses:
    q.i = id, r.j = id, f.r.f = j.r.f.  Then r.f must be idempotent, and
    "i equalizes f and j" is compared against "i.q = r.f".
    """
    a, b, c = i.dom, i.cod, f.cod
    if q.dom != b or q.cod != a or f.dom != b or j.dom != b or j.cod != c \
            or r.dom != c or r.cod != b:
        raise ShapeError("split-equalizer diagram shapes do not line up")
    subs = [
        equal_mor(compose(i, q), identity(a), config, check="q.i=id"),
        equal_mor(compose(j, r), identity(b), config, check="r.j=id"),
        equal_mor(compose(compose(f, r), f), compose(compose(f, r), j),
                  config, check="f.r.f=j.r.f"),
    ]
    hyps = combine("hypotheses", subs)

    rf = compose(f, r)
    idem = equal_mor(compose(rf, rf), rf, config, check="r.f-idempotent")

    # Equalizer side: f.i = j.i plus unique factorization of every
    # equalizing element of B through i.
    cone = equal_mor(compose(i, f), compose(i, j), config, check="f.i=j.i")
    eq_set = [x for x in range(b.card) if f(x) == j(x)]
    preimages = {}
    for k, v in enumerate(i.table):
        preimages.setdefault(v, []).append(k)
    wit = []
    for x in eq_set:
        if len(preimages.get(x, [])) != 1:
            wit.append({"equalizing_rank": x,
                        "preimages": preimages.get(x, [])})
    for v in i.table:
        if v not in eq_set:
            wit.append({"included_rank": v, "not_equalizing": True})
    universal = passing("i-universal") if not wit else failing("i-universal", wit)
    is_equalizer = cone.passed and universal.passed

    split_eq = equal_mor(compose(q, i), rf, config, check="i.q=r.f")
    agree = is_equalizer == split_eq.passed
    iff = (passing("equalizer-iff-splitting",
                   equalizer=is_equalizer, splitting=split_eq.passed)
           if agree else
           failing("equalizer-iff-splitting",
                   [{"equalizer": is_equalizer,
                     "splitting": split_eq.passed}]))
    # The two sides of the biconditional may both be false on a valid
    # diagram; only the hypotheses, the idempotence, and their agreement
    # gate the verdict.  The side evaluations stay attached for reading.
    gating = combine("split-equalizer-gate", [hyps, idem, iff])
    return VerifyReport(check="split-equalizer-diagram", status=gating.status,
                        mode=gating.mode, seed=gating.seed, cap=gating.cap,
                        witnesses=list(gating.witnesses),
                        sub=[hyps, idem, cone, universal, split_eq, iff],
                        details={"equalizer": is_equalizer,
                                 "splitting": split_eq.passed})


# ---------------------------------------------------------------------------
# seeded generators (used by the test suite and the CLI battery)


def random_morphism(dom: FinSetObj, cod: FinSetObj, rng: SeededRng) -> Morphism:
    return Morphism(dom, cod,
                    table=[rng.below(cod.card) for _ in range(dom.card)])


def random_idempotent(obj: FinSetObj, rng: SeededRng) -> Morphism:
    """Uniformly shaped projector: pick fixed points, retract onto them."""
    n = obj.card
    if n == 0:
        return identity(obj)
    nfix = 1 + rng.below(n)
    fixed = sorted(rng.shuffled(range(n))[:nfix])
    table = [k if k in fixed else rng.choice(fixed) for k in range(n)]
    return Morphism(obj, obj, table=table)


def random_section_retraction(small: FinSetObj, big: FinSetObj,
                              rng: SeededRng) -> tuple[Morphism, Morphism]:
    """A split mono small -> big with a retraction big -> small."""
    if small.card > big.card:
        raise ValueError("need card(small) <= card(big)")
    image = sorted(rng.shuffled(range(big.card))[:small.card])
    sec = Morphism(small, big, table=image)
    index = {v: k for k, v in enumerate(image)}
    ret = Morphism(big, small,
                   table=[index.get(x, rng.below(small.card))
                          for x in range(big.card)])
    return sec, ret


def random_split_equalizer_diagram(rng: SeededRng, max_size: int = 8):
    """A diagram satisfying the three split-equalizer hypotheses.

    Two families: a coherent one built from a projector splitting (the
    biconditional holds with both sides true) and a detuned one whose f
    tracks a projector with a different fixed-point set (both sides false).
    """
    nb = 2 + rng.below(max_size - 1)
    b = Atom("B", nb)
    e = random_idempotent(b, rng)
    q, i, a = image_factor(e)
    nc = nb + rng.below(max(1, max_size - nb + 1))
    c = Atom("C", nc)
    j, r = random_section_retraction(b, c, rng)
    if rng.below(2) == 0:
        f = compose(e, j)
    else:
        # A projector with a different fixed-point set keeps the detuned
        # instance consistent (both sides of the biconditional false).
        e2 = random_idempotent(b, rng)
        for _ in range(64):
            if set(fixed_ranks(e2)) != set(fixed_ranks(e)):
                break
            e2 = random_idempotent(b, rng)
        if set(fixed_ranks(e2)) == set(fixed_ranks(e)):
            e2 = e
        f = compose(e2, j)
    return i, q, f, j, r

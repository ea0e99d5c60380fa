"""Mealy machines as stateful databases, idempotent release policies,
compliance and consistency checking, and public-data extraction into Moore
machines.

A policy is an idempotent machine-form map; its fixed points are the
public pairs, and when the splitting-through-carrier condition holds they
carry a Moore machine satisfying the three public-state equations."""

from __future__ import annotations

from dataclasses import dataclass

from .equivalence import functor_l, make_karm_object, moore_law_violations
from .finset import (CheckConfig, FinSetObj, Morphism, Prod, ShapeError,
                     compose, equal_mor)
from .report import VerifyReport, combine, failing, passing
from .statemonad import (StateContext, exp_mor, g_obj, prod_mor, prod_obj,
                         t_obj)


@dataclass(frozen=True)
class MealyMachine:
    """A map S x A -> S x B: next state and output for each state/input."""

    ctx: StateContext
    in_set: FinSetObj
    out_set: FinSetObj
    mapping: Morphism

    def __post_init__(self):
        if self.mapping.dom != prod_obj(self.ctx, self.in_set) \
                or self.mapping.cod != prod_obj(self.ctx, self.out_set):
            raise ShapeError("mapping must have shape S x A -> S x B")

    @property
    def state_set(self) -> FinSetObj:
        return self.ctx.state_space

    def next_state(self, s: int, a: int) -> int:
        return self.mapping(s * self.in_set.card + a) // self.out_set.card

    def output(self, s: int, a: int) -> int:
        return self.mapping(s * self.in_set.card + a) % self.out_set.card

    def next_map(self) -> Morphism:
        nb = self.out_set.card
        return Morphism(self.mapping.dom, self.ctx.state_space,
                        table=[v // nb for v in self.mapping.table])

    def out_map(self) -> Morphism:
        nb = self.out_set.card
        return Morphism(self.mapping.dom, self.out_set,
                        table=[v % nb for v in self.mapping.table])


def mealy_from_components(ctx: StateContext, in_set: FinSetObj,
                          out_set: FinSetObj, nxt: Morphism,
                          out: Morphism) -> MealyMachine:
    """Pair a next-state map and an output map into one machine."""
    dom = prod_obj(ctx, in_set)
    if nxt.dom != dom or nxt.cod != ctx.state_space:
        raise ShapeError("next map must have shape S x A -> S")
    if out.dom != dom or out.cod != out_set:
        raise ShapeError("output map must have shape S x A -> B")
    nb = out_set.card
    table = [nxt(p) * nb + out(p) for p in range(dom.card)]
    mapping = Morphism(dom, prod_obj(ctx, out_set), table=table)
    return MealyMachine(ctx=ctx, in_set=in_set, out_set=out_set,
                        mapping=mapping)


@dataclass(frozen=True)
class Policy:
    """An idempotent machine on a single alphabet; validated eagerly."""

    machine: MealyMachine

    def __post_init__(self):
        if self.machine.in_set != self.machine.out_set:
            raise ShapeError("a policy needs matching input and output sets")
        rep = check_policy(self.machine)
        if not rep.passed:
            raise ValueError(f"policy map is not idempotent: {rep.to_dict()}")

    @property
    def mapping(self) -> Morphism:
        return self.machine.mapping

    @property
    def alphabet(self) -> FinSetObj:
        return self.machine.in_set


@dataclass(frozen=True)
class MooreMachine:
    """Public-pair states with a readout into S and a step over S.

    Satisfies (verified, not assumed) the three equations:
    readout(step(b, s)) = s, step(b, readout(b)) = b, and
    step(step(b, s), t) = step(b, t).
    """

    ctx: StateContext
    state_set: FinSetObj
    readout: Morphism  # B -> S
    step: Morphism     # Prod(B, S) -> B
    pair_labels: tuple = ()  # optional (state, input) rank pairs per state

    def __post_init__(self):
        if self.readout.dom != self.state_set \
                or self.readout.cod != self.ctx.state_space:
            raise ShapeError("readout must have shape B -> S")
        if self.step.dom != Prod(self.state_set, self.ctx.state_space) \
                or self.step.cod != self.state_set:
            raise ShapeError("step must have shape B x S -> B")

    def step_at(self, b: int, s: int) -> int:
        return self.step(b * self.ctx.ns + s)


def check_moore(m: MooreMachine) -> VerifyReport:
    """The three public-state equations, exhaustively."""
    violations = moore_law_violations(
        m.ctx.ns, m.state_set.card,
        lambda b: m.readout(b), m.step_at)
    if violations:
        return failing("moore-laws", violations)
    return passing("moore-laws")


def moore_to_coalgebra(m: MooreMachine):
    """Bundle readout and step into a structure map B -> GB."""
    from .algebras import CoalgebraStruct
    nb = m.state_set.card
    ne = nb ** m.ctx.ns
    tab = []
    for b in range(nb):
        g = 0
        w = 1
        for t in range(m.ctx.ns):
            g += m.step_at(b, t) * w
            w *= nb
        tab.append(m.readout(b) * ne + g)
    beta = Morphism(m.state_set, g_obj(m.ctx, m.state_set), table=tab)
    return CoalgebraStruct(ctx=m.ctx, carrier=m.state_set, structure=beta)


def coalgebra_to_moore(c) -> MooreMachine:
    """Unbundle a structure map B -> GB into readout and step tables."""
    ctx = c.ctx
    nb = c.carrier.card
    ne = nb ** ctx.ns
    readout = []
    step = []
    for b in range(nb):
        v = c.structure(b)
        st, g = divmod(v, ne)
        readout.append(st)
        for t in range(ctx.ns):
            step.append((g // nb ** t) % nb)
    return MooreMachine(
        ctx=ctx, state_set=c.carrier,
        readout=Morphism(c.carrier, ctx.state_space, table=readout),
        step=Morphism(Prod(c.carrier, ctx.state_space), c.carrier,
                      table=step))


# ---------------------------------------------------------------------------
# checks


def check_policy(p, config: CheckConfig | None = None) -> VerifyReport:
    """Idempotence of a square machine (accepts a Policy or a MealyMachine)."""
    machine = p.machine if isinstance(p, Policy) else p
    cfg = config or machine.ctx.config
    if machine.in_set != machine.out_set:
        raise ShapeError("idempotence needs matching input and output sets")
    m = machine.mapping
    return equal_mor(compose(m, m), m, cfg, check="policy-idempotent")


def check_compliance(f: MealyMachine, phi: Policy, psi: Policy,
                     config: CheckConfig | None = None) -> VerifyReport:
    """Sandwich equation and its split form, which must agree.

    The sandwich psi . f . phi = f is checked alongside the pair
    psi . f = f and f . phi = f; a divergence between the two routes would
    be reported as its own failure."""
    cfg = config or f.ctx.config
    if phi.alphabet != f.in_set or psi.alphabet != f.out_set:
        raise ShapeError("policies must sit on the machine's alphabets")
    sandwich = equal_mor(compose(compose(phi.mapping, f.mapping), psi.mapping),
                         f.mapping, cfg, check="sandwich")
    left = equal_mor(compose(f.mapping, psi.mapping), f.mapping, cfg,
                     check="post-policy-absorbed")
    right = equal_mor(compose(phi.mapping, f.mapping), f.mapping, cfg,
                      check="pre-policy-absorbed")
    agree = sandwich.passed == (left.passed and right.passed)
    agreement = (passing("sandwich-iff-pair") if agree else
                 failing("sandwich-iff-pair",
                         [{"sandwich": sandwich.passed,
                           "pair": left.passed and right.passed}]))
    return combine("compliance", [sandwich, left, right, agreement])


def check_consistency(f: MealyMachine, phi: Policy, psi: Policy,
                      config: CheckConfig | None = None) -> VerifyReport:
    """Interchange equation psi . f = f . phi.

    Also evaluates compliance and records that compliance forces this
    equation on the instance."""
    cfg = config or f.ctx.config
    if phi.alphabet != f.in_set or psi.alphabet != f.out_set:
        raise ShapeError("policies must sit on the machine's alphabets")
    inter = equal_mor(compose(f.mapping, psi.mapping),
                      compose(phi.mapping, f.mapping), cfg,
                      check="interchange")
    compliant = check_compliance(f, phi, psi, cfg).passed
    implied = (not compliant) or inter.passed
    implication = (passing("compliance-implies-consistency",
                           compliant=compliant)
                   if implied else
                   failing("compliance-implies-consistency",
                           [{"compliant": True, "consistent": False}]))
    return combine("consistency", [inter, implication], compliant=compliant)


def stateless_consistency(f0: Morphism, phi: Policy, psi: Policy,
                          config: CheckConfig | None = None) -> VerifyReport:
    """Component form of consistency for a stateless channel f0: A -> B.

    Checks the two pointwise equations against the policies' next/output
    components, and that the verdict agrees with the machine-form check."""
    ctx = phi.machine.ctx
    cfg = config or ctx.config
    if f0.dom != phi.alphabet or f0.cod != psi.alphabet:
        raise ShapeError("channel must map the one alphabet to the other")
    na, nb = f0.dom.card, f0.cod.card
    wit_state, wit_data = [], []
    for s in range(ctx.ns):
        for a in range(na):
            fa = f0(a)
            if psi.machine.next_state(s, fa) != phi.machine.next_state(s, a):
                wit_state.append({"s": s, "a": a,
                                  "lhs": psi.machine.next_state(s, fa),
                                  "rhs": phi.machine.next_state(s, a)})
            if psi.machine.output(s, fa) != f0(phi.machine.output(s, a)):
                wit_data.append({"s": s, "a": a,
                                 "lhs": psi.machine.output(s, fa),
                                 "rhs": f0(phi.machine.output(s, a))})
    subs = [
        passing("next-state-agrees") if not wit_state
        else failing("next-state-agrees", wit_state),
        passing("output-intertwines") if not wit_data
        else failing("output-intertwines", wit_data),
    ]
    lifted = MealyMachine(ctx=ctx, in_set=f0.dom, out_set=f0.cod,
                          mapping=prod_mor(ctx, f0))
    machine_level = check_consistency(lifted, phi, psi, cfg)
    agree = machine_level.passed == all(r.passed for r in subs)
    subs.append(passing("matches-machine-form") if agree
                else failing("matches-machine-form",
                             [{"component": all(r.passed for r in subs[:2]),
                               "machine": machine_level.passed}]))
    return combine("stateless-consistency", subs)


def mealy_to_moore(phi: Policy,
                   config: CheckConfig | None = None) -> MooreMachine:
    """Extract the public-pair Moore machine of a policy.

    States are the fixed pairs of the policy map; the readout returns the
    frozen state component and the step re-filters the held input at the
    new state.  Requires the splitting-through-carrier condition; the
    rejection diagnostic carries the cardinalities and any violated
    public-state equation of the naive construction."""
    ctx = phi.machine.ctx
    cfg = config or ctx.config
    k = make_karm_object(ctx, phi.alphabet, phi.mapping, cfg)
    lres = functor_l(k, cfg)  # raises ObjectConditionError with diagnostics
    na = phi.alphabet.card
    fixes = lres.fixed
    nb = len(fixes)
    state_set = lres.coalgebra.carrier
    index = {p: j for j, p in enumerate(fixes)}
    readout = Morphism(state_set, ctx.state_space,
                       table=[p // na for p in fixes])
    step_tab = []
    for p in fixes:
        a = p % na
        for t in range(ctx.ns):
            step_tab.append(index[phi.mapping(t * na + a)])
    # step is indexed (b, t) with t minor, matching Prod(B, S) ranks
    step = Morphism(Prod(state_set, ctx.state_space), state_set,
                    table=step_tab)
    m = MooreMachine(ctx=ctx, state_set=state_set, readout=readout, step=step,
                     pair_labels=tuple((p // na, p % na) for p in fixes))
    rep = check_moore(m)
    if not rep.passed:
        raise AssertionError(f"public-pair machine broke its laws: "
                             f"{rep.to_dict()}")
    mismatch = equal_mor(moore_to_coalgebra(m).structure,
                         lres.coalgebra.structure, cfg)
    if not mismatch.passed:
        raise AssertionError("component form diverged from the splitting form")
    return m


def stateful_policy_check(g: MealyMachine, phi: Morphism, psi: Morphism,
                          config: CheckConfig | None = None) -> VerifyReport:
    """Consistency of a stateful database with behavior-level policies.

    phi and psi are idempotent filters on whole behaviors TA and TB; the
    database g: S x A -> S x B is consistent when its behavior transport
    interchanges them.  Sampled above the cap."""
    ctx = g.ctx
    cfg = config or ctx.config
    ta, tb = t_obj(ctx, g.in_set), t_obj(ctx, g.out_set)
    if phi.dom != ta or phi.cod != ta or psi.dom != tb or psi.cod != tb:
        raise ShapeError("policies must sit on the behavior objects")
    subs = [
        equal_mor(compose(phi, phi), phi, cfg, check="input-filter-idempotent"),
        equal_mor(compose(psi, psi), psi, cfg, check="output-filter-idempotent"),
    ]
    lifted = exp_mor(ctx, g.mapping)
    subs.append(equal_mor(compose(phi, lifted), compose(lifted, psi), cfg,
                          check="behavior-interchange"))
    return combine("stateful-policy-check", subs,
                   note="filters act on whole stateful behaviors")

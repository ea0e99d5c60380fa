import pytest

from finkar.finset import Atom, Morphism, Prod
from finkar.policy import MealyMachine, MooreMachine, Policy
from finkar.statemonad import StateContext


@pytest.fixture
def ctx2():
    """|S| = 2 state context with default knobs."""
    return StateContext(Atom("S", 2))


@pytest.fixture
def ctx1():
    return StateContext(Atom("S", 1))


@pytest.fixture
def e1_moore(ctx2):
    """Two public states reading out the two states; steps follow the letter."""
    b = Atom("B", 2)
    readout = Morphism(b, ctx2.state_space, table=[0, 1])
    step = Morphism(Prod(b, ctx2.state_space), b, table=[0, 1, 0, 1])
    return MooreMachine(ctx=ctx2, state_set=b, readout=readout, step=step)


@pytest.fixture
def e2_policy(ctx2):
    """The 8-element projector induced by the e1 machine."""
    g = Atom("G", 4)
    table = [2, 6, 2, 6, 2, 2, 6, 6]
    mapping = Morphism(Prod(ctx2.state_space, g), Prod(ctx2.state_space, g),
                       table=table)
    machine = MealyMachine(ctx=ctx2, in_set=g, out_set=g, mapping=mapping)
    return Policy(machine=machine)

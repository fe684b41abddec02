import pytest

from smallcancel.words import Context, FactorSpec, free_factor


def z2_factor(name="A", gen_name="a"):
    return FactorSpec(
        name=name, kind="finite", element_names=("1", gen_name),
        table=((0, 1), (1, 0)), generating_set=(1,),
    )


def z3_factor(name="B", gen_name="b"):
    return FactorSpec(
        name=name, kind="finite", element_names=("1", gen_name, gen_name + "2"),
        table=((0, 1, 2), (1, 2, 0), (2, 0, 1)), generating_set=(1, 2),
    )


def zn_factor(name, n, gen_name="b", generators=None):
    names = tuple("1" if k == 0 else (gen_name if k == 1 else f"{gen_name}{k}") for k in range(n))
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    gens = tuple(sorted(generators)) if generators else (1, n - 1)
    return FactorSpec(name=name, kind="finite", element_names=names, table=table, generating_set=gens)


@pytest.fixture
def z2z3():
    """Z/2 * Z/3 with generating sets {a}, {b, b2}."""
    return Context(z2_factor(), z3_factor())


@pytest.fixture
def fxfy():
    """F(x) * F(y)."""
    return Context(free_factor("A", ["x"]), free_factor("B", ["y"]))


@pytest.fixture
def ladder_ctx():
    """F(a) * F(b1, b2)."""
    return Context(free_factor("A", ["a"]), free_factor("B", ["b1", "b2"]))


def ab7_relator(ctx):
    return ctx.parse_word(" ".join(["A.a B.b"] * 7))


def ladder_relator(ctx):
    """(a b1) a b2 (a b1)^2 a b2 ... (a b1)^12 a b2."""
    toks = []
    for i in range(1, 13):
        toks.extend(["A.a B.b1"] * i)
        toks.append("A.a B.b2")
    return ctx.parse_word(" ".join(toks))

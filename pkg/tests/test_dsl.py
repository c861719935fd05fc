import random
from pathlib import Path

import pytest

from lenode import algebra as alg
from lenode.dsl import Call, DSLError, FnDecl, LLODEDecl, Param, format_program, parse_expr, parse_program
from lenode.dyadic import Dyadic
from lenode.llode import solve_iterative
from lenode.cli import compile_tm_program
from lenode.machine import load_fixture
from lenode.sgpoly import Div2, IntConst, SgnBar, Var, build_if, const, eval_expr

BASICS = (Path(__file__).parent.parent / "demos" / "programs" / "basics.ldl").read_text()


def test_expression_forms():
    env = {"x": Dyadic(3), "y": Dyadic(1, 1)}
    cases = {
        "x * x - 2": Dyadic(7),
        "-x + 1": Dyadic(-2),
        "half(x)": Dyadic(3, 1),
        "sgb(y)": Dyadic(1, 1),
        "13/2^3": Dyadic(13, 3),
        "5.5": Dyadic(11, 1),
        "if(x; 1; 2)": Dyadic(1),
        "if(y - 1; 1; 2)": Dyadic(2),
    }
    for src, want in cases.items():
        assert eval_expr(parse_expr(src), env) == want, src


def test_call_syntax():
    e = parse_expr("geo[1](x) + f(x, 2)")
    assert Call("geo", (Var("x"),), 1) == e.left
    assert e.right.args[1] == IntConst(2)


def test_basics_program():
    prog = parse_program(BASICS)
    for name in prog.names():
        if name != "square":
            prog.term(name)
    with pytest.raises(DSLError):
        prog.term("square")
    assert alg.eval_exact(prog.term("pow2"), [7]) == [8]
    assert alg.eval_exact(prog.term("length"), [37]) == [6]
    assert alg.eval_exact(prog.term("mix"), [3, Dyadic(11, 1)]) == [Dyadic(57, 3)]
    v = alg.eval_approx(prog.term("third"), [], 12)[0]
    assert abs(v.to_fraction() * 3 - 1) <= 3 * 2**-12


def test_llode_with_h():
    prog = parse_program(
        "fn twice(x:N, y:N) -> N = 2 * y\n"
        "llode acc(x:N, y:N) -> R { vars: f; init: y; wrt len(x): h0; h: twice }\n"
    )
    sys, _ = prog.llode_system(prog.decl("acc"))
    assert alg.eval_exact(prog.term("acc"), [7, 5]) == [5 + 3 * 10]
    assert sys.hvars


@pytest.mark.parametrize(
    "src,line",
    [
        ("fn f(x:N) -> N = x +\n", 1),
        ("fn f(x:N) -> N = x\nfn f(y:N) -> N = y\n", 2),
        ("\n\nfn g(x:N) -> Z = half(x)\n", 3),
        ("fn f(x:N) -> N = g(x)\nfn g(x:N) -> N = f(x)\n", None),
        ("llode F(x:N) -> R { vars: f; init: 0; wrt len(x): f*f }\n", 1),
    ],
)
def test_errors(src, line):
    with pytest.raises(DSLError) as info:
        parse_program(src).check()
    if line is not None:
        assert info.value.line == line


def test_unknown_name():
    with pytest.raises(DSLError):
        parse_program(BASICS).term("missing")


# round trip ------------------------------------------------------------------------------


def random_expr(rng, names, depth=3):
    if depth == 0 or rng.random() < 0.25:
        if names and rng.random() < 0.6:
            return Var(rng.choice(names))
        return const(Dyadic(rng.randint(-20, 20), rng.randint(0, 3)))
    k = rng.randrange(6)
    a = random_expr(rng, names, depth - 1)
    if k == 3:
        return SgnBar(a)
    if k == 4:
        return Div2(a)
    b = random_expr(rng, names, depth - 1)
    if k == 5:
        return build_if(a, b, random_expr(rng, names, depth - 1))
    return (a + b, a - b, a * b)[k]


def random_program(rng):
    decls = []
    for i in range(rng.randint(1, 4)):
        params = tuple(Param(f"p{j}", alg.R) for j in range(rng.randint(1, 3)))
        names = [p.name for p in params]
        body = random_expr(rng, names)
        if decls and rng.random() < 0.5:
            prev = rng.choice([d for d in decls if isinstance(d, FnDecl)])
            body = body + Call(prev.name, tuple(random_expr(rng, names, 1) for _ in prev.params))
        decls.append(FnDecl(f"f{i}", params, alg.R, body))
    if rng.random() < 0.5:
        dim = rng.randint(1, 2)
        vs = tuple(f"v{j}" for j in range(dim))
        rhs = tuple(const(Dyadic(rng.randint(-4, 4), 1)) * Var(rng.choice(vs)) + random_expr(rng, ["x"], 2) for _ in vs)
        decls.append(
            LLODEDecl("F", (Param("x", alg.N),), alg.R, vs, tuple(const(rng.randint(0, 3)) for _ in vs), "x", rhs)
        )
    return decls


def test_round_trip_random_programs():
    rng = random.Random(2024)
    for _ in range(50):
        decls = random_program(rng)
        text = format_program(decls, "# generated")
        prog = parse_program(text)
        assert format_program(prog.decls, "# generated") == text
        prog.check()
        for d in decls:
            arity = len(d.params)
            args = [rng.randint(0, 9) if isinstance(d, LLODEDecl) else Dyadic(rng.randint(-9, 9), 1) for _ in range(arity)]
            assert alg.eval_exact(prog.term(d.name), args) == alg.eval_exact(parse_program(text).term(d.name), args)
            if isinstance(d, FnDecl) and not any(isinstance(n, Call) for n in _walk(d.body)):
                env = {p.name: a for p, a in zip(d.params, args)}
                assert alg.eval_exact(prog.term(d.name), args) == [eval_expr(d.body, env)]


def _walk(e):
    yield e
    for f in ("left", "right", "arg"):
        if hasattr(e, f):
            yield from _walk(getattr(e, f))
    for a in getattr(e, "args", ()):
        yield from _walk(a)


def test_compiled_machine_program_reparses():
    spec = load_fixture("scanner")
    prog = parse_program(compile_tm_program(spec))
    prog.check()
    sys, _ = prog.llode_system(prog.decl("exec"))
    start = [Dyadic(0), Dyadic(0), Dyadic(7, 4)]
    assert solve_iterative(sys, 8, start)[:3] == [Dyadic(2), Dyadic(1, 2), Dyadic(1, 2)]

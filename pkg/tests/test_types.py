import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import canonical_type, derivable_subtypes, to_arity, universe
from streamlang import kinds as K
from streamlang import syntax as ast
from streamlang.errors import ConstraintViolation, OccursCheck, TypeMismatch, UnboundVariable
from streamlang.infer import check_program, default_env, infer
from streamlang.kinds import ContentKind, arity_subtype, kind_of, kind_subtype, nat
from streamlang.parser import parse_text
from streamlang.types import (
    INT, Scheme, Subst, TList, TSource, TVar, _Fail, free_vars, render, scheme_of,
)

# documented signatures of five library operators
DOCUMENTED = {
    "swap": "(source(2,0,0)) -> source(2,0,0)",
    "on_metadata": "(handler,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)",
    "echo": "(delay:float,source('#a,0,0)) -> source('#a,0,0)",
    "greyscale": "(source('*a,'*b+1,'*c)) -> source('*a,'*b+1,'*c)",
    "output.file": "(format('*a,'*b,'*c),string,source('*a,'*b,'*c))-> source('*a,'*b,'*c)",
}

ground = st.builds(nat, st.integers(0, 4), st.sampled_from([K.ZERO, K.STAR]))


def check(text, **free):
    env = default_env()
    env.update({k: Scheme((), v) for k, v in free.items()})
    return check_program(parse_text(text), env)


# arities


def test_subtype_table_matches_rule_search():
    facts = derivable_subtypes(4)
    u = universe(4)
    assert len(u) ** 2 == 100
    for a in u:
        for b in u:
            assert arity_subtype(to_arity(a), to_arity(b)) == ((a, b) in facts), (a, b)


def test_zero_below_star():
    assert arity_subtype(K.ZERO, K.STAR)


def test_succ_not_below_zero():
    assert not arity_subtype(nat(1), K.ZERO)


@given(ground)
def test_subtype_reflexive(a):
    assert arity_subtype(a, a)


@given(ground, ground, ground)
def test_subtype_transitive(a, b, c):
    if arity_subtype(a, b) and arity_subtype(b, c):
        assert arity_subtype(a, c)


@given(ground, ground)
def test_subtype_antisymmetric(a, b):
    if arity_subtype(a, b) and arity_subtype(b, a):
        assert a == b


def test_kind_subtype_examples():
    at_least_one_video = ContentKind(nat(2), nat(1, K.STAR), K.STAR)
    assert kind_subtype(kind_of(2, 1, 0), at_least_one_video)
    assert not kind_subtype(kind_of(1, 0, 0), at_least_one_video)


def test_kind_subtype_reflexive_depth3():
    for k in K.all_ground_kinds(3):
        assert kind_subtype(k, k)


# unification


def test_unify_binds_kind_variables():
    s = Subst()
    k = s.fresh_kind()
    s.unify(TSource(kind_of(2)), TSource(k))
    assert s.kind(k) == kind_of(2, 0, 0)


def test_fixed_variable_rejects_star():
    s = Subst()
    fixed = ContentKind(s.fresh_arity(fixed=True), K.ZERO, K.ZERO)
    with pytest.raises(_Fail) as e:
        s.unify(TSource(fixed), TSource(ContentKind(K.STAR, K.ZERO, K.ZERO)))
    assert e.value.error_type is ConstraintViolation


def test_occurs_check():
    s = Subst()
    a = s.fresh()
    with pytest.raises(_Fail) as e:
        s.unify(a, TList(a))
    assert e.value.error_type is OccursCheck


def test_fixed_constraint_propagates_to_unconstrained_variable():
    s = Subst()
    fixed, free = s.fresh_arity(fixed=True), s.fresh_arity()
    s.unify_arity(fixed, free)
    with pytest.raises(_Fail):
        s.unify_arity(free, K.STAR)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.booleans(), ground), min_size=1, max_size=6))
def test_fixed_variables_never_bound_to_star(bindings):
    s = Subst()
    for fixed, a in bindings:
        v = s.fresh_arity(fixed=fixed)
        try:
            s.unify_arity(v, a)
        except _Fail:
            continue
        resolved = s.arity(v)
        if fixed:
            assert not isinstance(K.split(resolved)[1], K.Star)


# inference


@pytest.mark.parametrize("name", sorted(DOCUMENTED))
def test_operator_types_render_as_documented(name):
    rendered = infer(ast.Var(name)).render(optional=False)
    assert canonical_type(rendered) == canonical_type(DOCUMENTED[name])


def test_identity():
    assert infer(parse_text("fun (x) -> x")).render() == "('a) -> 'a"


def test_mono_format_forces_mono_source():
    s = TVar(10**9)
    result = check('o = output.file(%wav(mono), "f.wav", s) o', s=s)
    assert result.render(s) == "source(1,0,0)"


def test_transition_script_types():
    text = """
def crossfade(old,new) =
  add([fade.initial(duration=2.,new),fade.final(duration=3.,old)])
end
t = [crossfade,crossfade]
f = fallback(track_sensitive=false,transitions=t,[r,s])
"""
    s = Subst()
    r_kind, s_kind = s.fresh_kind(), s.fresh_kind()
    env = default_env()
    env["r"] = Scheme((), TSource(ContentKind(r_kind.audio, K.ZERO, K.ZERO)))
    env["s"] = Scheme((), TSource(ContentKind(s_kind.audio, K.ZERO, K.ZERO)))
    result = check_program(parse_text(text), env, s)
    lines = dict(line.split(" : ", 1) for line in result.render_bindings())
    assert canonical_type(lines["f"]) == canonical_type("source('*a,0,0)")


def test_swap_into_mono_is_rejected():
    with pytest.raises(TypeMismatch) as e:
        check('output.file(%wav(mono), "f.wav", swap(blank()))')
    assert "source(2,0,0)" in str(e.value) and "source(1,0,0)" in str(e.value)


def test_echo_rejects_star_audio():
    env = default_env()
    env["s"] = Scheme((), TSource(ContentKind(K.STAR, K.ZERO, K.ZERO)))
    with pytest.raises(ConstraintViolation):
        check_program(parse_text("echo(delay=1., s)"), env)


def test_greyscale_needs_video():
    with pytest.raises(TypeMismatch):
        check('output.file(%wav(mono), "f.wav", greyscale(sine()))')


def test_greyscale_accepts_raw_video():
    check('output.file(%raw(audio=0,video=1), "f.raw", greyscale(blank()))')


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        check("missing")


def test_missing_argument():
    with pytest.raises(TypeMismatch):
        check("amplify(blank())")


def test_unknown_label():
    with pytest.raises(TypeMismatch):
        check("sine(pitch=1.)")


def test_value_restriction():
    # a generalized identity can be used at two types; a non-value binding is monomorphic
    check('def id(x) = x end a = id(1) b = id("s") b')
    with pytest.raises(TypeMismatch):
        check('def id(x) = x end f = id(id) a = f(1) b = f("s") b')


def test_optional_params_are_inferred():
    result = check("def f(~gain=1.,s) = amplify(gain,s) end f")
    assert result.render_bindings() == [
        "f : (?gain:float,source('*a,'*b,'*c)) -> source('*a,'*b,'*c)"
    ]


def test_partial_application_is_rejected():
    with pytest.raises(TypeMismatch):
        check("def f(x,y) = add([x,y]) end g = f(sine()) g")


def test_inference_is_deterministic():
    text = "def f(x,y) = add([x,y]) end h = fun (a) -> fst(a) f"
    assert check(text).render_bindings() == check(text).render_bindings()


def test_depth_limit():
    s = Subst()
    v = s.fresh_arity()
    with pytest.raises(_Fail):
        s.unify_arity(v, nat(K.MAX_DEPTH + 1))


def test_scheme_renders_quantified_variables():
    sch = scheme_of("('a*'b) -> 'a")
    assert render(sch.body) == "('a*'b) -> 'a"
    assert len(list(free_vars(sch.body))) >= 2
    assert INT != sch.body

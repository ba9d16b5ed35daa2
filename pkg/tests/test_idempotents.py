"""Idempotent taxonomy, characterizations, Blackwell splitting,
exhaustive search, Cauchy-Schwarz instances."""

from fractions import Fraction

import pytest

from finmarkov import (
    Kind,
    NoSplitUpTo,
    NotASplitting,
    NotEndo,
    NotIdempotent,
    SizeLimitExceeded,
    abs_cont,
    ase_kernels,
    balanced_cross_check,
    blackwell_split,
    cauchy_schwarz,
    classify,
    compose,
    copy_kernel,
    delta_kernel,
    fin_object,
    identity,
    is_deterministic,
    kernel_equal,
    make_kernel,
    marginalize,
    multi_kernel,
    perturb_off_support,
    random_class_idempotent,
    search_split,
    split_support,
    support,
    tensor,
    two_step,
    verify_split,
)
from finmarkov.golden import (
    balanced_idempotent,
    balanced_split,
    multi_chain3_idempotent,
    multi_upset_idempotent,
    signed_idempotent,
    static_idempotent,
    static_split,
    strong_idempotent,
    strong_split,
)
from finmarkov.kernel import UNIT, support_indices
from finmarkov.rand import random_kernel, random_kernel_supported_on, random_object, rng_from_seed

F = Fraction


# ---------------------------------------------------------------------------
# two-step chain
# ---------------------------------------------------------------------------


def test_two_step_uniform_mixing():
    e = strong_idempotent()
    ts = two_step(e)
    assert all(v == F(1, 4) for row in ts.matrix for v in row)


def test_two_step_identity_is_copy():
    x = fin_object(("a", "b", "c"))
    assert kernel_equal(two_step(identity(x)), copy_kernel(x))


def test_two_step_marginals():
    for e in (strong_idempotent(), static_idempotent(), balanced_idempotent()):
        ts = two_step(e)
        assert kernel_equal(marginalize(ts, e.dom.size, "right"), e)
        assert kernel_equal(marginalize(ts, e.dom.size, "left"), compose(e, e))


def test_two_step_requires_endo():
    f = delta_kernel(fin_object(("a", "b")), "a")
    with pytest.raises(NotEndo):
        two_step(f)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def test_classify_strong_example():
    r = classify(strong_idempotent())
    assert (r.idempotent, r.static, r.strong, r.balanced) == (True, False, True, True)
    assert not r.deterministic


def test_classify_static_example():
    r = classify(static_idempotent())
    assert (r.idempotent, r.static, r.strong, r.balanced) == (True, True, False, True)


def test_classify_balanced_example():
    r = classify(balanced_idempotent())
    assert (r.idempotent, r.static, r.strong, r.balanced) == (True, False, False, True)


def test_classify_identity():
    x = fin_object(("a", "b"))
    r = classify(identity(x))
    assert r.deterministic and r.static and r.strong and r.balanced


def test_classify_non_idempotent_all_false():
    x = fin_object(("a", "b"))
    rot = make_kernel(Kind.STOCH, x, x, [[0, 1], [1, 0]])
    r = classify(rot)
    assert not r.idempotent
    assert not (r.deterministic or r.static or r.strong or r.balanced)
    assert r.witnesses["idempotent"] == ("a", "a")


def test_classify_multi_upset_witness():
    r = classify(multi_upset_idempotent())
    assert r.idempotent and not r.balanced
    assert r.witnesses["balanced"] == ("0", "0", "1")


def test_classify_signed_witness():
    r = classify(signed_idempotent())
    assert r.idempotent and not r.balanced
    assert r.witnesses["balanced"] == ("a", "a", "b")


def test_classify_chain3():
    r = classify(multi_chain3_idempotent())
    assert r.idempotent and not r.balanced


# ---------------------------------------------------------------------------
# alternative characterizations of balance
# ---------------------------------------------------------------------------


def test_cross_check_on_golden_examples():
    for e in (strong_idempotent(), static_idempotent(), balanced_idempotent()):
        cc = balanced_cross_check(e)
        assert cc.all() == (True, True, True, True)


def test_cross_check_multi_and_signed_all_false():
    for e in (multi_upset_idempotent(), signed_idempotent(), multi_chain3_idempotent()):
        cc = balanced_cross_check(e)
        assert cc.all() == (False, False, False, False)


def test_cross_check_requires_idempotent():
    x = fin_object(("a", "b"))
    rot = make_kernel(Kind.STOCH, x, x, [[0, 1], [1, 0]])
    with pytest.raises(NotIdempotent):
        balanced_cross_check(rot)


def test_cross_check_agrees_on_random_idempotents():
    rng = rng_from_seed(5)
    for _ in range(60):
        x = random_object(rng, 6, "s")
        e = random_class_idempotent(rng, x).idempotent
        cc = balanced_cross_check(e)
        assert len(set(cc.all())) == 1
        assert cc.defining == classify(e).balanced


def test_static_flag_matches_almost_sure_determinism():
    # an idempotent is static iff it is deterministic almost surely
    # w.r.t. itself
    examples = [strong_idempotent(), static_idempotent(), balanced_idempotent()]
    rng = rng_from_seed(6)
    for _ in range(30):
        examples.append(random_class_idempotent(rng, random_object(rng, 5, "s")).idempotent)
    for e in examples:
        cop = copy_kernel(e.dom)
        as_det = ase_kernels(e, compose(cop, e), compose(tensor(e, e), cop))
        assert classify(e).static == as_det


def test_static_idempotent_fixes_dominated_kernels():
    rng = rng_from_seed(7)
    e = static_idempotent()
    for _ in range(30):
        a = random_object(rng, 3, "a")
        p = random_kernel_supported_on(rng, Kind.STOCH, a, e.cod, list(support_indices(e)))
        assert abs_cont(e, p)
        assert kernel_equal(compose(e, p), p)


# ---------------------------------------------------------------------------
# Blackwell splitting
# ---------------------------------------------------------------------------


def test_blackwell_split_matches_printed_data():
    cases = [
        (strong_idempotent(), strong_split(), [("0", "1")], ()),
        (static_idempotent(), static_split(), [("1",), ("2",)], ("3",)),
        (balanced_idempotent(), balanced_split(), [("1", "2"), ("3",)], ("4",)),
    ]
    for e, (iota, pi), classes, transient in cases:
        sd = blackwell_split(e)
        assert sd.inclusion.matrix == iota.matrix
        assert sd.projection.matrix == pi.matrix
        assert [tuple(c) for c in sd.classes] == classes
        assert sd.transient == transient
        assert kernel_equal(compose(sd.projection, sd.inclusion), identity(sd.middle))
        assert kernel_equal(compose(sd.inclusion, sd.projection), e)


def test_blackwell_split_middle_labels():
    sd = blackwell_split(balanced_idempotent())
    assert sd.middle.labels == ("C_1", "C_3")


def test_blackwell_split_rejects_non_idempotent():
    x = fin_object(("a", "b"))
    rot = make_kernel(Kind.STOCH, x, x, [[0, 1], [1, 0]])
    with pytest.raises(NotIdempotent):
        blackwell_split(rot)


def test_blackwell_split_recovers_generated_classes():
    rng = rng_from_seed(11)
    for _ in range(100):
        x = random_object(rng, 8, "s")
        gen = random_class_idempotent(rng, x)
        e = gen.idempotent
        assert kernel_equal(compose(e, e), e)
        sd = blackwell_split(e)
        assert kernel_equal(compose(sd.inclusion, sd.projection), e)
        assert set(map(frozenset, sd.classes)) == set(map(frozenset, gen.classes))
        assert set(sd.transient) == set(gen.transient)


def test_split_determinism_matches_flags():
    for e in (strong_idempotent(), static_idempotent(), balanced_idempotent()):
        sd = blackwell_split(e)
        r = classify(e)
        assert is_deterministic(sd.inclusion) == r.static
        assert is_deterministic(sd.projection) == r.strong


def test_static_split_is_support_structure():
    # for a static stochastic idempotent the splitting inclusion is the
    # support inclusion and the projection retracts it
    e = static_idempotent()
    sd = blackwell_split(e)
    supp = support(e)
    assert sd.inclusion.matrix == supp.inclusion.matrix
    assert kernel_equal(
        compose(sd.projection, sd.inclusion), identity(sd.middle)
    )
    split = split_support(e)
    assert split.projection is not None


def test_split_support_idempotent_transfer():
    # e := ι∘π for a split support satisfies e∘p = p and transfers
    # almost-sure equality
    rng = rng_from_seed(13)
    for _ in range(30):
        x = random_object(rng, 4, "x")
        p = random_kernel(rng, Kind.STOCH, random_object(rng, 2, "a"), x)
        sd = split_support(p)
        e = compose(sd.inclusion, sd.projection)
        assert kernel_equal(compose(e, p), p)
        y = random_object(rng, 3, "y")
        f = random_kernel(rng, Kind.STOCH, x, y)
        g = perturb_off_support(f, p, seed=rng.randrange(2**30))
        assert ase_kernels(p, f, g)
        assert ase_kernels(e, f, g)


# ---------------------------------------------------------------------------
# exhaustive splitting search
# ---------------------------------------------------------------------------


def test_multi_upset_has_no_small_splitting():
    result = search_split(multi_upset_idempotent(), 2)
    assert isinstance(result, NoSplitUpTo) and result.max_size == 2


def test_multi_identity_splits_trivially():
    # the enumeration finds the identity pair itself first
    x = fin_object(("0", "1"))
    result = search_split(identity(x, Kind.MULTI), 2)
    assert not isinstance(result, NoSplitUpTo)
    assert result.middle.size == 2
    assert result.projection.matrix == identity(x, Kind.MULTI).matrix
    assert result.inclusion.matrix == identity(x, Kind.MULTI).matrix
    assert kernel_equal(compose(result.inclusion, result.projection), identity(x, Kind.MULTI))


def test_multi_full_image_splits_through_point():
    x = fin_object(("0", "1"))
    e = multi_kernel(x, x, [["0", "1"], ["0", "1"]])
    result = search_split(e, 2)
    assert not isinstance(result, NoSplitUpTo)
    assert result.middle.size == 1


def test_search_split_stoch_over_grid():
    grid = [F(0), F(1, 2), F(1)]
    e = strong_idempotent()
    result = search_split(e, 1, entry_grid=grid)
    assert not isinstance(result, NoSplitUpTo)
    assert kernel_equal(compose(result.inclusion, result.projection), e)


def test_search_split_candidate_bound():
    x = fin_object(tuple(str(i) for i in range(6)))
    e = identity(x, Kind.MULTI)
    with pytest.raises(SizeLimitExceeded):
        search_split(e, 6, candidate_bound=1000)


# ---------------------------------------------------------------------------
# splitting verification
# ---------------------------------------------------------------------------


def test_verify_split_on_golden_data():
    cases = [
        (strong_idempotent(), strong_split()),
        (static_idempotent(), static_split()),
        (balanced_idempotent(), balanced_split()),
    ]
    for e, (iota, pi) in cases:
        report, ok = verify_split(e, iota, pi)
        assert ok and report.idempotent


def test_verify_split_swapped_arguments_rejected():
    e = static_idempotent()
    iota, pi = static_split()
    with pytest.raises((NotASplitting, Exception)):
        verify_split(e, pi, iota)


def test_verify_split_on_generated():
    rng = rng_from_seed(17)
    for _ in range(40):
        x = random_object(rng, 6, "s")
        gen = random_class_idempotent(rng, x)
        report, ok = verify_split(gen.idempotent, gen.iota, gen.pi)
        assert ok and report.balanced


# ---------------------------------------------------------------------------
# flag lattice and balance of stochastic idempotents
# ---------------------------------------------------------------------------


def _all_multi_idempotents(n):
    from finmarkov.kernel import all_multi_kernels

    x = fin_object(tuple(str(i) for i in range(n)))
    for k in all_multi_kernels(x, x):
        if kernel_equal(compose(k, k), k):
            yield k


def test_flag_lattice_exhaustive_small_multi():
    for e in _all_multi_idempotents(2):
        r = classify(e)
        assert not r.static or r.balanced
        assert not r.strong or r.balanced
        assert not (r.static and r.strong) or r.deterministic


def test_flag_lattice_random_generated():
    rng = rng_from_seed(19)
    for _ in range(100):
        x = random_object(rng, 8, "s")
        r = classify(random_class_idempotent(rng, x).idempotent)
        assert r.balanced
        assert not r.static or r.balanced
        assert not r.strong or r.balanced
        assert not (r.static and r.strong) or r.deterministic


def test_every_generated_stochastic_idempotent_is_balanced():
    rng = rng_from_seed(23)
    for _ in range(200):
        x = random_object(rng, 8, "s")
        e = random_class_idempotent(rng, x).idempotent
        assert classify(e).balanced


# ---------------------------------------------------------------------------
# Cauchy-Schwarz
# ---------------------------------------------------------------------------


def test_cs_idempotent_specialization_matches_balance():
    examples = [strong_idempotent(), static_idempotent(), balanced_idempotent()]
    rng = rng_from_seed(29)
    for _ in range(40):
        examples.append(random_class_idempotent(rng, random_object(rng, 5, "s")).idempotent)
    for e in examples:
        inst = cauchy_schwarz(e, e, e)
        assert inst.antecedent
        assert inst.consequent == classify(e).balanced
        assert inst.implication_ok


def test_cs_multi_counterexample():
    e = multi_upset_idempotent()
    inst = cauchy_schwarz(e, e, e)
    assert inst.antecedent and not inst.consequent and not inst.implication_ok


def test_cs_random_stochastic_triples_never_fail():
    rng = rng_from_seed(31)
    for _ in range(300):
        a, b, x, y = (random_object(rng, 4, c) for c in "abxy")
        f = random_kernel(rng, Kind.STOCH, a, b)
        g = random_kernel(rng, Kind.STOCH, b, x)
        h = random_kernel(rng, Kind.STOCH, x, y)
        assert cauchy_schwarz(f, g, h).implication_ok


def test_cs_state_form():
    # with a unit first leg the antecedent is the factorization of the
    # paired output and the consequent is almost-sure constancy
    x = fin_object(("0", "1"))
    g = make_kernel(Kind.STOCH, UNIT, x, [[F(1, 2)], [F(1, 2)]])
    h_const = make_kernel(Kind.STOCH, x, x, [[F(1, 3), F(1, 3)], [F(2, 3), F(2, 3)]])
    inst = cauchy_schwarz(identity(UNIT), g, h_const)
    assert inst.antecedent and inst.consequent
    h_var = make_kernel(Kind.STOCH, x, x, [[1, 0], [0, 1]])
    inst2 = cauchy_schwarz(identity(UNIT), g, h_var)
    assert not inst2.antecedent and not inst2.consequent
    assert inst2.implication_ok


def test_blackwell_split_multi_unsupported():
    from finmarkov import UnsupportedKind

    with pytest.raises(UnsupportedKind):
        blackwell_split(multi_upset_idempotent())


def test_search_split_signed_unsupported():
    from finmarkov import UnsupportedKind

    with pytest.raises(UnsupportedKind):
        search_split(signed_idempotent(), 2)


def test_search_split_stoch_without_grid_rejected():
    with pytest.raises(ValueError):
        search_split(strong_idempotent(), 1)

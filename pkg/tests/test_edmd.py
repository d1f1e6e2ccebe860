import numpy as np
import pytest

from koopcontrol import (
    Dictionary,
    DomainError,
    DomainMismatchError,
    ExhaustiveFinite,
    GridOnBox,
    InputSequence,
    TrainingSet,
    UniformRandom,
    apply,
    collect_data,
    dictionary_for,
    export_model_json,
    export_training_csv,
    fit_kcf,
    import_model_json,
    import_training_csv,
    indicator_dictionary,
    k_u,
    kcf_word,
    monomial_dictionary,
    predict,
    prediction_error,
    simulate,
    to_matrix,
)

# lifted scalarlinear dynamics on the dictionary [1, x, x^2]:
# x -> l*x sends the lift to diag(1, l, l^2) times the lift
DIAG_A = np.diag([1.0, 0.5, 0.25])
DIAG_B = np.diag([1.0, -0.8, 0.64])


def test_monomial_dictionary_lift():
    d = monomial_dictionary(1, 2)
    assert d.dim == 3
    assert np.allclose(d.lift(np.array([0.5])), [1.0, 0.5, 0.25])


def test_monomial_dictionary_orders_by_total_degree():
    d = monomial_dictionary(2, 2)
    # degree 0, then the two linear terms, then the three quadratics
    assert d.dim == 6
    z = d.lift(np.array([2.0, 3.0]))
    assert z[0] == 1.0
    assert set(np.round(z[1:3].real, 6)) == {2.0, 3.0}


def test_indicator_dictionary_is_one_hot(f3):
    d = indicator_dictionary(f3)
    assert d.dim == 3
    assert np.array_equal(d.lift(1), np.array([0, 1, 0], complex))


def test_dictionary_for_specs(f3, sl):
    assert dictionary_for(f3, "indicator").dim == 3
    assert dictionary_for(sl, "monomial:3").dim == 4
    with pytest.raises(DomainError):
        dictionary_for(sl, "wavelet:2")


def test_collect_data_exhaustive(f3):
    data = collect_data(f3, ExhaustiveFinite())
    assert len(data.triples) == 6
    assert data.input_labels == ("a", "b")
    for x, u, y in data.triples:
        assert y == ((x + 1) % 3 if u == "a" else (2 * x) % 3)


def test_collect_data_uniform_is_seeded(sl):
    one = collect_data(sl, UniformRandom(20, seed=4))
    two = collect_data(sl, UniformRandom(20, seed=4))
    for (x1, u1, y1), (x2, u2, y2) in zip(one.triples, two.triples):
        assert u1 == u2 and np.array_equal(x1, x2) and np.array_equal(y1, y2)


def test_collect_data_grid(sl):
    data = collect_data(sl, GridOnBox(5))
    assert len(data.triples) == 5 * 2  # 5 grid points, both inputs each


def test_collect_data_cycles_inputs_when_not_per_input(sl):
    data = collect_data(sl, UniformRandom(6, seed=0), per_input=False)
    assert [u for _, u, _ in data.triples] == ["a", "b", "a", "b", "a", "b"]


def test_fit_recovers_scalarlinear_diagonals(sl):
    d = monomial_dictionary(1, 2)
    model, report = fit_kcf(d, collect_data(sl, UniformRandom(300, seed=8)))
    assert np.allclose(model.matrices["a"], DIAG_A, atol=1e-8)
    assert np.allclose(model.matrices["b"], DIAG_B, atol=1e-8)
    assert all(res < 1e-16 for res in report.residuals.values())
    assert not any(report.rank_deficient.values())


def test_fit_on_finite_indicators_matches_operator_matrices(f3):
    d = indicator_dictionary(f3)
    model, report = fit_kcf(d, collect_data(f3, ExhaustiveFinite()))
    for u in ("a", "b"):
        expected = to_matrix(k_u(f3, u), f3).entries.T
        assert np.allclose(model.matrices[u], expected, atol=1e-10)
    assert all(res < 1e-20 for res in report.residuals.values())


def test_residual_is_attained_objective(lg):
    d = monomial_dictionary(1, 2)
    data = collect_data(lg, UniformRandom(100, seed=5))
    model, report = fit_kcf(d, data)
    for u, pairs in data.per_input().items():
        phi0 = np.column_stack([d.lift(x) for x, _ in pairs])
        phi1 = np.column_stack([d.lift(y) for _, y in pairs])
        manual = np.sum(np.abs(phi1 - model.matrices[u] @ phi0) ** 2) / len(pairs)
        assert report.residuals[u] == pytest.approx(manual, rel=1e-12)


def test_refit_on_own_output_is_stable(sl):
    d = monomial_dictionary(1, 2)
    data = collect_data(sl, UniformRandom(200, seed=2))
    model1, _ = fit_kcf(d, data)
    model2, _ = fit_kcf(d, data)
    for u in model1.matrices:
        assert np.array_equal(model1.matrices[u], model2.matrices[u])


def test_predict_oracle_x_component(sl):
    d = monomial_dictionary(1, 2)
    model, _ = fit_kcf(d, collect_data(sl, UniformRandom(300, seed=8)))
    seq = InputSequence(("a", "b", "a"), ("a",))
    zs = predict(model, d, np.array([1.0]), seq, 3)
    xs = [float(z[1].real) for z in zs]
    assert xs == pytest.approx([1.0, 0.5, -0.4, -0.2], abs=1e-8)


def test_predict_rejects_missing_label(sl):
    d = monomial_dictionary(1, 2)
    triples = tuple(
        (np.array([x]), "a", np.array([0.5 * x])) for x in np.linspace(-1, 1, 9)
    )
    data = TrainingSet(triples, input_labels=("a", "b"))
    model, report = fit_kcf(d, data)
    assert report.missing_inputs == ("b",)
    with pytest.raises(DomainError):
        predict(model, d, np.array([0.3]), InputSequence.constant("b"), 1)


def test_predict_rejects_wrong_dictionary(sl):
    d2 = monomial_dictionary(1, 2)
    d3 = monomial_dictionary(1, 3)
    model, _ = fit_kcf(d2, collect_data(sl, UniformRandom(50, seed=1)))
    with pytest.raises(DomainMismatchError):
        predict(model, d3, np.array([0.1]), InputSequence.constant("a"), 1)


def test_predict_rejects_negative_horizon(sl):
    d = monomial_dictionary(1, 2)
    model, _ = fit_kcf(d, collect_data(sl, UniformRandom(50, seed=1)))
    with pytest.raises(ValueError):
        predict(model, d, np.array([0.1]), InputSequence.constant("a"), -1)


def test_prediction_error_small_along_trajectory(sl):
    d = monomial_dictionary(1, 2)
    model, _ = fit_kcf(d, collect_data(sl, UniformRandom(300, seed=8)))
    seq = InputSequence(("b",), ("a", "b"))
    errs = prediction_error(model, d, sl, 0.9, seq, 20)
    assert errs.shape == (21,)
    assert errs[0] == 0.0
    assert float(errs.max()) <= 1e-8


def test_finite_prediction_matches_word_tabulation(f3):
    d = indicator_dictionary(f3)
    model, _ = fit_kcf(d, collect_data(f3, ExhaustiveFinite()))
    word = ("a", "b", "b")
    seq = InputSequence(word, ("a",))
    for x0 in (0, 1, 2):
        z = predict(model, d, x0, seq, len(word))[-1]
        for i, obs in enumerate(d.observables):
            reference = apply(kcf_word(f3, word), obs)(x0)
            assert abs(z[i] - reference) <= 1e-10


def test_rowwise_residuals_non_increasing_on_shared_rows(lg):
    """Adding dictionary entries cannot hurt the rows both fits share.

    Monomial dictionaries are nested by degree and keep entry order, so
    each row of the smaller fit reappears in the larger one with a
    richer feature set but the same target.
    """
    data = collect_data(lg, UniformRandom(250, seed=6))
    per_degree = {}
    for degree in (1, 2, 3):
        d = monomial_dictionary(1, degree)
        model, _ = fit_kcf(d, data)
        rows = {}
        for u, pairs in data.per_input().items():
            phi0 = np.column_stack([d.lift(x) for x, _ in pairs])
            phi1 = np.column_stack([d.lift(y) for _, y in pairs])
            gap = np.abs(phi1 - model.matrices[u] @ phi0) ** 2
            rows[u] = gap.sum(axis=1) / len(pairs)
        per_degree[degree] = rows
    for small, large in ((1, 2), (2, 3)):
        shared = monomial_dictionary(1, small).dim
        for u in per_degree[small]:
            lo = per_degree[large][u][:shared]
            hi = per_degree[small][u]
            assert np.all(lo <= hi + 1e-12)


def test_training_csv_roundtrip_box(tmp_path, sl):
    data = collect_data(sl, UniformRandom(12, seed=3))
    path = tmp_path / "train.csv"
    export_training_csv(data, path)
    back = import_training_csv(path, sl)
    assert back.input_labels == data.input_labels
    for (x1, u1, y1), (x2, u2, y2) in zip(data.triples, back.triples):
        assert u1 == u2
        assert np.allclose(x1, x2, atol=0)
        assert np.allclose(y1, y2, atol=0)


def test_training_csv_roundtrip_finite(tmp_path, f3):
    data = collect_data(f3, ExhaustiveFinite())
    path = tmp_path / "train.csv"
    export_training_csv(data, path)
    back = import_training_csv(path, f3)
    assert back.triples == data.triples


def test_model_json_roundtrip(tmp_path, sl):
    d = monomial_dictionary(1, 2)
    model, report = fit_kcf(d, collect_data(sl, UniformRandom(40, seed=9)))
    path = tmp_path / "model.json"
    export_model_json(model, path, report)
    back = import_model_json(path, d, sl)
    for u in model.matrices:
        assert np.allclose(back.matrices[u], model.matrices[u], atol=0)


def test_model_json_is_sorted_and_timestamp_free(tmp_path, sl):
    d = monomial_dictionary(1, 2)
    model, report = fit_kcf(d, collect_data(sl, UniformRandom(40, seed=9)))
    path = tmp_path / "model.json"
    export_model_json(model, path, report)
    text = path.read_text()
    assert '"time' not in text and '"date' not in text
    export_model_json(model, tmp_path / "model2.json", report)
    assert text == (tmp_path / "model2.json").read_text()

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distgen import catalog, specfile
from distgen.baseline import make_uniform01
from distgen.errors import ParseError, SpecError
from distgen.generator import build

from _corpus import corpus, single_failure_specs

CORPUS = corpus()


@pytest.mark.parametrize("name,spec", CORPUS, ids=[n for n, _ in CORPUS])
def test_round_trip_document(name, spec):
    text = specfile.dumps(spec)
    back = specfile.loads(text)
    assert specfile.dumps(back) == text
    xs = np.linspace(*build(spec).window(), 33)
    assert np.array_equal(build(back).eval_cdf(xs), build(spec).eval_cdf(xs))


@pytest.mark.parametrize("cond", list(single_failure_specs()))
def test_round_trip_keeps_invalid_specs(cond):
    spec = single_failure_specs()[cond]
    assert specfile.dumps(specfile.loads(specfile.dumps(spec))) == specfile.dumps(spec)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.05, 20))
def test_round_trip_parameters_exactly(a, b):
    spec = catalog.recipe("beta1_g", {"a": a, "b": b}, make_uniform01())
    doc = json.loads(specfile.dumps(spec))
    assert doc["baseline_f"]["params"] == {"a": a, "b": b}
    assert specfile.document_from_spec(specfile.spec_from_document(doc)) == doc


def test_file_round_trip(tmp_path):
    spec = catalog.recipe("kumaraswamy_g", {"a": 2.0, "b": 3.0}, make_uniform01())
    path = tmp_path / "k.json"
    specfile.dump(spec, path)
    assert specfile.dumps(specfile.load(path)) == path.read_text(encoding="utf-8")


def _doc():
    return json.loads(specfile.dumps(catalog.recipe("beta1_g", {"a": 2.0, "b": 2.0},
                                                    make_uniform01())))


@pytest.mark.parametrize("edit,match", [
    (lambda d: d.pop("form"), "lacks"),
    (lambda d: d.update(extra=1), "unknown keys"),
    (lambda d: d.update(n=0), "'n' must be"),
    (lambda d: d.update(m=True), "'m' must be"),
    (lambda d: d.update(m=2), "exactly m = 2"),
    (lambda d: d["expressions"].pop("scale_u"), "needs exactly the keys"),
    (lambda d: d["expressions"].update(upper=["g1", "g1"]), "n = 1"),
    (lambda d: d["expressions"].update(upper=[3]), "DSL string"),
    (lambda d: d.update(baseline_f={"family": "beta"}), "expects parameters"),
    (lambda d: d.update(baseline_f={"family": "zeta", "params": {}}), "zeta"),
    (lambda d: d.update(baseline_f=[]), "must be an object"),
    (lambda d: d.update(label=5), "'label'"),
    (lambda d: d.update(form="sideways"), "form"),
])
def test_bad_documents(edit, match):
    doc = _doc()
    edit(doc)
    with pytest.raises(SpecError, match=match):
        specfile.spec_from_document(doc)


def test_bad_dsl_text_is_a_parse_error():
    doc = _doc()
    doc["expressions"]["upper"] = ["g1 +"]
    with pytest.raises(ParseError):
        specfile.spec_from_document(doc)


def test_not_json():
    with pytest.raises(SpecError, match="not valid JSON"):
        specfile.loads("{form: direct")
    with pytest.raises(SpecError, match="JSON object"):
        specfile.loads("[1, 2]")

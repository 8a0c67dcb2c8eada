import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from szegolab.constructions import ProNSpec, TailSequence, dyadic_root_measure, pron_pair, riesz_measure
from szegolab.measure_io import MeasureFileError, measure_from_dict, measure_to_dict, parse_measure_file, write_measure_file
from szegolab.measures import Measure, moments


def write(tmp_path, doc, name="m.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=2))
    return p


def test_atomic_two_atoms(tmp_path):
    p = write(tmp_path, {"components": [{"weight": 1, "kind": "atomic", "atoms": [["0", "1/2"], ["1/3", "1/2"]]}]})
    mu = parse_measure_file(p)
    assert mu.atom_list() == [(Fraction(0), Fraction(1, 2)), (Fraction(1, 3), Fraction(1, 2))]


def test_riesz_non_lacunary_names_pair(tmp_path):
    p = write(tmp_path, {"components": [{"kind": "riesz", "alphas": [1, 1, 1], "ells": [1, 3, 8]}]})
    with pytest.raises(MeasureFileError) as err:
        parse_measure_file(p)
    assert "(3, 8)" in str(err.value)
    assert err.value.path == "components[0].ells"
    assert err.value.line == 3


def test_mixture_mass_mismatch(tmp_path):
    doc = {"mass": "2", "components": [
        {"weight": "1/2", "kind": "density", "family": "constant", "params": [1]},
        {"weight": "1", "kind": "atomic", "atoms": [[0, "1/4"]]},
    ]}
    with pytest.raises(MeasureFileError, match="declared"):
        parse_measure_file(write(tmp_path, doc))
    doc["mass"] = "3/4"
    assert parse_measure_file(write(tmp_path, doc)).total_mass == Fraction(3, 4)


@pytest.mark.parametrize("doc, where", [
    ({}, "components"),
    ({"components": [{"kind": "blob"}]}, "components[0].kind"),
    ({"components": [{"kind": "atomic", "atoms": [[0]]}]}, "components[0].atoms[0]"),
    ({"components": [{"kind": "atomic", "atoms": [[0, -1]]}]}, "components[0].atoms[0][1]"),
    ({"components": [{"kind": "density", "family": "spline", "params": []}]}, "components[0].family"),
    ({"components": [{"kind": "riesz", "alphas": [1], "ells": [1.5]}]}, "components[0].ells[0]"),
    ({"components": [{"kind": "atomic", "weight": "x", "atoms": [[0, 1]]}]}, "components[0].weight"),
])
def test_field_paths(doc, where):
    with pytest.raises(MeasureFileError) as err:
        measure_from_dict(doc)
    assert err.value.path == where


def test_syntax_error_reports_line(tmp_path):
    p = write(tmp_path, '{\n  "components": [\n    {"kind": "atomic",, }\n  ]\n}')
    with pytest.raises(MeasureFileError) as err:
        parse_measure_file(p)
    assert err.value.line == 3


def test_density_pieces_and_trig(tmp_path):
    doc = {"components": [{"kind": "density", "breakpoints": [0, "1/2", 1], "pieces": [
        {"family": "constant", "params": ["3/2"]},
        {"family": "trig", "params": [[0, "0.5"], [1, "0.25", "0"]]},
    ]}]}
    mu = parse_measure_file(write(tmp_path, doc))
    assert abs(mu.total_mass - mpmath.mpf(1)) < 1e-30


def round_trip(mu, tmp_path):
    p = tmp_path / "out.json"
    write_measure_file(mu, p)
    return parse_measure_file(p)


def test_round_trip_generated_measures(tmp_path):
    dy = dyadic_root_measure(TailSequence.geometric(Fraction(1, 2), 5), 5)
    rz = riesz_measure([Fraction(1, 2)] * 3, [1, 3, 9]).measure.rotated(Fraction(1, 7))
    pn = pron_pair(ProNSpec.scaled((4, 16)), check_bound=False).mu
    for mu in (dy, rz, pn):
        back = round_trip(mu, tmp_path)
        a, b = moments(mu, 12), moments(back, 12)
        assert max(abs(x - y) for x, y in zip(a.values, b.values)) < mpmath.mpf(10) ** -60


@given(st.lists(st.tuples(st.fractions(0, 1, max_denominator=1000), st.integers(1, 100)), min_size=1, max_size=10,
                unique_by=lambda t: t[0] % 1))
def test_round_trip_atomic_property(atoms):
    mu = Measure.atoms([t for t, _ in atoms], [Fraction(m, 7) for _, m in atoms])
    back = measure_from_dict(json.loads(json.dumps(measure_to_dict(mu))))
    assert back.atom_list() == mu.atom_list()

"""Curve models, point sampling, and the JSON curve-file parser."""

import numpy as np
import pytest

from holodiff import curves


def test_plane_curve_validation():
    with pytest.raises(ValueError, match="degree"):
        curves.PlaneCurve(3, [(3, 0, 1.0), (0, 0, 1.0)])  # degree too small
    with pytest.raises(ValueError, match="out of range"):
        curves.PlaneCurve(5, [(6, 0, 1.0)])  # exponents exceed degree
    with pytest.raises(ValueError, match="total degree"):
        curves.PlaneCurve(5, [(1, 0, 1.0)])  # no top-degree monomial
    with pytest.raises(ValueError, match="duplicate"):
        curves.PlaneCurve(5, [(5, 0, 1.0), (5, 0, 2.0)])  # duplicate
    with pytest.raises(ValueError, match="nonzero"):
        curves.PlaneCurve(5, [(5, 0, 0.0)])  # zero coefficient


def test_plane_genus_and_values(quintic):
    assert quintic.genus == 6
    assert quintic.degree == 5
    x = np.array([0.0 + 0j, 1.0 + 0j])
    y = np.array([-1.0 + 0j, 0.5 + 0j])
    f = quintic.f(x, y)
    assert f[0] == pytest.approx(0.0)
    assert f[1] == pytest.approx(1 + 0.5**5 + 1)
    # gradients of x^5 + y^5 + 1
    assert quintic.fx(x, y)[1] == pytest.approx(5.0)
    assert quintic.fy(x, y)[0] == pytest.approx(5.0)


def test_hyperelliptic_validation():
    with pytest.raises(ValueError, match="odd number"):
        curves.HyperellipticCurve([0.0, 1.0])  # even count
    with pytest.raises(ValueError, match="increasing"):
        curves.HyperellipticCurve([1.0, 0.0, 2.0])  # not increasing
    with pytest.raises(ValueError, match="separation|close"):
        curves.HyperellipticCurve([0.0, 1e-9, 1.0])  # too close


def test_hyperelliptic_model(hyp_g2):
    assert hyp_g2.genus == 2
    x = np.array([3.0 + 0j])
    assert hyp_g2.f(x)[0] == pytest.approx(3 * 5 * 4 * 2 * 1)  # prod(3 - e)
    assert hyp_g2.branch_distance(np.array([0.4 + 0.3j]))[0] == pytest.approx(0.5)


def test_sample_points_on_curve(quintic):
    pts = curves.sample_points(quintic, 12, 101)
    assert len(pts) == 12
    for p in pts:
        resid = abs(quintic.f(p.x, p.y)[0])
        assert resid <= 1e-9 * quintic.on_curve_scale(p.x, p.y)[0]
        assert p.chart in ("x", "y")
    # determinism
    again = curves.sample_points(quintic, 12, 101)
    assert all(p.x == q.x and p.y == q.y for p, q in zip(pts, again))


def test_sample_points_distinct(quintic):
    pts = curves.sample_points(quintic, 15, 7)
    for i, p in enumerate(pts):
        for q in pts[i + 1 :]:
            assert abs(p.x - q.x) + abs(p.y - q.y) >= 1e-4


def test_sample_real_mode(hyp_g2):
    pts = curves.sample_points(hyp_g2, 8, 11, mode="real")
    for p in pts:
        assert p.x.imag == 0.0
        assert hyp_g2.branch_distance(np.array([p.x]))[0] >= 0.05
        assert p.y**2 == pytest.approx(hyp_g2.f(np.array([p.x]))[0], rel=1e-12)


def test_sampling_failure_reports_reason(hyp_g2):
    with pytest.raises(curves.SamplingError) as exc:
        curves.sample_points(hyp_g2, 5, 1, mode="real", branch_margin=10.0)
    assert "branch" in str(exc.value)


def test_sample_mode_validation(hyp_g2):
    with pytest.raises(ValueError):
        curves.sample_points(hyp_g2, 3, 0, mode="imaginary")


def test_implicit_derivative_consistency(quintic):
    # moving along the curve, dy/dx must equal -F_x / F_y
    pts = curves.sample_points(quintic, 6, 55)
    for p in pts:
        if p.chart != "x":
            continue
        h = 1e-7
        x2 = p.x + h
        roots = np.roots(quintic.y_poly_coeffs(x2))
        y2 = roots[np.argmin(np.abs(roots - p.y))]
        slope = (y2 - p.y) / h
        implicit = -quintic.fx(p.x, p.y)[0] / quintic.fy(p.x, p.y)[0]
        assert abs(slope - implicit) < 1e-5 * max(1.0, abs(implicit))


def test_parse_plane_spec():
    model = curves.parse_curve_spec(
        '{"type": "plane", "degree": 5,'
        ' "coeffs": [[5, 0, 1, 0], [0, 5, 1, 0], [0, 0, 1, 0]]}'
    )
    assert isinstance(model, curves.PlaneCurve)
    assert model.genus == 6


def test_parse_hyperelliptic_spec():
    model = curves.parse_curve_spec(
        '{"type": "hyperelliptic", "branch_points": [-1, 0, 1]}'
    )
    assert isinstance(model, curves.HyperellipticCurve)
    assert model.genus == 1


def test_parse_reports_json_line():
    with pytest.raises(curves.CurveSpecError) as exc:
        curves.parse_curve_spec('{"type": "plane",\n  "degree": ')
    assert "line 2" in str(exc.value)


def test_parse_reports_field():
    with pytest.raises(curves.CurveSpecError) as exc:
        curves.parse_curve_spec('{"type": "moebius"}')
    assert "field 'type'" in str(exc.value)
    with pytest.raises(curves.CurveSpecError) as exc:
        curves.parse_curve_spec('{"type": "plane", "degree": 2, "coeffs": []}')
    assert "field 'degree'" in str(exc.value)


def test_load_curve_spec(tmp_path):
    path = tmp_path / "curve.json"
    path.write_text('{"type": "hyperelliptic", "branch_points": [-2, -1, 0, 1, 2]}')
    model = curves.load_curve_spec(path)
    assert model.genus == 2


def test_point_chart_validation(hyp_g2):
    with pytest.raises(ValueError):
        curves.CurvePoint(hyp_g2, 0.5, 1.0, "z", 1)

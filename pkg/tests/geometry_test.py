"""공 모형 변환과 n=2 메쉬 위상 회귀."""
from __future__ import annotations

import math
import sys

import numpy as np

from testutil import raises, run_all

from geometry import (
    BallPoint, Mesh, ball_distance, ball_to_hyperboloid, embed_rotation_mesh,
    embed_translation_mesh, hyperboloid_to_ball, mesh_boundary_edges,
    mesh_euler_characteristic, translation_ball_coords,
)
from rotation import classify_rotation, extend_curve, sample_lambda
from surface_common import DimensionUnsupported, InvalidParams, KindMismatch, SurfaceParams
from translation import classify_translation, sample_mu


def _rot(n, H, d, **kw):
    params = SurfaceParams(n, H, d)
    return sample_lambda(params, classify_rotation(params)[1], **kw)


def _trans(n, H, d, **kw):
    params = SurfaceParams(n, H, d)
    return sample_mu(params, classify_translation(params)[1], **kw)


# ─── 모형 변환 ────────────────────────────────────────────────────

def test_ball_hyperboloid_round_trip():
    rng = np.random.default_rng(0)
    dirs = rng.normal(size=(50, 2))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    x = dirs * rng.uniform(0.0, 0.9, size=(50, 1))
    X = ball_to_hyperboloid(x)
    assert np.allclose(-X[:, 0] ** 2 + np.sum(X[:, 1:] ** 2, axis=1), -1.0, atol=1e-9)
    assert np.max(np.abs(hyperboloid_to_ball(X) - x)) < 1e-12
    raises(InvalidParams, ball_to_hyperboloid, [0.8, 0.8])


def test_ball_distance_from_origin():
    for rho in (0.1, 1.0, 3.0):
        assert abs(ball_distance([0.0, 0.0], [math.tanh(rho / 2), 0.0]) - rho) < 1e-12
    assert ball_distance([0.2, 0.1], [0.2, 0.1]) == 0.0
    raises(InvalidParams, ball_distance, [1.0, 0.0], [0.0, 0.0])


def test_ball_point_validation():
    assert BallPoint((0.3, 0.4), 1.0).t == 1.0
    raises(InvalidParams, BallPoint, (0.8, 0.8), 0.0)


# ─── 회전 메쉬 ────────────────────────────────────────────────────

def test_sphere_mesh_closed():
    curve = _rot(2, 1.0, 0.0, samples=30)
    m = 16
    mesh = embed_rotation_mesh(extend_curve(curve), angular_samples=m)
    assert mesh.is_watertight()
    assert mesh_euler_characteristic(mesh) == 2
    assert len(mesh.vertices) == (2 * len(curve) - 3) * m + 2
    assert mesh.metadata["apexes"] == 2
    assert mesh.max_horizontal_radius() < 1.0
    assert all(isinstance(p, BallPoint) for p in mesh.points)


def test_sphere_base_arc_is_disk():
    curve = _rot(2, 1.0, 0.0, samples=30)
    m = 12
    mesh = embed_rotation_mesh(curve, angular_samples=m)
    assert mesh.euler_characteristic() == 1
    assert len(mesh_boundary_edges(mesh)) == m
    assert np.array_equal(mesh.vertices[0], [0.0, 0.0, curve.height[0]])
    first_ring = mesh.vertices[1]
    assert abs(first_ring[0] - math.tanh(curve.rho[1] / 2)) < 1e-15
    assert first_ring[1] == 0.0 and first_ring[2] == curve.height[1]


def test_cylinder_mesh_is_annulus():
    curve = extend_curve(_rot(2, 0.5, 0.5, samples=20, rho_max=8.0))
    m = 10
    mesh = embed_rotation_mesh(curve, angular_samples=m)
    assert mesh.metadata["apexes"] == 0
    assert mesh.euler_characteristic() == 0
    assert len(mesh.boundary_edges()) == 2 * m
    assert len(mesh.faces) == 2 * m * (len(curve) - 1)


def test_rotation_mesh_errors():
    raises(DimensionUnsupported, embed_rotation_mesh, _rot(3, 1.0, 0.0, samples=20))
    curve = _rot(2, 1.0, 0.0, samples=20)
    raises(InvalidParams, embed_rotation_mesh, curve, 4)
    raises(KindMismatch, embed_rotation_mesh, _trans(2, 1.0, 0.0, samples=20))
    raises(InvalidParams, Mesh, np.zeros((3, 3)), [[0, 1, 3]])


# ─── 평행이동 메쉬 ────────────────────────────────────────────────

def test_translation_coords_on_axis():
    rho = np.array([0.0, 0.5, 2.0])
    xy = translation_ball_coords(rho, 0.0)
    assert np.allclose(xy[:, 0], np.tanh(rho / 2)) and np.all(xy[:, 1] == 0.0)
    off = translation_ball_coords(0.0, 1.0)
    assert off[0] == 0.0 and abs(off[1] - math.tanh(0.5)) < 1e-15


def test_translation_mesh_grid():
    curve = _trans(2, 1.0, 0.0, samples=25)
    cols = 9
    mesh = embed_translation_mesh(curve, transverse_samples=cols, transverse_span=1.5)
    rows = len(curve)
    grid = mesh.vertices.reshape(rows, cols, 3)
    axis = mesh.metadata["axis_column"]
    assert axis == 4
    assert np.allclose(grid[:, axis, 0], np.tanh(curve.rho / 2), atol=1e-10)
    assert np.all(grid[:, axis, 1] == 0.0)
    assert np.allclose(grid[:, axis, 2], curve.height, atol=1e-10)
    assert np.all(grid[0, :, 0] == 0.0)
    for i in (3, 12, rows - 1):
        assert abs(ball_distance([0.0, 0.0], grid[i, axis, :2]) - curve.rho[i]) < 1e-10
    assert len(mesh.faces) == 2 * (rows - 1) * (cols - 1)
    assert mesh.euler_characteristic() == 1
    assert mesh.metadata["class"] == curve.tag


def test_translation_mesh_errors():
    curve = _trans(2, 1.0, 0.0, samples=20)
    raises(InvalidParams, embed_translation_mesh, curve, 1)
    raises(InvalidParams, embed_translation_mesh, curve, 9, 0.0)
    raises(KindMismatch, embed_translation_mesh, _rot(2, 1.0, 0.0, samples=20))
    assert embed_translation_mesh(curve, transverse_samples=4).metadata["axis_column"] is None


if __name__ == "__main__":
    sys.exit(run_all(dict(globals())))

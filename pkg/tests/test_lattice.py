"""Domain geometry, boundary labels, turns, and side classification."""

import json

import numpy as np
import pytest

from conftest import make_rng
from lpexplorer.errors import ClassificationError, ConfigError, ConsistencyError
from lpexplorer.explorer import ExplorerConfig, run_explorer, turn_v1
from lpexplorer.lattice import (
    TURN_LEFT,
    TURN_RIGHT,
    TURN_STRAIGHT,
    DomainConfig,
    apply_turn,
    build_domain,
    classify_side,
    domain_to_json,
    frontier,
    path_to_text,
    side_components,
)
from lpexplorer.params import KappaParams


class TestDomainConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            DomainConfig(5, 6)  # odd width
        with pytest.raises(ConfigError):
            DomainConfig(2, 6)
        with pytest.raises(ConfigError):
            DomainConfig(6, 3)
        with pytest.raises(ConfigError):
            DomainConfig(6, 6, spacing=0.0)
        with pytest.raises(ConfigError):
            DomainConfig(6, 6, v0=(7, 0), v_end=(7, 0))
        with pytest.raises(ConfigError):
            DomainConfig(6, 6, v0=(7, 4))  # interior, not boundary

    def test_defaults(self):
        c = DomainConfig(6, 6)
        assert c.v0 == (7, 0)
        assert c.v_end == (7, 12)

    def test_physical_map(self):
        c = DomainConfig(8, 4, spacing=0.5)
        assert c.phys(0, 0) == (-2.0, 0.0)
        assert c.phys(8, 4) == (2.0, 2.0)
        assert c.snap(-1.99, 0.01) == (0, 0)
        assert c.snap(0.26, 1.0) == (5, 2)


class TestBuildDomain:
    def test_boundary_fully_labeled(self):
        state = build_domain(DomainConfig(4, 4))
        labeled = np.argwhere(state.labels != -1)
        # perimeter of a 4x4 vertex grid has 16 vertices; interior unlabeled
        assert len(labeled) == 16
        assert all(i in (0, 4) or j in (0, 4) for i, j in labeled)

    def test_corner_labels(self):
        state = build_domain(DomainConfig(4, 4))
        assert state.label_of((0, 0)) == 0  # left-bottom, dark arc
        assert state.label_of((4, 0)) == 1  # right-bottom, light arc
        assert state.label_of((4, 4)) == 1
        assert state.label_of((0, 4)) == 0

    def test_arcs_split_at_v0_and_v_end(self):
        state = build_domain(DomainConfig(6, 6))
        # v0 sits on the bottom edge between columns 3 and 4
        assert state.label_of((3, 0)) == 0 and state.label_of((4, 0)) == 1
        assert state.label_of((3, 6)) == 0 and state.label_of((4, 6)) == 1


class TestFrontier:
    def test_initial_pair_flanks_v0(self):
        state = build_domain(DomainConfig(12, 6))
        assert frontier(state) == ((6, 1), (7, 1))

    def test_rotation_after_left_turn(self):
        state = build_domain(DomainConfig(12, 6))
        apply_turn(state, TURN_LEFT)
        assert state.heading == (-1, 0)
        wl, wr = frontier(state)
        # heading west: left of the tip is now downward
        assert wl[1] < wr[1]

    def test_boundary_frontier_is_labeled(self):
        state = build_domain(DomainConfig(12, 6))
        for _ in range(5):
            apply_turn(state, TURN_STRAIGHT)
        wl, wr = frontier(state)  # facing the top boundary next to v_end
        assert state.label_of(wl) == 0 and state.label_of(wr) == 1


class TestApplyTurn:
    def test_straight_labels(self):
        state = build_domain(DomainConfig(12, 6))
        apply_turn(state, TURN_STRAIGHT)
        assert state.label_of((6, 1)) == 0
        assert state.label_of((7, 1)) == 1
        assert state.path.label_events[0] == [((6, 1), 0), ((7, 1), 1)]
        assert state.tip == (13, 2)
        assert state.step_count == 1

    def test_left_and_right_labels(self):
        state = build_domain(DomainConfig(12, 6))
        apply_turn(state, TURN_LEFT)
        assert state.label_of((6, 1)) == 1 and state.label_of((7, 1)) == 1
        state = build_domain(DomainConfig(12, 6))
        apply_turn(state, TURN_RIGHT)
        assert state.label_of((6, 1)) == 0 and state.label_of((7, 1)) == 0

    def test_label_expectation_matches_hitting_values(self):
        # under the one-coin rule, E[label(w_L)] = p_L and E[label(w_R)] = p_R
        p_l, p_r = 0.3, 0.6
        labels = {TURN_LEFT: (1, 1), TURN_STRAIGHT: (0, 1), TURN_RIGHT: (0, 0)}
        us = (np.arange(100000) + 0.5) / 100000
        mean = np.mean([labels[turn_v1(p_l, p_r, u)] for u in us], axis=0)
        assert mean[0] == pytest.approx(p_l, abs=1e-4)
        assert mean[1] == pytest.approx(p_r, abs=1e-4)

    def test_relabel_same_value_is_noop(self):
        # S L L curls the path back toward the bottom boundary; the closing
        # Right turn re-asserts 0 on two bottom vertices that already hold 0
        state = build_domain(DomainConfig(12, 6))
        for turn in (TURN_STRAIGHT, TURN_LEFT, TURN_LEFT):
            apply_turn(state, turn)
        assert state.heading == (0, -1)
        assert state.label_of((6, 0)) == 0 and state.label_of((5, 0)) == 0
        apply_turn(state, TURN_RIGHT)
        assert state.label_of((6, 0)) == 0 and state.label_of((5, 0)) == 0
        assert state.counters["label_anomaly"] == 0
        assert state.step_count == 4  # path still advanced

    def test_conflicting_relabel_raises_when_strict(self):
        # same approach, but a Left turn would flip the bottom 0s to 1
        state = build_domain(DomainConfig(12, 6))
        for turn in (TURN_STRAIGHT, TURN_LEFT, TURN_LEFT):
            apply_turn(state, turn)
        with pytest.raises(ConsistencyError):
            apply_turn(state, TURN_LEFT)
        apply_turn(state, TURN_LEFT, strict=False)
        assert state.counters["label_anomaly"] == 2
        assert state.label_of((6, 0)) == 0  # original labels kept
        assert state.label_of((5, 0)) == 0

    def test_monotone_labeling_on_sampled_runs(self):
        for seed in range(5):
            cfg = ExplorerConfig(
                domain=DomainConfig(10, 5), kappa=KappaParams(3.5), seed=seed
            )
            _, state = run_explorer(cfg)
            assert state.counters["label_anomaly"] == 0


def hand_path_state():
    """The 8-turn fixture on a 6x6 domain: straight, a left bump, straight.

    Turn sequence S L R R L S S S takes the tip from v0=(7,0) through medial
    vertices (7,2) (6,3) (5,4) (6,5) (7,6) (7,8) (7,10) to v_end=(7,12).
    """
    state = build_domain(DomainConfig(6, 6))
    for turn in "SLRRLSSS":
        apply_turn(state, turn)
    assert state.tip == state.config.v_end
    state.path.terminated = "reached_v_end"
    return state


class TestClassifySide:
    def test_golden_hand_path(self):
        state = hand_path_state()
        assert state.path.medial_vertices == [
            (7, 0), (7, 2), (6, 3), (5, 4), (6, 5), (7, 6), (7, 8), (7, 10), (7, 12),
        ]
        side = side_components(state)
        # hand-drawn sides around the bump
        expected = {
            (3, 1): 0, (4, 1): 1,
            (2, 1): 0, (2, 2): 0, (2, 3): 0,
            (3, 2): 1, (4, 2): 1, (4, 3): 1,
            (3, 3): 0, (2, 4): 0, (3, 4): 0, (4, 4): 1,
            (3, 5): 0, (4, 5): 1,
        }
        for v, s in expected.items():
            assert side[v] == s, v
        # far columns belong to the obvious sides
        assert np.all(side[0, :] == 0)
        assert np.all(side[6, :] == 1)

    def test_boundary_vertices(self):
        state = hand_path_state()
        assert classify_side(state, (0, 3)) == "Left"
        assert classify_side(state, (6, 3)) == "Right"
        # physical-point queries snap to the nearest vertex
        x, y = state.config.phys(1, 2)
        assert classify_side(state, (x + 0.1, y)) == "Left"

    def test_requires_completed_path(self):
        state = build_domain(DomainConfig(6, 6))
        with pytest.raises(ClassificationError):
            side_components(state)

    def test_components_cover_and_match_labels(self):
        # every vertex labeled during growth sits on the side its label says
        reached = 0
        for seed in range(20):
            cfg = ExplorerConfig(
                domain=DomainConfig(10, 5), kappa=KappaParams(4.0), seed=seed
            )
            path, state = run_explorer(cfg)
            if path.terminated != "reached_v_end":
                continue
            reached += 1
            side = side_components(state)
            assert np.all((side == 0) | (side == 1))
            for events in path.label_events:
                for v, lab in events:
                    assert side[v] == lab
        assert reached >= 15

    def test_no_repeated_directed_medial_edge(self):
        for seed in range(10):
            cfg = ExplorerConfig(
                domain=DomainConfig(10, 5), kappa=KappaParams(3.0), seed=seed
            )
            path, _ = run_explorer(cfg)
            verts = path.medial_vertices
            edges = list(zip(verts, verts[1:]))
            assert len(edges) == len(set(edges))


class TestExports:
    def test_path_text(self):
        state = hand_path_state()
        text = path_to_text(state)
        lines = text.strip().split("\n")
        assert lines[1] == "# terminated=reached_v_end"
        assert len(lines) == 2 + 8
        assert lines[2] == "0 3.5 1 S (3,1)=0;(4,1)=1"

    def test_domain_json(self):
        state = hand_path_state()
        payload = json.loads(domain_to_json(state))
        assert payload["config"]["width"] == 6
        assert payload["step_count"] == 8
        assert payload["labels"]["3,2"] == 1
        assert "1,1" not in payload["labels"]  # interior, never labeled

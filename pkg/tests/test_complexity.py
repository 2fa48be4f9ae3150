"""Closed-form complexity totals vs independent per-layer enumeration."""

from fractions import Fraction

import numpy as np
import pytest

from imcsi.errors import ConfigError
from imcsi.nn.complexity import (
    bi_encoder_layer_params,
    bi_encoder_params,
    closed_form_flops,
    closed_form_params,
    count_params_flops,
    fc_flops,
    fc_params,
    lstm_params,
    m_encoder_params,
)
from imcsi.nn.models import ModelSpec
from imcsi.quantizers import QuantizerSpec

BIN = QuantizerSpec("binarize")
U2 = QuantizerSpec("uniform", 2)

NT_GRID = (4, 8, 16, 32)
NS_GRID = (3, 13)
ALPHA_GRID = (Fraction(1, 16), Fraction(1, 8), Fraction(1, 4), Fraction(1, 2))


def test_fc_formulas_worked_example():
    assert fc_params(16, 8) == 136
    assert fc_flops(16, 8) == 248


def test_lstm_formula_worked_example():
    assert lstm_params(16, 8) == 4 * (8 * 16 + 64 + 8) == 800


def test_single_rb_closed_forms_across_grid():
    for nt in NT_GRID:
        for alpha in ALPHA_GRID:
            l = max(1, round(alpha * 2 * nt))
            spec = ModelSpec("imcsinet_s", nt, 1, l, BIN)
            params, flops = count_params_flops(spec)
            assert params == closed_form_params(spec)
            assert flops == closed_form_flops(spec)
            if (alpha * 2 * nt).denominator == 1:
                # published polynomial form in (nt, alpha)
                a = float(alpha)
                assert params == (576 + 64 * a) * nt**2 + (330 + 10 * a) * nt
                assert flops == (1152 + 128 * a) * nt**2 - (66 + 2 * a) * nt


def test_multi_rb_closed_forms_across_grid():
    for nt in NT_GRID:
        for ns in NS_GRID:
            for alpha in ALPHA_GRID:
                l = max(1, round(alpha * 2 * nt * ns))
                spec = ModelSpec("imcsinet_m", nt, ns, l, U2)
                params, flops = count_params_flops(spec)
                assert params == closed_form_params(spec)
                assert flops == closed_form_flops(spec)
                if (alpha * 2 * nt * ns).denominator == 1:
                    a = float(alpha)
                    d = nt * ns
                    assert params == (160 + 32 * a) * d**2 + (170 + 10 * a) * d
                    assert flops == (320 + 64 * a) * d**2 - (34 + 2 * a) * d


def test_bi_encoder_per_layer_published_counts():
    for nt in NT_GRID:
        for ns in NS_GRID:
            for alpha in ALPHA_GRID:
                m = max(1, round(alpha * 2 * nt))
                spec = ModelSpec("bi_imcsinet", nt, ns, ns * m, U2)
                dims = spec.layer_dims()[:3]
                got = tuple(2 * lstm_params(d[1], d[2]) for d in dims)
                assert got == bi_encoder_layer_params(nt, m)
                assert sum(got) == bi_encoder_params(nt, m)
                params, _ = count_params_flops(spec)
                assert params == closed_form_params(spec)


def test_bi_encoder_layer1_worked_example():
    assert bi_encoder_layer_params(8, 4)[0] == 8 * (80 * 64 + 8 * 8) == 41472


def test_single_rb_worked_example():
    spec = ModelSpec("imcsinet_s", 8, 1, 8, BIN)  # alpha = 1/2
    assert count_params_flops(spec)[0] == 38912 + 2680 == 41592


def test_recurrent_encoder_smaller_than_fc_encoder():
    for ns in (3, 6, 9):
        for nt in range(4, 65, 4):
            for alpha in ALPHA_GRID:
                m = max(1, round(alpha * 2 * nt))
                l = ns * m
                assert bi_encoder_params(nt, m) < m_encoder_params(nt, ns, l)


def test_closed_forms_require_full_width():
    spec = ModelSpec("imcsinet_s", 8, 1, 8, BIN, hidden_scale=0.5)
    with pytest.raises(ConfigError):
        closed_form_params(spec)
    with pytest.raises(ConfigError):
        closed_form_flops(ModelSpec("bi_imcsinet", 8, 3, 6, U2))


def test_scaled_models_still_enumerate():
    spec = ModelSpec("imcsinet_m", 8, 3, 12, U2, hidden_scale=0.25)
    params, flops = count_params_flops(spec)
    assert params > 0 and flops > 0
    full, _ = count_params_flops(ModelSpec("imcsinet_m", 8, 3, 12, U2))
    assert params < full

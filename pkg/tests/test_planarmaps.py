from fractions import Fraction

import pytest

from tutte.grammar import Diagnostics
from tutte.models import TruncationError
from tutte.planarmaps import (
    beta_from_eta,
    eta_from_beta,
    eta_from_gamma,
    eta_series_and_rooted_2conn,
    gamma_from_eta,
    gamma_series_and_rooted_3conn,
    map_network_series,
    map_series_bundle,
    mobile_series,
    motzkin_series,
    planar_terminals,
    planar_terminals_checked,
    pointed_2conn_maps,
    pointed_3conn_maps,
    regrade_coloured,
    rooted_maps,
    solve_beta,
    solve_eta,
    solve_gamma,
)
from tutte.series import agree, is_even


def test_motzkin():
    motzkin = motzkin_series((3, 3))
    assert motzkin.E[1, 0] == 1
    assert motzkin.E[0, 1] == 1
    assert motzkin.E[2, 0] == 1
    assert motzkin.E[1, 1] == 3
    assert motzkin.B[1, 0] == 1
    assert motzkin.B[0, 1] == 2


def test_beta():
    beta1, beta2 = solve_beta((3, 4))
    assert beta1[1, 2] == 1
    assert beta1[1, 4] == 2
    assert beta1[2, 4] == 1
    assert beta2[0, 2] == 1
    assert beta2[0, 4] == 1
    assert beta2[1, 4] == 2
    assert is_even(beta1) and is_even(beta2)


def test_beta_coloured():
    white, black = solve_beta((3, 2), with_y=True)
    beta1, _ = solve_beta((3, 4))
    assert agree(regrade_coloured(white, (3, 4)), beta1)
    assert black[0, 1] == 1
    with pytest.raises(TruncationError):
        regrade_coloured(white, (3, 8))


def test_rooted_maps():
    rooted = rooted_maps((3, 4))
    assert rooted[0, 2] == 1
    assert rooted[1, 2] == 1
    assert (rooted[0, 4], rooted[1, 4], rooted[2, 4]) == (2, 5, 2)
    assert rooted[0, 1] == rooted[1, 3] == 0


def test_mobiles():
    diagnostics = Diagnostics()
    mobiles = mobile_series((2, 4), diagnostics)
    assert diagnostics.passed
    assert "mobile T = M'" in [check.name for check in diagnostics.checks]
    assert mobiles.M_pointed[1, 2] == 1
    assert mobiles.M_pointed[0, 2] == Fraction(1, 2)


def test_eta():
    eta1, eta2 = solve_eta((2, 2))
    assert eta2[0, 1] == 1
    assert eta2[1, 2] == 2
    assert eta1[1, 1] == 1
    beta1, beta2 = solve_beta((3, 6))
    back1, back2 = beta_from_eta(*eta_from_beta(beta1, beta2))
    assert agree(back1, beta1)
    assert agree(back2, beta2)


def test_rooted_2conn_maps():
    bundle = eta_series_and_rooted_2conn((2, 4))
    assert bundle.L_rooted[1, 2] == 1
    assert bundle.L_rooted[0, 2] == 1
    assert bundle.eta2[0, 2] == 1


def test_pointed_2conn_maps():
    diagnostics = Diagnostics()
    pointed = pointed_2conn_maps((2, 4), diagnostics)
    assert diagnostics.passed
    assert pointed.L_pointed[1, 2] == 1
    assert pointed.L_pointed[0, 2] == Fraction(1, 2)


def test_map_networks():
    nets = map_network_series((2, 5))
    assert nets.D[0, 1] == 1
    assert nets.H.lowest_term() == ((2, 5), 1)
    assert nets.P.lowest_term() == ((0, 2), 1)


def test_gamma():
    gamma1, gamma2 = solve_gamma((2, 2))
    assert gamma1[1, 1] == 1
    assert gamma1[1, 2] == 2
    assert gamma2[0, 1] == 1
    eta1, eta2 = solve_eta((3, 3))
    back1, back2 = eta_from_gamma(*gamma_from_eta(eta1, eta2))
    assert agree(back1, eta1)
    assert agree(back2, eta2)


def test_rooted_3conn_maps():
    bundle = gamma_series_and_rooted_3conn((2, 5))
    assert bundle.K_rooted.lowest_term() == ((2, 5), 1)


def test_pointed_3conn_maps():
    assert pointed_3conn_maps((3, 6)).lowest_term() == ((3, 6), Fraction(1, 3))


def test_planar_terminals():
    diagnostics = Diagnostics(strict=False)
    terminals = planar_terminals_checked((4, 6), diagnostics)
    assert diagnostics.passed
    assert terminals.g3[4, 6] == Fraction(1, 24)
    assert terminals.g3_rooted[2, 5] == Fraction(1, 2)
    assert planar_terminals((4, 6)) == terminals


@pytest.mark.timeout(600)
def test_map_series_bundle():
    diagnostics = Diagnostics()
    bundle = map_series_bundle((3, 6), diagnostics)
    assert diagnostics.passed
    assert len(bundle.series()) == 21
    assert bundle.M_rooted[1, 2] == 1
    assert bundle.D_maps[0, 1] == 1

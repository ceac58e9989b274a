use symforge::spectral::{
    degeneracy_pair, ladder_residual, ladder_residual_with, richardson, shift_residual, solve_phi, solve_theta, Layout,
};

#[test]
fn phi_levels_match_poschl_teller() {
    // eps_j = eps_0 + j with eps_0 (eps_0 - 1) = a
    let pairs = solve_phi(2.0, 2000, 5).unwrap();
    for (j, p) in pairs.iter().enumerate() {
        assert!((p.eps() - (2.0 + j as f64)).abs() < 1e-4, "{j}: {}", p.eps());
    }
}

#[test]
fn richardson_improves_the_ground_state() {
    let coarse = solve_phi(2.0, 400, 1).unwrap()[0].eigenvalue;
    let fine = solve_phi(2.0, 800, 1).unwrap()[0].eigenvalue;
    let extrap = richardson(coarse, fine);
    assert!((extrap - 4.0).abs() < (fine - 4.0).abs());
}

#[test]
fn ladder_diagnostics_are_small() {
    for j in 0..3 {
        let r = ladder_residual(2.0, j, 2000).unwrap();
        assert!(r.alignment <= 1e-4 && r.factorization <= 1e-5, "{j}: {r:?}");
    }
}

#[test]
fn wrong_eps_inflates_the_ladder_defect() {
    let good = ladder_residual(2.0, 1, 1000).unwrap().alignment;
    let bad = ladder_residual_with(2.0, 1, 1000, 0.5).unwrap().alignment;
    assert!(bad >= 10.0 * good.max(1e-14));
}

#[test]
fn theta_levels_for_integer_and_fractional_m() {
    for m in [0.0, 0.25, 1.0, 2.5] {
        let pairs = solve_theta(m, 2000, 3).unwrap();
        let expected_layout = if m < 0.5 { Layout::Cells } else { Layout::Nodes };
        assert_eq!(pairs[0].grid.layout, expected_layout);
        for (l, p) in pairs.iter().enumerate() {
            let mu = m + l as f64;
            assert!(
                (p.eigenvalue - mu * (mu + 1.0)).abs() < 1e-4 * mu.max(1.0).powi(2),
                "M={m}, l={l}"
            );
        }
    }
}

#[test]
fn shift_operators_intertwine() {
    for (m, e) in [(2.0, 12.0), (1.0, 6.0), (1.25, 2.25 * 3.25)] {
        let r = shift_residual(m, e, 2000).unwrap();
        assert!(r.alignment <= 1e-4 && r.factorization <= 1e-5, "M={m}: {r:?}");
    }
    assert!(shift_residual(0.5, 0.75, 200).is_err());
}

#[test]
fn rational_ratio_gives_degenerate_pairs() {
    let (e1, e2) = degeneracy_pair(1, 2, 1.0, 0, 1, 2000).unwrap();
    assert!((e1 - e2).abs() < 1e-3 * e1, "{e1} vs {e2}");
    assert!(degeneracy_pair(2, 1, 1.0, 0, 1, 200).is_err());
}

//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p dshift-core --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use common::{fixed_ideals, random_ideals, suite};
use dshift_core::dirac::{creation_matrices, dirac_block, verify_index_formulas};
use dshift_core::fock::{self, Part};
use dshift_core::lattice::{MonomialSubmodule, Side};
use dshift_core::probe::{
    graded_subspace_bases, probe_commutator_decay, DecayVerdict, HomogeneousGeneratorSet,
};
use dshift_core::schatten::{
    commutator_spectrum, number_operator_series, numeric_singular_values,
    numeric_singular_values_interior, schatten_sum, tail_exponent, tail_exponent_f64, Verdict,
};
use dshift_core::Rat;

fn probe_set_of(module: &MonomialSubmodule) -> HomogeneousGeneratorSet {
    let gens = module
        .generators()
        .iter()
        .flat_map(|g| {
            g.fiber
                .iter()
                .map(|row| vec![(g.exponent.clone(), row.clone())])
                .collect::<Vec<_>>()
        })
        .collect();
    HomogeneousGeneratorSet::new(module.d(), module.r(), gens).unwrap()
}

/// Criterion 1: closed-form commutator singular values match the numerically
/// built truncated commutator to 1e-8 at N=10 across the fixture suite, in
/// under 60 seconds.
#[test]
fn criterion_1_spectrum_matches_matrix_oracle() {
    let started = Instant::now();
    let cutoff = 10u32;
    for fx in suite() {
        let m = &fx.module;
        let p = fock::projection(m, cutoff).unwrap();
        for k in 1..=m.d() {
            let s = fock::truncated_shift(m, k, cutoff, Part::Full).unwrap();
            let comm = p.mul(&s).unwrap().sub(&s.mul(&p).unwrap()).unwrap();
            let numeric = numeric_singular_values(&comm).unwrap();
            let exact = commutator_spectrum(m, k, cutoff - 1).unwrap().expand_f64();
            for (i, expected) in exact.iter().enumerate() {
                assert!(
                    (numeric[i] - expected).abs() < 1e-8,
                    "{} axis {k}: σ_{i} numeric {} vs exact {}",
                    fx.name,
                    numeric[i],
                    expected
                );
            }
            for extra in &numeric[exact.len()..] {
                assert!(
                    extra.abs() < 1e-8,
                    "{} axis {k}: spurious σ = {extra}",
                    fx.name
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "runtime {elapsed:?} exceeds 60 s");
    println!(
        "[criterion 1] PASS: exact spectra = matrix oracle on {} ideals in {elapsed:?}",
        suite().len()
    );
}

/// Criterion 2: Schatten sums converge at p = 2d + 0.5 with fitted critical
/// exponent ≤ 2d + 0.1 on every suite ideal and axis; for <z1 z2>, axis 1:
/// critical_p = 2 ± 0.1 and the p=6 partial sum is ζ(3) − 1 within 1e-3 at
/// budget 1e5.
#[test]
fn criterion_2_summability_threshold() {
    for fx in suite() {
        let m = &fx.module;
        let p_threshold = 2.0 * m.d() as f64 + 0.5;
        let budget = if m.d() == 2 { 2000 } else { 1500 };
        for k in 1..=m.d() {
            let stream = commutator_spectrum(m, k, budget).unwrap();
            let rep = schatten_sum(&stream, p_threshold).unwrap();
            assert_eq!(
                rep.verdict,
                Verdict::Converged,
                "{} axis {k} at p = {p_threshold}: {rep:?}",
                fx.name
            );
            if !stream.exhausted {
                let fit = tail_exponent(&stream).unwrap();
                assert!(
                    fit.critical_p <= 2.0 * m.d() as f64 + 0.1,
                    "{} axis {k}: critical_p = {} above 2d + 0.1",
                    fx.name,
                    fit.critical_p
                );
            }
        }
    }

    let z1z2 = MonomialSubmodule::from_exponents(2, &[vec![1, 1]]).unwrap();
    let stream = commutator_spectrum(&z1z2, 1, 100_000).unwrap();
    let fit = tail_exponent(&stream).unwrap();
    assert!(
        (fit.critical_p - 2.0).abs() <= 0.1,
        "critical_p = {}",
        fit.critical_p
    );
    let rep = schatten_sum(&stream, 6.0).unwrap();
    let zeta3_minus_1 = 0.202_056_903_159_594_3;
    assert!(
        (rep.total - zeta3_minus_1).abs() < 1e-3,
        "p=6 sum = {}",
        rep.total
    );
    assert_eq!(rep.verdict, Verdict::Converged);
    println!(
        "[criterion 2] PASS: threshold p = 2d + 0.5 summable everywhere; <z1 z2> critical_p = {:.4}, p=6 sum = {:.6}",
        fit.critical_p, rep.total
    );
}

/// Criterion 3, as specified: the compressed tuple of <z1 z2> (d=2) has
/// self-commutators with fitted critical exponent 2 ± 0.2 and converging
/// p=2.5 partial sums.
///
/// The p=2.5 partial sums do converge (they stabilize exactly across
/// cutoffs). The fitted-exponent clause cannot hold: the compression of the
/// d-shift to the complement of <z1 z2> is two Hardy shifts glued at the
/// vacuum, every self-commutator [T_i*, T_j] has rank ≤ 2 with unit singular
/// values (verified exactly in rational arithmetic at N = 60), so no decay
/// exponent exists to fit. The assertion is kept as specified and fails
/// honestly rather than being weakened.
#[test]
fn criterion_3_compressed_self_commutator_decay() {
    let m = MonomialSubmodule::from_exponents(2, &[vec![1, 1]]).unwrap();

    // p = 2.5 partial sums across increasing cutoffs: must stabilize
    let mut totals = Vec::new();
    for n in [20u32, 30, 40] {
        let tuple = fock::shift_tuple(&m, n, Part::Compressed).unwrap();
        let mut total = 0.0;
        for i in 1..=2 {
            for j in 1..=2 {
                let c = fock::self_commutator(&tuple, i, j).unwrap();
                let sv = numeric_singular_values_interior(&c, n - 2).unwrap();
                total += sv.iter().map(|s| s.powf(2.5)).sum::<f64>();
            }
        }
        totals.push(total);
    }
    let converging = (totals[2] - totals[1]).abs() < 1e-9 && (totals[1] - totals[0]).abs() < 1e-9;
    assert!(converging, "p=2.5 sums across cutoffs: {totals:?}");
    println!("[criterion 3] p=2.5 partial sums converge: {totals:?}");

    // fitted critical exponent of the pooled self-commutator spectrum
    let tuple = fock::shift_tuple(&m, 40, Part::Compressed).unwrap();
    let mut pooled: Vec<f64> = Vec::new();
    for i in 1..=2 {
        for j in 1..=2 {
            let c = fock::self_commutator(&tuple, i, j).unwrap();
            pooled.extend(
                numeric_singular_values_interior(&c, 38)
                    .unwrap()
                    .into_iter()
                    .filter(|s| *s > 1e-10),
            );
        }
    }
    pooled.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let fit = tail_exponent_f64(&pooled);
    match fit {
        Ok(f) if (f.critical_p - 2.0).abs() <= 0.2 => {
            println!(
                "[criterion 3] PASS: fitted critical_p = {:.4}",
                f.critical_p
            );
        }
        other => {
            println!(
                "[criterion 3] FAIL: compressed self-commutators have {} nonzero singular values (all 1), so there is no decay to fit; fit result: {:?}",
                pooled.len(),
                other.map(|f| f.critical_p)
            );
            panic!(
                "the fitted-exponent clause cannot hold: every [T_i*,T_j] on M⊥ for <z1 z2> \
                 has rank <= 2 with unit singular values; the README documents the analysis"
            );
        }
    }
}

/// Criterion 4: the four commutator/defect identities and the Dirac-square
/// identity hold with exact rational defect 0 on interior degrees at N=8 for
/// every suite ideal.
#[test]
fn criterion_4_defect_identities_exact() {
    use num_traits::Zero;
    for fx in suite() {
        let rep = fock::verify_identities(&fx.module, 8).unwrap();
        assert!(rep.all_zero, "{}: nonzero defect {rep:?}", fx.name);
        assert!(rep.restricted_commutator.is_zero());
    }
    println!(
        "[criterion 4] PASS: all five identities exact (defect 0) on {} ideals at N=8",
        suite().len()
    );
}

/// Criterion 5: index formulas with exact integer equality on M = {0}
/// (d ≤ 3, r ≤ 3), <z²> (d=1), <z1 z2> (d=2), and the random ideals that
/// stabilize at N=12, W=6; total runtime under 5 minutes.
#[test]
fn criterion_5_index_formulas() {
    let started = Instant::now();

    for d in 1..=3usize {
        for r in 1..=3usize {
            let m = MonomialSubmodule::zero(d, r);
            let rep = verify_index_formulas(&m, 12, 6).unwrap();
            assert!(rep.all_hold(), "M = 0, d={d}, r={r}: {rep:?}");
            let sign = if d % 2 == 0 { 1 } else { -1 };
            assert_eq!(rep.index_quotient, Some(sign * r as i64));
        }
    }

    let z2 = MonomialSubmodule::from_exponents(1, &[vec![2]]).unwrap();
    let rep = verify_index_formulas(&z2, 12, 6).unwrap();
    assert!(rep.all_hold(), "{rep:?}");
    assert_eq!(rep.index_submodule, Some(-1));
    assert_eq!(rep.index_quotient, Some(0));

    let z1z2 = MonomialSubmodule::from_exponents(2, &[vec![1, 1]]).unwrap();
    let rep = verify_index_formulas(&z1z2, 12, 6).unwrap();
    assert!(rep.all_hold(), "{rep:?}");
    assert_eq!(rep.index_quotient, Some(0));
    assert_eq!(rep.index_submodule, Some(1));
    assert_eq!(
        rep.index_submodule.unwrap() + rep.index_quotient.unwrap(),
        1
    );

    // the two-generator d=3 fixture stabilizes at the same budgets
    let d3 = MonomialSubmodule::from_exponents(3, &[vec![1, 1, 0], vec![0, 1, 2]]).unwrap();
    let rep = verify_index_formulas(&d3, 12, 6).unwrap();
    assert!(rep.all_hold(), "{rep:?}");
    assert_eq!(rep.index_submodule, Some(-1));
    assert_eq!(rep.index_quotient, Some(0));

    let mut stable = 0;
    let mut inconclusive = 0;
    for fx in random_ideals() {
        let rep = verify_index_formulas(&fx.module, 12, 6).unwrap();
        if rep.conclusive {
            stable += 1;
            assert!(rep.all_hold(), "{}: {rep:?}", fx.name);
        } else {
            inconclusive += 1;
        }
    }
    assert!(
        stable >= 5,
        "too few random ideals stabilized: {stable} stable, {inconclusive} inconclusive"
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "runtime {elapsed:?} exceeds 5 min");
    println!(
        "[criterion 5] PASS: index formulas exact on fixed cases and {stable}/10 random ideals ({inconclusive} inconclusive) in {elapsed:?}"
    );
}

/// Criterion 6: K(submodule) + K(quotient) = r exactly on every suite ideal
/// with stable windows.
#[test]
fn criterion_6_curvature_additivity() {
    for fx in suite() {
        let m = &fx.module;
        let s = m.curvature(Side::Submodule, 16).unwrap();
        let q = m.curvature(Side::Quotient, 16).unwrap();
        assert!(s.stable && q.stable, "{}: window not stable", fx.name);
        for rep in [&s, &q] {
            let k = rep.k.unwrap();
            assert!(
                0 <= k && k <= m.r() as i64,
                "{}: K = {k} outside [0, r]",
                fx.name
            );
        }
        assert_eq!(
            s.k.unwrap() + q.k.unwrap(),
            m.r() as i64,
            "{}: K_sub + K_quot != r",
            fx.name
        );
    }
    println!(
        "[criterion 6] PASS: curvature additivity K_sub + K_quot = r on {} ideals",
        suite().len()
    );
}

/// Criterion 7: number-operator series: d=2, p=3 is ζ(2) within 1e-3 and
/// converged; p=2 diverges; the p > d threshold shows for d ∈ {1,2,3}.
#[test]
fn criterion_7_number_operator_series() {
    let zeta2 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    let zeta2_rep = number_operator_series(2, 3.0, 4000).unwrap();
    assert!(
        (zeta2_rep.total - zeta2).abs() < 1e-3,
        "d=2 p=3 total {}",
        zeta2_rep.total
    );
    assert_eq!(zeta2_rep.verdict, Verdict::Converged);

    let rep = number_operator_series(2, 2.0, 4000).unwrap();
    assert_eq!(rep.verdict, Verdict::Diverging);

    for d in 1..=3usize {
        let above = number_operator_series(d, d as f64 + 1.0, 4000).unwrap();
        assert_eq!(
            above.verdict,
            Verdict::Converged,
            "d={d} p={} should converge",
            d + 1
        );
        let at = number_operator_series(d, d as f64, 4000).unwrap();
        assert_eq!(at.verdict, Verdict::Diverging, "d={d} p={d} should diverge");
    }
    println!(
        "[criterion 7] PASS: ζ(2) = {:.6} reproduced; p > d threshold behavior for d = 1,2,3",
        zeta2_rep.total
    );
}

/// Criterion 8: structural invariants — CAR relations exact for d ≤ 6,
/// B² = 0 in all complete blocks, adjoint reproduces the (n₁+1)/(|n|+1)
/// eigenvalue formula at every basis vector up to N=12.
#[test]
fn criterion_8_structural_invariants() {
    for d in 1..=6 {
        let c = creation_matrices(d).unwrap();
        assert!(c.car_verified, "CAR failed for d={d}");
    }

    for fx in fixed_ideals() {
        let m = &fx.module;
        let cutoff = 8u32;
        for part in [Part::Full, Part::Restricted, Part::Compressed] {
            let tuple = fock::shift_tuple(m, cutoff, part).unwrap();
            let max_s = cutoff as i64 - m.d() as i64 - 1;
            for s in -(m.d() as i64)..=max_s {
                let block = dirac_block(&tuple, s).unwrap();
                assert!(
                    block.b_matrix.mul(&block.b_matrix).is_zero(),
                    "{}: B² != 0 at s={s}",
                    fx.name
                );
            }
        }
    }

    for d in [2usize, 3] {
        let zero = MonomialSubmodule::zero(d, 1);
        let s1 = fock::truncated_shift(&zero, 1, 12, Part::Full).unwrap();
        let a = s1.adjoint();
        let basis = s1.basis().clone();
        for i in 0..basis.len() {
            let (p, _) = basis.element(i);
            if p.degree() >= 12 {
                continue;
            }
            let y = a.apply(&s1.apply(&[(i, Rat::from_integer(1.into()))]));
            let expect = Rat::new(
                ((p.component(1) + 1) as i64).into(),
                ((p.degree() + 1) as i64).into(),
            );
            assert_eq!(y, vec![(i, expect)], "eigenvalue formula at {p}");
        }
    }
    println!("[criterion 8] PASS: CAR (d ≤ 6), B² = 0 in complete blocks, adjoint eigenvalue formula up to N=12");
}

/// Criterion 9: the probe path reproduces the exact path on monomial
/// generators (dimensions exactly, singular values to 1e-8), and the decay
/// verdict for z1² + z2² is "decaying" across cutoffs 8, 10, 12.
#[test]
fn criterion_9_probe_consistency() {
    // monomial cross-check on the fixed ideals and a couple of random ones
    let mut checked = fixed_ideals();
    checked.extend(random_ideals().into_iter().take(2));
    for fx in checked {
        let m = &fx.module;
        let gens = probe_set_of(m);
        let top = 8u32;
        let bases = graded_subspace_bases(&gens, top).unwrap();
        for b in &bases {
            assert_eq!(
                b.vectors.len() as u64,
                m.graded_dims(b.degree).0,
                "{}: dimension mismatch at degree {}",
                fx.name,
                b.degree
            );
        }
        let reports = probe_commutator_decay(&gens, &[top - 4, top - 2, top]).unwrap();
        for (k, rep) in reports.iter().enumerate() {
            let exact = commutator_spectrum(m, k + 1, top - 1).unwrap().expand_f64();
            let probe_svs: Vec<f64> = rep
                .singular_values
                .iter()
                .copied()
                .filter(|s| *s > 1e-9)
                .collect();
            assert_eq!(
                probe_svs.len(),
                exact.len(),
                "{} axis {}: σ count mismatch",
                fx.name,
                k + 1
            );
            for (a, b) in probe_svs.iter().zip(&exact) {
                assert!((a - b).abs() < 1e-8, "{}: {a} vs {b}", fx.name);
            }
        }
    }

    // z1² + z2²: decaying across cutoffs 8, 10, 12
    let g =
        HomogeneousGeneratorSet::scalar(2, vec![vec![(vec![2, 0], 1), (vec![0, 2], 1)]]).unwrap();
    let reports = probe_commutator_decay(&g, &[8, 10, 12]).unwrap();
    for rep in &reports {
        assert_eq!(
            rep.verdict,
            DecayVerdict::Decaying,
            "axis {}: {:?}",
            rep.axis,
            rep.upper_half_peaks
        );
    }
    println!("[criterion 9] PASS: probe = exact path on monomial generators; z1²+z2² decaying across N = 8, 10, 12");
}

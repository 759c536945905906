//! Shared fixture suite for the acceptance tests: the three fixed ideals the
//! reports revolve around plus ten reproducible pseudo-random monomial ideals
//! over d ∈ {2,3}, r ∈ {1,2}.

use dshift_core::lattice::{Generator, MonomialSubmodule, MultiIndex};
use dshift_core::linalg::row_rank;
use dshift_core::{Rat, XorShift64};

pub struct Fixture {
    pub name: String,
    pub module: MonomialSubmodule,
}

pub fn fixed_ideals() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "<z1 z2> (d=2, r=1)".into(),
            module: MonomialSubmodule::from_exponents(2, &[vec![1, 1]]).unwrap(),
        },
        Fixture {
            name: "<z1> (d=2, r=1)".into(),
            module: MonomialSubmodule::from_exponents(2, &[vec![1, 0]]).unwrap(),
        },
        Fixture {
            name: "<z1 z2, z2 z3^2> (d=3, r=1)".into(),
            module: MonomialSubmodule::from_exponents(3, &[vec![1, 1, 0], vec![0, 1, 2]]).unwrap(),
        },
    ]
}

/// Ten deterministic pseudo-random ideals: six with d=2 (exponents ≤ 2) and
/// four with d=3 (exponents ≤ 2, mostly ≤ 1), ranks alternating 1 and 2.
pub fn random_ideals() -> Vec<Fixture> {
    let mut rng = XorShift64::new(0xD5C0DE);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < 10 && attempts < 1000 {
        attempts += 1;
        let idx = out.len();
        let d = if idx < 6 { 2 } else { 3 };
        let r = 1 + (idx % 2);
        let max_exp = if d == 2 { 2 } else { 1 + (idx % 2) as u32 };
        let n_gens = 1 + rng.below(2) as usize;
        let mut gens = Vec::new();
        for _ in 0..n_gens {
            let exponent = loop {
                let e: Vec<u32> = (0..d)
                    .map(|_| rng.below(max_exp as u64 + 1) as u32)
                    .collect();
                if e.iter().sum::<u32>() >= 1 {
                    break e;
                }
            };
            let fiber: Vec<Vec<Rat>> = if r == 1 {
                vec![vec![Rat::from_integer(1.into())]]
            } else {
                let v: Vec<Rat> = loop {
                    let v: Vec<Rat> = (0..r)
                        .map(|_| Rat::from_integer((rng.below(5) as i64 - 2).into()))
                        .collect();
                    if v.iter().any(|x| !num_traits::Zero::is_zero(x)) {
                        break v;
                    }
                };
                vec![v]
            };
            gens.push(Generator {
                exponent: MultiIndex::new(exponent),
                fiber,
            });
        }
        // drop degenerate duplicates the minimalizer would erase entirely
        let module = match MonomialSubmodule::new(d, r, gens) {
            Ok(m) => m.minimalize(),
            Err(_) => continue,
        };
        if module.is_zero_module() {
            continue;
        }
        // keep fibers independent (new() already enforces per-generator)
        let all_rows: Vec<Vec<Rat>> = module
            .generators()
            .iter()
            .flat_map(|g| g.fiber.iter().cloned())
            .collect();
        let _ = row_rank(&all_rows);
        let name = format!(
            "random#{idx} (d={d}, r={r}, gens={})",
            module
                .generators()
                .iter()
                .map(|g| format!("{}", g.exponent))
                .collect::<Vec<_>>()
                .join(" ")
        );
        out.push(Fixture { name, module });
    }
    assert_eq!(out.len(), 10, "fixture generation failed");
    out
}

pub fn suite() -> Vec<Fixture> {
    let mut v = fixed_ideals();
    v.extend(random_ideals());
    v
}

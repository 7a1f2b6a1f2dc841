//! Independent brute-force construction of the multilinear consequences of
//! each preset, compared with the engine's dimensions.

mod oracles;

use operad_core::identity_dsl::preset_names;
use operad_core::{dim_free, expand_consequences, operad_dim_mod_p, preset};
use oracles::brute::{all_trees, brute_force_rows};
use oracles::linalg::{rank_mod, rational_rank};

const P: u64 = (1 << 61) - 1;

#[test]
fn enumeration_matches_free_dimension() {
    for n in 1..=5 {
        let vars: Vec<u8> = (1..=n as u8).collect();
        assert_eq!(all_trees(&vars).len() as u64, dim_free(n).unwrap());
    }
}

#[test]
fn degree_three_matches_exact_rational_rank() {
    for name in preset_names() {
        let ids = preset(name).unwrap().identities;
        let (width, rows) = brute_force_rows(&ids, 3);
        let expected = (width - rational_rank(&rows)) as u64;
        assert_eq!(
            operad_dim_mod_p(&ids, 3, (1 << 63) - 25).unwrap(),
            expected,
            "{name}"
        );
        let engine = expand_consequences(&ids, 3).unwrap();
        let engine_rows: Vec<Vec<i64>> = engine
            .rows()
            .iter()
            .map(|r| {
                let mut v = vec![0; engine.n_cols()];
                for &(c, e) in r.entries() {
                    v[c as usize] = e;
                }
                v
            })
            .collect();
        assert_eq!(
            rational_rank(&engine_rows),
            width - expected as usize,
            "{name}"
        );
    }
}

#[test]
fn degree_four_matches_brute_force() {
    for name in preset_names() {
        let ids = preset(name).unwrap().identities;
        let (width, rows) = brute_force_rows(&ids, 4);
        let expected = (width - rank_mod(&rows, P)) as u64;
        assert_eq!(operad_dim_mod_p(&ids, 4, P).unwrap(), expected, "{name}");
        match name {
            "right-alternative" | "left-alternative" => assert_eq!(expected, 60),
            "alternative" => assert_eq!(expected, 32),
            "associative" => assert_eq!(expected, 24),
            _ => {}
        }
    }
}

#![allow(dead_code)]

use colrep::hash_family::HashFamily;
use colrep::ingredient::{
    make_vandermonde_ingredient, spread_nodes, vandermonde, Ingredient, NscKind, SchemeKind,
};
use colrep::{column_replace, ComposedMatrix, DenseMatrix, Tolerance};
use rand::seq::index::sample;
use rand::Rng;

pub const FIG6_D: [usize; 19] = [4, 4, 4, 4, 4, 4, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3];

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> HashFamily {
    HashFamily::read(fixture_path(&format!("{name}.json"))).unwrap()
}

pub fn fig6_d_u32() -> Vec<u32> {
    FIG6_D.iter().map(|&d| d as u32).collect()
}

/// A full-rank Vandermonde ingredient with at least `k` rows for each
/// alphabet size, paired with the ℓ0 scheme.
pub fn full_rank_vandermonde(k: usize) -> Ingredient {
    let rows = k + k % 2;
    Ingredient::new(
        vandermonde(&spread_nodes(k), rows).unwrap(),
        SchemeKind::L0BruteForce,
    )
}

/// Fig. 6 with a `2d_i × k_i` Vandermonde ingredient per row, certified
/// for sparsity `d_i` under both null-space conditions.
pub fn fig6_composed() -> ComposedMatrix {
    let p = fixture("fig6");
    let tol = Tolerance::default();
    let ings: Vec<Ingredient> = (0..p.rows())
        .map(|i| {
            let k = p.alphabet(i) as usize;
            let mut ing =
                make_vandermonde_ingredient(k, FIG6_D[i], Some(&spread_nodes(k)), &tol).unwrap();
            assert!(ing.certify(NscKind::L1, FIG6_D[i], &tol).unwrap());
            ing
        })
        .collect();
    column_replace(&p, &ings).unwrap()
}

pub fn random_sparse<R: Rng>(rng: &mut R, n: usize, t: usize, nonnegative: bool) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for j in sample(rng, n, t) {
        let mag = rng.gen_range(0.5..2.0);
        x[j] = if nonnegative || rng.gen_bool(0.5) {
            mag
        } else {
            -mag
        };
    }
    x
}

pub fn max_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

pub fn support(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let pos = (0..x.len()).filter(|&j| x[j] > 0.0).collect();
    let neg = (0..x.len()).filter(|&j| x[j] < 0.0).collect();
    (pos, neg)
}

/// Exhaustive minimal-support solution of `B x = y`, independent of the
/// library's recovery code: Gaussian elimination on each candidate support.
pub fn oracle_min_support(b: &DenseMatrix, y: &[f64], max_size: usize) -> Option<Vec<usize>> {
    let n = b.cols();
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ynorm == 0.0 {
        return Some(Vec::new());
    }
    for size in 1..=max_size {
        let mut cols: Vec<usize> = (0..size).collect();
        loop {
            if let Some(res) = normal_equations_residual(b, &cols, y) {
                if res <= 1e-7 * ynorm {
                    return Some(cols);
                }
            }
            if !next_combination(&mut cols, n) {
                break;
            }
        }
    }
    None
}

pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn normal_equations_residual(b: &DenseMatrix, cols: &[usize], y: &[f64]) -> Option<f64> {
    let s = cols.len();
    let mut g = vec![vec![0.0; s + 1]; s];
    for (a, &ca) in cols.iter().enumerate() {
        for (c, &cc) in cols.iter().enumerate() {
            g[a][c] = (0..b.rows()).map(|r| b.get(r, ca) * b.get(r, cc)).sum();
        }
        g[a][s] = (0..b.rows()).map(|r| b.get(r, ca) * y[r]).sum();
    }
    for p in 0..s {
        let piv = (p..s).max_by(|&i, &j| g[i][p].abs().total_cmp(&g[j][p].abs()))?;
        if g[piv][p].abs() < 1e-12 {
            return None;
        }
        g.swap(p, piv);
        for i in 0..s {
            if i != p {
                let f = g[i][p] / g[p][p];
                for c in p..=s {
                    g[i][c] -= f * g[p][c];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..s).map(|i| g[i][s] / g[i][i]).collect();
    let res: f64 = (0..b.rows())
        .map(|r| {
            let v: f64 = cols.iter().zip(&coef).map(|(&c, &x)| b.get(r, c) * x).sum();
            (v - y[r]).powi(2)
        })
        .sum();
    Some(res.sqrt())
}

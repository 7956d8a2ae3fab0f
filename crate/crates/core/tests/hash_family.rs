mod common;

use colrep::field::Field;
use colrep::hash_family::{
    check_distributing, check_perfect, check_separating, check_strengthening, distributing_shapes,
    gen_linear, linear_row_requirement, perfect_rows, separating_rows, strengthening_rows,
    CheckOptions, HashFamilyError, LinearPattern, MISSING,
};
use colrep::{Execution, HashFamily, PartitionShape, RowLabel, Verdict};
use common::{fig6_d_u32, fixture, next_combination};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn opts() -> CheckOptions {
    CheckOptions::default()
}

fn shape(s: &str) -> PartitionShape {
    s.parse().unwrap()
}

// Independent reference checker: enumerates every indexed assignment of
// every column subset and tests rows straight from the definitions.

fn row_separates(p: &HashFamily, row: usize, parts: &[Vec<usize>], marked: &[bool]) -> bool {
    for (a, part) in parts.iter().enumerate() {
        for &c in part {
            if p.entry(row, c) == MISSING && !marked[a] {
                return false;
            }
        }
    }
    for a in 0..parts.len() {
        for b in a + 1..parts.len() {
            for &c in &parts[a] {
                for &e in &parts[b] {
                    if p.entry(row, c) == p.entry(row, e) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn distinct(p: &HashFamily, row: usize, cols: &[usize]) -> usize {
    let mut s: Vec<u32> = cols.iter().map(|&c| p.entry(row, c)).collect();
    s.sort_unstable();
    s.dedup();
    s.len()
}

/// Calls `f` on every indexed partition of every column subset with the
/// given part sizes; stops early when `f` returns false.
fn for_each_partition(n: usize, sizes: &[usize], f: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> bool {
    fn go(
        n: usize,
        sizes: &[usize],
        used: &mut Vec<bool>,
        acc: &mut Vec<Vec<usize>>,
        f: &mut dyn FnMut(&[Vec<usize>]) -> bool,
    ) -> bool {
        if acc.len() == sizes.len() {
            return f(acc);
        }
        let w = sizes[acc.len()];
        let free: Vec<usize> = (0..n).filter(|&c| !used[c]).collect();
        if free.len() < w {
            return true;
        }
        let mut idx: Vec<usize> = (0..w).collect();
        loop {
            let part: Vec<usize> = idx.iter().map(|&i| free[i]).collect();
            for &c in &part {
                used[c] = true;
            }
            acc.push(part);
            let keep = go(n, sizes, used, acc, f);
            let part = acc.pop().unwrap();
            for &c in &part {
                used[c] = false;
            }
            if !keep {
                return false;
            }
            if !next_combination(&mut idx, free.len()) {
                return true;
            }
        }
    }
    go(n, sizes, &mut vec![false; n], &mut Vec::new(), f)
}

fn reference_separating(p: &HashFamily, s: &PartitionShape) -> bool {
    for_each_partition(p.cols(), s.parts(), &mut |parts| {
        (0..p.rows()).any(|r| row_separates(p, r, parts, s.marked()))
    })
}

fn reference_strengthening(p: &HashFamily, d: &[u32], tau: usize, s: &PartitionShape) -> bool {
    let n = p.cols();
    for_each_partition(n, s.parts(), &mut |parts| {
        let c: Vec<usize> = parts.iter().flatten().copied().collect();
        let mut t_sets = Vec::new();
        let mut idx: Vec<usize> = (0..tau).collect();
        loop {
            let overlap = idx.iter().filter(|j| c.contains(j)).count();
            if overlap == tau.min(c.len()) {
                t_sets.push(idx.clone());
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        t_sets.iter().all(|t| {
            (0..p.rows()).any(|r| {
                row_separates(p, r, parts, s.marked()) && distinct(p, r, t) <= d[r] as usize
            })
        })
    })
}

#[test]
fn fixtures_have_declared_dimensions() {
    let expect = [
        ("fig2", 6, 12),
        ("fig3", 3, 16),
        ("fig4", 10, 13),
        ("fig6", 19, 13),
    ];
    for (name, m, n) in expect {
        let p = fixture(name);
        assert_eq!((p.rows(), p.cols()), (m, n), "{name}");
        assert!(!p.has_missing());
    }
    let p6 = fixture("fig6");
    let k: Vec<u32> = [vec![5; 6], vec![4], vec![3; 12]].concat();
    assert_eq!(p6.alphabet_sizes(), k.as_slice());
}

#[test]
fn figure_properties() {
    assert_eq!(
        check_perfect(&fixture("fig2"), 3, &opts()).unwrap(),
        Verdict::Holds
    );
    assert_eq!(
        check_separating(&fixture("fig3"), &[shape("1,2")], &opts()).unwrap(),
        Verdict::Holds
    );
    assert_eq!(
        check_distributing(&fixture("fig4"), 5, 2, &opts()).unwrap(),
        Verdict::Holds
    );
    let v = check_strengthening(
        &fixture("fig6"),
        &fig6_d_u32(),
        5,
        &[shape("1,4"), shape("2,3")],
        &opts(),
    )
    .unwrap();
    assert_eq!(v, Verdict::Holds);
}

#[test]
fn pigeonhole_and_trivial_cases() {
    let p2 = fixture("fig2");
    let v = check_perfect(&p2, 4, &opts()).unwrap();
    let w = v
        .witness()
        .expect("three symbols cannot separate four columns");
    assert!(w.confirms_failure(&p2, None));
    assert!(check_perfect(&p2, 1, &opts()).unwrap().holds());
    assert!(check_separating(&fixture("fig4"), &[shape("3")], &opts())
        .unwrap()
        .holds());
    let constant = HashFamily::homogeneous(2, vec![vec![1; 5], vec![2; 5]]).unwrap();
    let v = check_distributing(&constant, 2, 2, &opts()).unwrap();
    assert!(v.witness().unwrap().confirms_failure(&constant, None));
}

#[test]
fn perfect_implies_two_part_separation_on_fig2() {
    let p = fixture("fig2");
    assert!(check_perfect(&p, 3, &opts()).unwrap().holds());
    assert!(check_distributing(&p, 3, 2, &opts()).unwrap().holds());
}

#[test]
fn fig2_is_not_one_three_separating() {
    // Perfect of strength 3, yet some singleton meets every row's symbols
    // on some triple; the witness must replay.
    let p = fixture("fig2");
    let v = check_separating(&p, &[shape("1,3")], &opts()).unwrap();
    let w = v.witness().expect("fig2 has a {1,3} gap");
    assert!(w.confirms_failure(&p, None));
    assert!(separating_rows(&p, &w.parts, &[false, false]).is_empty());
    assert_eq!(w.parts.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 3]);
}

#[test]
fn witness_rows_from_the_figures() {
    assert_eq!(perfect_rows(&fixture("fig2"), &[3, 4, 5]), vec![3]);

    let p4 = fixture("fig4");
    let one_four = separating_rows(&p4, &[vec![7, 8, 9, 10], vec![11]], &[false, false]);
    assert!(one_four.contains(&3), "{one_four:?}");
    let two_three = separating_rows(&p4, &[vec![7, 8, 11], vec![9, 10]], &[false, false]);
    assert!(two_three.contains(&4), "{two_three:?}");

    let p6 = fixture("fig6");
    let parts = [vec![0, 1, 2], vec![3, 4]];
    let tau: Vec<usize> = (0..5).collect();
    let sep = separating_rows(&p6, &parts, &[false, false]);
    let strong = strengthening_rows(&p6, &parts, &fig6_d_u32(), &tau);
    assert!(sep.contains(&0));
    assert!(!strong.contains(&0));
    assert!(strong.contains(&2));

    let parts = [vec![0, 6], vec![1, 5, 10]];
    let tau: Vec<usize> = parts.iter().flatten().copied().collect();
    assert!(strengthening_rows(&p6, &parts, &fig6_d_u32(), &tau).contains(&7));
}

#[test]
fn distributing_equals_expanded_shapes() {
    for (name, t) in [("fig3", 3), ("fig4", 4), ("fig2", 3)] {
        let p = fixture(name);
        let a = check_distributing(&p, t, 2, &opts()).unwrap().holds();
        let b = check_separating(&p, &distributing_shapes(t, 2), &opts())
            .unwrap()
            .holds();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn strengthening_with_vacuous_bounds_matches_separation() {
    let p = fixture("fig3");
    let d = vec![4; 3];
    let shapes = [shape("1,2")];
    let a = check_strengthening(&p, &d, 3, &shapes, &opts())
        .unwrap()
        .holds();
    let b = check_separating(&p, &shapes, &opts()).unwrap().holds();
    assert_eq!(a, b);
}

#[test]
fn verdict_is_independent_of_execution() {
    let p = fixture("fig4");
    for exec in [Execution::Sequential, Execution::Parallel] {
        let o = CheckOptions {
            execution: exec,
            ..opts()
        };
        assert_eq!(check_distributing(&p, 5, 2, &o).unwrap(), Verdict::Holds);
        assert!(!check_separating(&fixture("fig2"), &[shape("1,3")], &o)
            .unwrap()
            .holds());
    }
}

#[test]
fn small_budget_switches_to_sampling() {
    let o = CheckOptions {
        budget: 10,
        sample_trials: 500,
        ..opts()
    };
    match check_perfect(&fixture("fig2"), 3, &o).unwrap() {
        Verdict::HoldsSampled { trials } => assert!(trials >= 500),
        v => panic!("expected a sampled verdict, got {v:?}"),
    }
}

#[test]
fn error_cases() {
    let p = HashFamily::homogeneous(2, vec![vec![1, 0, 2]]).unwrap();
    assert_eq!(
        check_perfect(&p, 2, &opts()).unwrap_err(),
        HashFamilyError::ContainsMissingSymbol
    );
    let q = fixture("fig3");
    assert!(matches!(
        check_perfect(&q, 17, &opts()),
        Err(HashFamilyError::SparsityExceedsColumns { .. })
    ));
    assert!(matches!(
        check_strengthening(&q, &[1, 2], 2, &[shape("1,1")], &opts()),
        Err(HashFamilyError::DimensionMismatch { .. })
    ));
    assert!(HashFamily::homogeneous(2, vec![vec![1, 3]]).is_err());
    assert!(HashFamily::new(vec![2, 2], vec![vec![1, 2], vec![1]]).is_err());
    assert!(matches!(
        q.row_classes(3),
        Err(HashFamilyError::RowOutOfRange { .. })
    ));
}

#[test]
fn row_classes_of_fig1() {
    let p = fixture("fig1_pattern");
    let c = p.row_classes(0).unwrap();
    assert_eq!(c.classes, vec![vec![0, 3], vec![1], vec![2]]);
    assert!(c.missing.is_empty());
    let m = HashFamily::homogeneous(2, vec![vec![0, 1, 0, 2]]).unwrap();
    assert_eq!(m.row_classes(0).unwrap().missing, vec![0, 2]);
}

#[test]
fn json_round_trip() {
    for name in ["fig2", "fig3", "fig4", "fig6"] {
        let p = fixture(name);
        assert_eq!(HashFamily::from_json(&p.to_json()).unwrap(), p);
    }
    let lin = gen_linear(&Field::of_order(4).unwrap(), 2, 5).unwrap();
    let back = HashFamily::from_json(&lin.to_json()).unwrap();
    assert_eq!(back, lin);
    assert_eq!(back.row_labels().unwrap()[0], RowLabel::Infinity);
    assert!(HashFamily::from_json("{\"m\": 1}").is_err());
}

/// Column `j` of a linear family, computed with the public field API.
fn linear_column_oracle(f: &Field, alpha: usize, m: usize, j: usize) -> Vec<u32> {
    let q = f.order() as usize;
    let mut digits = Vec::with_capacity(alpha);
    let mut rest = j;
    for _ in 0..alpha {
        digits.push(f.element((rest % q) as u32).unwrap());
        rest /= q;
    }
    let mut out = vec![digits[alpha - 1].index() + 1];
    for b in f.elements().take(m - 1) {
        let mut acc = f.zero();
        let mut power = f.one();
        for &c in &digits {
            acc = f.add(acc, f.mul(c, power).unwrap()).unwrap();
            power = f.mul(power, b).unwrap();
        }
        out.push(acc.index() + 1);
    }
    out
}

#[test]
fn linear_family_matches_polynomial_evaluation() {
    for (q, alpha) in [(3, 2), (4, 2), (5, 3), (8, 2), (9, 2)] {
        let f = Field::of_order(q).unwrap();
        let m = q as usize + 1;
        let p = gen_linear(&f, alpha, m).unwrap();
        assert_eq!(p.cols(), (q as usize).pow(alpha as u32));
        let lp = LinearPattern::from_family(&p).unwrap();
        for j in 0..p.cols() {
            let col: Vec<u32> = (0..m).map(|i| p.entry(i, j)).collect();
            assert_eq!(
                col,
                linear_column_oracle(&f, alpha, m, j),
                "q={q} alpha={alpha} j={j}"
            );
            assert_eq!(lp.column_index(&lp.coefficients(j)), j);
            assert_eq!(lp.symbol(2, j), p.entry(2, j));
        }
        assert!((0..m).all(|i| p.entry(i, 0) == 1), "zero polynomial column");
    }
}

#[test]
fn gf3_example_column() {
    let p = gen_linear(&Field::of_order(3).unwrap(), 2, 4).unwrap();
    assert_eq!((p.rows(), p.cols()), (4, 9));
    let col: Vec<u32> = (0..4).map(|i| p.entry(i, 4) - 1).collect();
    assert_eq!(col, vec![1, 1, 2, 0]);
}

#[test]
fn gen_linear_rejects_bad_parameters() {
    let f = Field::of_order(5).unwrap();
    assert!(matches!(
        gen_linear(&f, 1, 3),
        Err(HashFamilyError::AlphaOutOfRange { .. })
    ));
    assert!(matches!(
        gen_linear(&f, 6, 3),
        Err(HashFamilyError::AlphaOutOfRange { .. })
    ));
    assert!(matches!(
        gen_linear(&f, 2, 7),
        Err(HashFamilyError::TooManyRows { .. })
    ));
    assert!(matches!(
        gen_linear(&f, 2, 0),
        Err(HashFamilyError::TooManyRows { .. })
    ));
}

#[test]
fn linear_family_separates_all_split_shapes() {
    // q^α ≤ 25, so every check is exhaustive.
    for (q, alpha, t) in [(5, 2, 2usize), (5, 2, 3), (4, 2, 3), (3, 2, 2)] {
        let f = Field::of_order(q).unwrap();
        let m = linear_row_requirement(alpha, t.div_ceil(2), (t + 2) / 2);
        let p = gen_linear(&f, alpha, m.min(q as usize + 1)).unwrap();
        if m > q as usize + 1 {
            continue;
        }
        let shapes: Vec<PartitionShape> = (1..=t)
            .map(|w| PartitionShape::unmarked(&[w, t + 1 - w]).unwrap())
            .collect();
        assert_eq!(
            check_separating(&p, &shapes, &opts()).unwrap(),
            Verdict::Holds,
            "q={q} t={t}"
        );
    }
}

#[test]
fn linear_separations_occur_in_many_rows() {
    let f = Field::of_order(7).unwrap();
    let alpha = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (w1, w2) in [(1, 1), (1, 2), (2, 2), (1, 3)] {
        let m = 8;
        let p = gen_linear(&f, alpha, m).unwrap();
        let floor = m - (alpha - 1) * w1 * w2;
        let cols: Vec<usize> = (0..p.cols()).collect();
        for _ in 0..200 {
            let pick: Vec<usize> = cols.choose_multiple(&mut rng, w1 + w2).copied().collect();
            let parts = [pick[..w1].to_vec(), pick[w1..].to_vec()];
            let rows = separating_rows(&p, &parts, &[false, false]);
            assert!(rows.len() >= floor, "{parts:?}: {rows:?}");
        }
    }
}

/// Random families; `lowest = 0` admits the missing symbol.
fn small_family(lowest: u32) -> impl Strategy<Value = HashFamily> {
    (1usize..4, 3usize..7, 1u32..4).prop_flat_map(move |(m, n, k)| {
        prop::collection::vec(prop::collection::vec(lowest..=k, n), m)
            .prop_map(move |rows| HashFamily::homogeneous(k, rows).unwrap())
    })
}

fn small_shape() -> impl Strategy<Value = PartitionShape> {
    prop::collection::vec((1usize..3, any::<bool>()), 1..3).prop_map(|parts| {
        let (sizes, marks): (Vec<usize>, Vec<bool>) = parts.into_iter().unzip();
        PartitionShape::new(sizes, marks).unwrap()
    })
}

proptest! {
    #[test]
    fn separating_matches_reference(p in small_family(0), s in small_shape()) {
        prop_assume!(s.total() <= p.cols());
        let v = check_separating(&p, std::slice::from_ref(&s), &opts()).unwrap();
        prop_assert!(v.is_exhaustive() || !v.holds());
        prop_assert_eq!(v.holds(), reference_separating(&p, &s));
        if let Some(w) = v.witness() {
            prop_assert!(w.confirms_failure(&p, None));
        }
    }

    #[test]
    fn perfect_matches_reference(p in small_family(1), t in 1usize..4) {
        prop_assume!(t <= p.cols());
        let v = check_perfect(&p, t, &opts()).unwrap();
        let s = PartitionShape::unmarked(&vec![1; t]).unwrap();
        prop_assert_eq!(v.holds(), reference_separating(&p, &s));
    }

    #[test]
    fn strengthening_matches_reference(
        p in small_family(1),
        a in 1usize..3,
        b in 1usize..3,
        tau in 1usize..5,
        d in prop::collection::vec(1u32..4, 3),
    ) {
        prop_assume!(a + b <= p.cols() && tau <= p.cols());
        let d = &d[..p.rows()];
        let s = PartitionShape::unmarked(&[a, b]).unwrap();
        let v = check_strengthening(&p, d, tau, std::slice::from_ref(&s), &opts()).unwrap();
        prop_assert_eq!(v.holds(), reference_strengthening(&p, d, tau, &s));
        if let Some(w) = v.witness() {
            prop_assert!(w.confirms_failure(&p, Some(d)));
        }
    }
}

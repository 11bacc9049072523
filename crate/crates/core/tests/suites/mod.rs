use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use proptest::prelude::*;
use proptest::sample::select;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseResult, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssd::algebra::Group;
use ssd::catalog::{embedded, ingest, ingest_difference, write_design, write_difference, Catalog, DesignFile};
use ssd::constructors::{construct_t2, construct_t4};
use ssd::criteria::{aliased_pairs, coincidence_profile, f_nod_pair, f_nod_trace, fully_aliased, CoincidenceProfile};
use ssd::generators::{
    dm_kronecker, dm_linear, dm_multiplication_table, distinct_rows, rao_hamming_oa, search_equidistant,
    DifferenceMatrix, EquidistantDesign, SearchBudget,
};
use ssd::matrix::{
    column_sum, induced_matrix, kronecker_product, kronecker_sum, mixed_combine, permutation_matrix, Column,
    DesignMatrix, GramMatrix, LevelColumn, Matrix,
};
use ssd::verify::{certify_chisq, certify_efnod, check_nonorthogonality_bound, full_report, BoundMode};

type Q = Ratio<i128>;

const SEED: [u8; 32] = *b"ssd property suites, seed 0007!!";

fn run<S>(cases: u32, strategy: S, test: impl Fn(S::Value) -> TestCaseResult)
where
    S: Strategy,
    S::Value: std::fmt::Debug,
{
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED));
    if let Err(e) = runner.run(&strategy, test) {
        panic!("{e}");
    }
}

// ---------------------------------------------------------------- oracles

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn plain(n: usize, q: u32) -> Vec<u32> {
    (0..n).map(|i| i as u32 % q).collect()
}

fn balanced(n: usize, q: u32) -> impl Strategy<Value = Vec<u32>> {
    Just(plain(n, q)).prop_shuffle()
}

/// Every balanced `q`-level column of length `n`.
fn all_balanced(n: usize, q: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, q: u32, left: &mut Vec<usize>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..q {
            if left[v as usize] > 0 {
                left[v as usize] -= 1;
                cur.push(v);
                go(n, q, left, cur, out);
                cur.pop();
                left[v as usize] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(n, q, &mut vec![n / q as usize; q as usize], &mut Vec::new(), &mut out);
    out
}

fn permutations(q: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..q {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..q).filter(|v| !p.contains(v)).map(|v| [p.clone(), vec![v]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Brute force: `b` is `a` with its levels renamed.
fn relabelled(a: &[u32], b: &[u32], perms: &[Vec<u32>]) -> bool {
    perms.iter().any(|p| a.iter().zip(b).all(|(&x, &y)| p[x as usize] == y))
}

/// Squared deviation of the contingency table from uniform, cell by cell.
fn oracle_fnod(a: &[u32], qa: u32, b: &[u32], qb: u32) -> Q {
    let mut t = vec![0i128; (qa * qb) as usize];
    for (&x, &y) in a.iter().zip(b) {
        t[(x * qb + y) as usize] += 1;
    }
    let mean = Q::new(a.len() as i128, (qa * qb) as i128);
    t.into_iter().map(|c| (Q::from_integer(c) - mean) * (Q::from_integer(c) - mean)).sum()
}

fn oracle_mixed(a: &[u32], b: &[u32], qb: u32) -> Vec<u32> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| qb * x + y)).collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            out.set(i, j, (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum());
        }
    }
    out
}

/// `(lambda, omega)` for every row pair `s < t`.
fn oracle_coincidences(f: &DesignMatrix) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for s in 0..f.n() {
        for t in s + 1..f.n() {
            let (mut l, mut w) = (0, 0);
            for j in 0..f.m() {
                if f.get(s, j) == f.get(t, j) {
                    l += 1;
                    w += f.levels()[j] as u64;
                }
            }
            out.push((l, w));
        }
    }
    out
}

type Counts = Vec<(u64, u64)>;

fn value_counts(p: &CoincidenceProfile) -> (Counts, Counts) {
    (
        p.lambda.iter().map(|(v, s)| (*v, s.count)).collect(),
        p.omega.iter().map(|(v, s)| (*v, s.count)).collect(),
    )
}

fn oracle_is_dm(m: &Matrix, g: &Group) -> Option<usize> {
    let q = g.order() as usize;
    if m.rows() % q != 0 {
        return None;
    }
    let r = m.rows() / q;
    for i in 0..m.cols() {
        for j in 0..m.cols() {
            if i == j {
                continue;
            }
            let mut counts = vec![0usize; q];
            for s in 0..m.rows() {
                counts[g.sub(m.get(s, i), m.get(s, j)) as usize] += 1;
            }
            if counts.iter().any(|&c| c != r) {
                return None;
            }
        }
    }
    Some(r)
}

fn design(cols: Vec<(Vec<u32>, u32)>) -> DesignMatrix {
    DesignMatrix::from_columns(cols.into_iter().map(|(v, q)| LevelColumn::new(v, q).unwrap()).collect()).unwrap()
}

/// A random balanced design with mixed level counts.
fn random_design() -> impl Strategy<Value = DesignMatrix> {
    select(vec![6usize, 12, 18, 24]).prop_flat_map(|n| {
        let divisors: Vec<u32> = (2..=6).filter(|&q| n % q as usize == 0).collect();
        proptest::collection::vec(select(divisors), 2..7).prop_flat_map(move |qs| {
            qs.iter().map(|&q| balanced(n, q).prop_map(move |v| (v, q))).collect::<Vec<_>>().prop_map(design)
        })
    })
}

fn permute_rows(f: &DesignMatrix, perm: &[usize]) -> DesignMatrix {
    let cols = (0..f.m())
        .map(|j| (perm.iter().map(|&s| f.get(s, j)).collect(), f.levels()[j]))
        .collect();
    design(cols)
}

fn relabel_levels(f: &DesignMatrix, rng: &mut ChaCha8Rng) -> DesignMatrix {
    let cols = (0..f.m())
        .map(|j| {
            let q = f.levels()[j];
            let mut p: Vec<u32> = (0..q).collect();
            p.shuffle(rng);
            ((0..f.n()).map(|s| p[f.get(s, j) as usize]).collect(), q)
        })
        .collect();
    design(cols)
}

// ---------------------------------------------------------------- algebra

pub fn group_tables_are_latin_and_associative() {
    for q in 2..=64u32 {
        let g = Group::for_order(q).unwrap();
        for a in 0..q {
            let row: BTreeSet<u32> = (0..q).map(|b| g.add(a, b)).collect();
            let col: BTreeSet<u32> = (0..q).map(|b| g.add(b, a)).collect();
            assert_eq!(row.len(), q as usize);
            assert_eq!(col.len(), q as usize);
            for b in 0..q {
                for c in 0..q {
                    assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)));
                }
            }
        }
    }
}

// ---------------------------------------------------------------- matrix core

pub fn gram_rows_and_trace() {
    run(300, (2u32..=6, 1usize..=6).prop_flat_map(|(q, k)| balanced(q as usize * k, q).prop_map(move |v| (v, q))), |(v, q)| {
        let g = GramMatrix::of(Column::new(&v, q)).to_matrix();
        let n = v.len();
        for i in 0..n {
            prop_assert_eq!((0..n).map(|j| g.get(i, j)).sum::<u32>() as usize, n / q as usize);
        }
        prop_assert_eq!((0..n).map(|i| g.get(i, i)).sum::<u32>() as usize, n);
        let x = induced_matrix(Column::new(&v, q)).unwrap().materialize();
        prop_assert_eq!(matmul(&x, &x.transpose()), g);
        Ok(())
    });
}

pub fn induced_matrix_of_group_sum() {
    for q in 2..=5u32 {
        let g = Group::for_order(q).unwrap();
        let blocks: Vec<Matrix> = (0..q).map(|i| permutation_matrix(&g, i).unwrap()).collect();
        let p = Matrix::vstack(&blocks.iter().collect::<Vec<_>>()).unwrap();
        let lengths: Vec<usize> = (1..=12 / q as usize).map(|k| k * q as usize).collect();
        for &n1 in &lengths {
            for &n2 in &lengths {
                if n1 * n2 > 12 * q as usize {
                    continue;
                }
                let mut rng = ChaCha8Rng::seed_from_u64((q as u64) << 16 | (n1 as u64) << 8 | n2 as u64);
                for _ in 0..20 {
                    let mut f1 = plain(n1, q);
                    let mut f2 = plain(n2, q);
                    f1.shuffle(&mut rng);
                    f2.shuffle(&mut rng);
                    let x1 = induced_matrix(Column::new(&f1, q)).unwrap().materialize();
                    let x2 = induced_matrix(Column::new(&f2, q)).unwrap().materialize();
                    let sum = column_sum(&f1, &f2, &g);
                    let lhs = induced_matrix(Column::new(&sum, q)).unwrap().materialize();
                    assert_eq!(lhs, matmul(&kronecker_product(&x1, &x2), &p));
                }
            }
        }
    }
}

pub fn kronecker_sum_commutes_up_to_permutation() {
    run(200, (2u32..=5, 1usize..=4, 1usize..=4, 1usize..=4, 1usize..=4, any::<u64>()), |(q, ra, ca, rb, cb, seed)| {
        let g = Group::for_order(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::new(ra, ca, (0..ra * ca).map(|_| rng.gen_range(0..q)).collect()).unwrap();
        let b = Matrix::new(rb, cb, (0..rb * cb).map(|_| rng.gen_range(0..q)).collect()).unwrap();
        let ab = kronecker_sum(&a, &b, &g).unwrap();
        let ba = kronecker_sum(&b, &a, &g).unwrap();
        let mut canon_ab: Vec<Vec<u32>> = (0..ab.rows()).map(|i| ab.row(i).to_vec()).collect();
        let mut canon_ba: Vec<Vec<u32>> = (0..ba.rows())
            .map(|i| {
                let (bi, ai) = (i / ra, i % ra);
                let row = ba.row(bi * ra + ai);
                (0..ab.cols()).map(|j| row[(j % cb) * ca + j / cb]).collect()
            })
            .collect();
        // rows of ba re-indexed a-major agree exactly with ab
        let reindexed: Vec<Vec<u32>> = (0..ab.rows())
            .map(|i| {
                let (ai, bi) = (i / rb, i % rb);
                let row = ba.row(bi * ra + ai);
                (0..ab.cols()).map(|j| row[(j % cb) * ca + j / cb]).collect()
            })
            .collect();
        prop_assert_eq!(&reindexed, &canon_ab);
        canon_ab.sort();
        canon_ba.sort();
        prop_assert_eq!(canon_ab, canon_ba);
        Ok(())
    });
}

pub fn mixed_gram_is_kronecker_of_grams() {
    let s = (2u32..=4, 2u32..=4, 1usize..=3, 1usize..=3).prop_flat_map(|(q1, q2, k1, k2)| {
        (balanced(q1 as usize * k1, q1), balanced(q2 as usize * k2, q2)).prop_map(move |(a, b)| (a, q1, b, q2))
    });
    run(200, s, |(a, q1, b, q2)| {
        let h = mixed_combine(Column::new(&a, q1), Column::new(&b, q2)).unwrap();
        let lhs = GramMatrix::of(h.view()).to_matrix();
        let rhs = kronecker_product(&GramMatrix::of(Column::new(&a, q1)).to_matrix(), &GramMatrix::of(Column::new(&b, q2)).to_matrix());
        prop_assert_eq!(lhs, rhs);
        Ok(())
    });
}

pub fn mixed_combine_levels_are_uniform() {
    for q1 in 2..=18u32 {
        for q2 in 2..=18u32 {
            if q1 * q2 > 36 {
                continue;
            }
            for (k1, k2) in [(1, 1), (2, 1), (1, 3)] {
                let mut rng = ChaCha8Rng::seed_from_u64((q1 * 100 + q2) as u64);
                let mut a = plain(q1 as usize * k1, q1);
                let mut b = plain(q2 as usize * k2, q2);
                a.shuffle(&mut rng);
                b.shuffle(&mut rng);
                let h = mixed_combine(Column::new(&a, q1), Column::new(&b, q2)).unwrap();
                assert_eq!(h.levels, q1 * q2);
                assert_eq!(h.values, oracle_mixed(&a, &b, q2));
                let mut counts = vec![0usize; (q1 * q2) as usize];
                h.values.iter().for_each(|&v| counts[v as usize] += 1);
                assert!(counts.iter().all(|&c| c == k1 * k2), "q1 {q1} q2 {q2}: {counts:?}");
            }
        }
    }
}

// ---------------------------------------------------------------- criteria

pub fn trace_identity() {
    let s = (2u32..=6, 2u32..=6).prop_flat_map(|(qa, qb)| {
        let l = lcm(qa as usize, qb as usize);
        (1..=36 / l).prop_flat_map(move |k| (balanced(l * k, qa), balanced(l * k, qb)).prop_map(move |(a, b)| (a, qa, b, qb)))
    });
    run(1000, s, |(a, qa, b, qb)| {
        let (ca, cb) = (Column::new(&a, qa), Column::new(&b, qb));
        let direct = f_nod_pair(ca, cb).unwrap();
        prop_assert_eq!(direct, f_nod_trace(ca, cb).unwrap());
        prop_assert_eq!(direct, oracle_fnod(&a, qa, &b, qb));
        prop_assert_eq!(f_nod_pair(cb, ca).unwrap(), direct);
        Ok(())
    });
}

pub fn aliasing_matches_brute_force() {
    for q in 2..=3u32 {
        let perms = permutations(q);
        for n in (q as usize..=8).step_by(q as usize) {
            let cols = all_balanced(n, q);
            for a in &cols {
                for b in &cols {
                    assert_eq!(
                        fully_aliased(Column::new(a, q), Column::new(b, q)),
                        relabelled(a, b, &perms),
                        "{a:?} {b:?}"
                    );
                }
            }
        }
    }
    for a in all_balanced(6, 2) {
        for b in all_balanced(6, 3) {
            assert!(!fully_aliased(Column::new(&a, 2), Column::new(&b, 3)));
        }
    }
}

/// Small `(n, q)` column families used by the exhaustive aliasing tests.
fn families() -> Vec<(usize, u32, Vec<Vec<u32>>)> {
    [(2, 2), (4, 2), (3, 3), (6, 2)].iter().map(|&(n, q)| (n, q, all_balanced(n, q))).collect()
}

pub fn group_sum_aliasing_implies_component_aliasing() {
    for (n1, q, c1) in families() {
        for (n2, q2, c2) in families() {
            if q2 != q || n1 * n2 > 12 {
                continue;
            }
            let g = Group::for_order(q).unwrap();
            for f1 in &c1 {
                for f3 in &c1 {
                    for f2 in &c2 {
                        for f4 in &c2 {
                            let h1 = column_sum(f1, f2, &g);
                            let h2 = column_sum(f3, f4, &g);
                            if fully_aliased(Column::new(&h1, q), Column::new(&h2, q)) {
                                assert!(fully_aliased(Column::new(f1, q), Column::new(f3, q)));
                                assert!(fully_aliased(Column::new(f2, q), Column::new(f4, q)));
                            }
                        }
                    }
                }
            }
        }
    }
}

pub fn mixed_aliasing_iff_component_aliasing() {
    for (_, q1, c1) in families() {
        for (_, q2, c2) in families() {
            if c1.len() * c2.len() > 120 {
                continue;
            }
            let a1: Vec<Vec<bool>> = c1.iter().map(|x| c1.iter().map(|y| fully_aliased(Column::new(x, q1), Column::new(y, q1))).collect()).collect();
            let a2: Vec<Vec<bool>> = c2.iter().map(|x| c2.iter().map(|y| fully_aliased(Column::new(x, q2), Column::new(y, q2))).collect()).collect();
            let mixed: Vec<Vec<LevelColumn>> = c1
                .iter()
                .map(|x| c2.iter().map(|y| mixed_combine(Column::new(x, q1), Column::new(y, q2)).unwrap()).collect())
                .collect();
            for i1 in 0..c1.len() {
                for i3 in 0..c1.len() {
                    for i2 in 0..c2.len() {
                        for i4 in 0..c2.len() {
                            let got = fully_aliased(mixed[i1][i2].view(), mixed[i3][i4].view());
                            assert_eq!(got, a1[i1][i3] && a2[i2][i4]);
                        }
                    }
                }
            }
        }
    }
}

pub fn mixed_never_aliased_with_group_sum() {
    let c2 = all_balanced(4, 2);
    let c4 = all_balanced(4, 4);
    let g = Group::for_order(4).unwrap();
    for f1 in &c2 {
        for f2 in &c2 {
            let h1 = mixed_combine(Column::new(f1, 2), Column::new(f2, 2)).unwrap();
            for f3 in &c4 {
                for f4 in &c4 {
                    let h2 = column_sum(f3, f4, &g);
                    assert!(!fully_aliased(h1.view(), Column::new(&h2, 4)));
                }
            }
        }
    }
    let s = (balanced(6, 2), balanced(6, 3), balanced(6, 6), balanced(6, 6));
    run(300, s, |(f1, f2, f3, f4)| {
        let g = Group::for_order(6).unwrap();
        let h1 = mixed_combine(Column::new(&f1, 2), Column::new(&f2, 3)).unwrap();
        let h2 = column_sum(&f3, &f4, &g);
        prop_assert!(!fully_aliased(h1.view(), Column::new(&h2, 6)));
        Ok(())
    });
}

pub fn coincidence_profile_properties() {
    run(300, random_design(), |f| {
        let pairs = oracle_coincidences(&f);
        let (qmin, qmax) = (*f.levels().iter().min().unwrap() as u64, *f.levels().iter().max().unwrap() as u64);
        let mut lambda: BTreeMap<u64, u64> = BTreeMap::new();
        let mut omega: BTreeMap<u64, u64> = BTreeMap::new();
        for &(l, w) in &pairs {
            prop_assert!(w >= l * qmin && w <= l * qmax);
            *lambda.entry(l).or_default() += 1;
            *omega.entry(w).or_default() += 1;
        }
        let p = coincidence_profile(&f);
        let (pl, pw) = value_counts(&p);
        prop_assert_eq!(pl, lambda.into_iter().collect::<Vec<_>>());
        prop_assert_eq!(pw, omega.into_iter().collect::<Vec<_>>());
        // each column contributes q * C(n/q, 2) coinciding pairs
        let n = f.n() as u64;
        let expected: u64 = f.levels().iter().map(|&q| q as u64 * (n / q as u64) * (n / q as u64 - 1) / 2).sum();
        prop_assert_eq!(p.lambda_sum(), expected);
        prop_assert_eq!(p.pair_count(), n * (n - 1) / 2);
        Ok(())
    });
}

// ---------------------------------------------------------------- verify

pub fn certificates_ignore_row_order_and_level_labels() {
    run(200, (random_design(), any::<u64>()), |(f, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..f.n()).collect();
        perm.shuffle(&mut rng);
        let base = coincidence_profile(&f);
        let aliased = aliased_pairs(&f);
        for g in [permute_rows(&f, &perm), relabel_levels(&f, &mut rng)] {
            prop_assert_eq!(value_counts(&coincidence_profile(&g)), value_counts(&base));
            prop_assert_eq!(certify_efnod(&g).is_granted(), certify_efnod(&f).is_granted());
            prop_assert_eq!(certify_chisq(&g).is_granted(), certify_chisq(&f).is_granted());
            prop_assert_eq!(aliased_pairs(&g), aliased.clone());
        }
        let r = full_report(&f).unwrap();
        let m = f.m() as i128;
        let mut sum = Q::from_integer(0);
        let mut weighted = Q::from_integer(0);
        for i in 0..f.m() {
            for j in i + 1..f.m() {
                let (qi, qj) = (f.levels()[i], f.levels()[j]);
                let v = oracle_fnod(f.column(i).values, qi, f.column(j).values, qj);
                sum += v;
                weighted += v * Q::from_integer((qi * qj) as i128);
            }
        }
        prop_assert_eq!(r.efnod, sum * Q::new(2, m * (m - 1)));
        prop_assert_eq!(r.chisq, weighted / Q::from_integer(f.n() as i128));
        Ok(())
    });
}

#[derive(Debug, Clone)]
struct Quad {
    mode: BoundMode,
    f: [(Vec<u32>, u32); 4],
}

fn quadruples() -> impl Strategy<Value = Quad> {
    (0u8..3, 2u32..=4, 2u32..=4, 2u32..=4, 2u32..=4).prop_flat_map(|(mode, q1, q2, q3, q4)| {
        let (mode, q2, q4) = match mode {
            0 => (BoundMode::A, q2, q4),
            1 => (BoundMode::B, q1, q3),
            _ => (BoundMode::C, q1, q4),
        };
        let l1 = lcm(q1 as usize, q3 as usize);
        let l2 = lcm(q2 as usize, q4 as usize);
        (1..=12 / l1, 1..=12 / l2).prop_flat_map(move |(k1, k2)| {
            let (n1, n2) = (l1 * k1, l2 * k2);
            (balanced(n1, q1), balanced(n2, q2), balanced(n1, q3), balanced(n2, q4))
                .prop_map(move |(a, b, c, d)| Quad { mode, f: [(a, q1), (b, q2), (c, q3), (d, q4)] })
        })
    })
}

pub fn nonorthogonality_bounds() {
    run(1000, quadruples(), |quad| {
        let [(f1, q1), (f2, q2), (f3, q3), (f4, q4)] = &quad.f;
        let (q1, q2, q3, q4) = (*q1, *q2, *q3, *q4);
        fn col(v: &[u32], q: u32) -> Column<'_> {
            Column::new(v, q)
        }
        let check = check_nonorthogonality_bound(col(f1, q1), col(f2, q2), col(f3, q3), col(f4, q4), quad.mode).unwrap();
        let a = oracle_fnod(f1, q1, f3, q3);
        let b = oracle_fnod(f2, q2, f4, q4);
        let r = |x: usize| Q::from_integer(x as i128);
        let (n1, n2) = (r(f1.len()), r(f2.len()));
        let (rq1, rq2, rq3, rq4) = (r(q1 as usize), r(q2 as usize), r(q3 as usize), r(q4 as usize));
        let sum = |x: &[u32], y: &[u32], q: u32| column_sum(x, y, &Group::for_order(q).unwrap());
        let (lhs, rhs) = match quad.mode {
            BoundMode::A => (
                oracle_fnod(&oracle_mixed(f1, f2, q2), q1 * q2, &oracle_mixed(f3, f4, q4), q3 * q4),
                a * b + n2 * n2 / (rq2 * rq4) * a + n1 * n1 / (rq1 * rq3) * b,
            ),
            BoundMode::B => (
                oracle_fnod(&sum(f1, f2, q1), q1, &sum(f3, f4, q3), q3),
                rq1 * rq3 * a * b + (n2 * n2 * a).min(n1 * n1 * b),
            ),
            BoundMode::C => (
                oracle_fnod(&sum(f1, f2, q1), q1, &oracle_mixed(f3, f4, q4), q3 * q4),
                rq1 * a * b + (n2 * n2 / rq4 * a).min(n1 * n1 / rq3 * b),
            ),
        };
        prop_assert_eq!(check.lhs, lhs);
        prop_assert_eq!(check.rhs, rhs);
        match quad.mode {
            BoundMode::A => prop_assert_eq!(lhs, rhs),
            _ => {
                prop_assert!(lhs <= rhs, "{:?}: {} > {}", quad.mode, lhs, rhs);
                prop_assert_eq!(lhs == rhs, a == Q::from_integer(0) || b == Q::from_integer(0));
            }
        }
        prop_assert!(check.consistent());
        // orthogonal components stay orthogonal after combination
        if a == Q::from_integer(0) && b == Q::from_integer(0) {
            prop_assert_eq!(lhs, Q::from_integer(0));
        }
        if quad.mode != BoundMode::A && (a == Q::from_integer(0) || b == Q::from_integer(0)) && rhs == Q::from_integer(0) {
            prop_assert_eq!(lhs, Q::from_integer(0));
        }
        Ok(())
    });
}

// ---------------------------------------------------------------- generators

pub fn rao_hamming_arrays_are_uniform() {
    for (q, t) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2), (7, 2), (8, 2), (9, 2)] {
        let f = rao_hamming_oa(q, t).unwrap();
        let n = f.n();
        assert_eq!(n, (q as usize).pow(t));
        assert_eq!(f.m(), (n - 1) / (q as usize - 1));
        for i in 0..f.m() {
            for j in i + 1..f.m() {
                let cells = oracle_fnod(f.column(i).values, q, f.column(j).values, q);
                assert_eq!(cells, Q::from_integer(0), "q {q} t {t} columns {i} {j}");
            }
        }
        let lambda: BTreeSet<u64> = oracle_coincidences(&f).into_iter().map(|p| p.0).collect();
        assert_eq!(lambda.into_iter().collect::<Vec<_>>(), vec![(f.m() as u64 - 1) / q as u64]);
    }
}

/// Difference matrices for each group order up to 7, some of them not normalized.
fn dm_pool(q: u32) -> Vec<DifferenceMatrix> {
    let g = Group::for_order(q).unwrap();
    let trivial = Matrix::from_columns(&[vec![0; q as usize], (0..q).collect()]).unwrap();
    let mut out = vec![DifferenceMatrix::new(trivial, g.clone()).unwrap()];
    if let Ok(d) = dm_multiplication_table(q) {
        let shifted: Vec<Vec<u32>> = (0..d.cols()).map(|j| d.matrix().column(j).iter().map(|&v| g.add(v, j as u32 % q)).collect()).collect();
        out.push(DifferenceMatrix::new(Matrix::from_columns(&shifted).unwrap(), g.clone()).unwrap());
        out.push(d);
    }
    if q <= 3 {
        out.push(dm_linear(q, 2).unwrap());
    }
    out
}

pub fn dm_kronecker_closure() {
    for q in 2..=7u32 {
        let pool = dm_pool(q);
        for d1 in &pool {
            for d2 in &pool {
                let k = dm_kronecker(d1, d2).unwrap();
                assert_eq!(k.rows(), d1.rows() * d2.rows());
                assert_eq!(k.cols(), d1.cols() * d2.cols());
                assert_eq!(k.r(), d1.r() * d2.r() * q as usize);
                assert_eq!(oracle_is_dm(k.matrix(), k.group()), Some(k.r()), "q {q}");
            }
        }
    }
}

pub fn searched_designs_are_equidistant() {
    for (n, m, q) in [(4, 3, 2), (6, 5, 3), (6, 10, 3), (6, 10, 2), (8, 7, 2), (8, 14, 2), (9, 4, 3), (10, 9, 5)] {
        let lambda = (m * (n / q - 1) / (n - 1)) as u64;
        let found = search_equidistant(n, m, q as u32, lambda, true, SearchBudget::default(), 7)
            .unwrap()
            .found()
            .unwrap_or_else(|| panic!("F({n}, {q}^{m}) not found"));
        let f = found.design();
        assert_eq!((f.n(), f.m()), (n, m));
        assert!(oracle_coincidences(f).iter().all(|p| p.0 == lambda));
        for i in 0..m {
            for j in i + 1..m {
                assert!(!relabelled(f.column(i).values, f.column(j).values, &permutations(q as u32)));
            }
        }
    }
}

// ---------------------------------------------------------------- constructors

fn source_pool() -> Vec<EquidistantDesign> {
    let mut out: Vec<EquidistantDesign> = [(2, 2), (2, 3), (3, 2), (4, 2), (5, 2)]
        .iter()
        .map(|&(q, t)| EquidistantDesign::certify(rao_hamming_oa(q, t).unwrap()).unwrap())
        .collect();
    out.push(EquidistantDesign::certify(embedded("table4_f2").unwrap().design().unwrap()).unwrap());
    out.push(search_equidistant(6, 10, 2, 4, true, SearchBudget::default(), 7).unwrap().found().unwrap());
    out
}

/// Shuffles rows, columns and level labels; the result is still equidistant.
fn disguise(f: &EquidistantDesign, rng: &mut ChaCha8Rng) -> EquidistantDesign {
    let mut perm: Vec<usize> = (0..f.n()).collect();
    perm.shuffle(rng);
    let g = relabel_levels(&permute_rows(f.design(), &perm), rng);
    let mut cols: Vec<usize> = (0..g.m()).collect();
    cols.shuffle(rng);
    EquidistantDesign::certify(g.select_columns(&cols).unwrap()).unwrap()
}

/// A normalized difference matrix with distinct rows over `q` levels, rows shuffled.
fn random_nd(q: u32, rng: &mut ChaCha8Rng) -> Option<DifferenceMatrix> {
    let mut pool: Vec<DifferenceMatrix> = vec![dm_multiplication_table(q).ok()?];
    if q <= 4 {
        pool.push(dm_linear(q, 2).unwrap());
    }
    if q <= 3 {
        let m = dm_multiplication_table(q).unwrap();
        pool.push(dm_kronecker(&m, &m).unwrap());
    }
    let d = pool.choose(rng).unwrap();
    for _ in 0..20 {
        let c = rng.gen_range(2..=d.cols());
        let mut rest: Vec<usize> = (1..d.cols()).collect();
        rest.shuffle(rng);
        let mut idx = vec![0];
        idx.extend(&rest[..c - 1]);
        let sub = d.select_columns(&idx).unwrap();
        if distinct_rows(&sub) {
            let mut rows: Vec<usize> = (0..sub.rows()).collect();
            rows.shuffle(rng);
            let m = sub.matrix().select_rows(&rows).unwrap();
            return Some(DifferenceMatrix::new(m, sub.group().clone()).unwrap());
        }
    }
    None
}

pub fn constructions_stay_within_predicted_values() {
    let pool = source_pool();
    run(200, (0..pool.len(), 0..pool.len(), any::<u64>()), |(i, j, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = disguise(&pool[i], &mut rng);
        let q = f.q().unwrap();
        if let Some(d) = random_nd(q, &mut rng) {
            let c = construct_t2(&f, &d).unwrap();
            let (m, r, lambda) = (f.m() as u64, d.r() as u64, f.lambda());
            let allowed = [m * r, lambda * r * q as u64];
            for (l, _) in oracle_coincidences(&c.design) {
                prop_assert!(allowed.contains(&l), "lambda {} outside {:?}", l, allowed);
            }
            prop_assert!(c.report.aliased_pairs.is_empty());
            prop_assert_eq!(c.efnod_certified(), certify_efnod(&c.design).is_granted());
            prop_assert_eq!(c.chisq_certified(), certify_chisq(&c.design).is_granted());
        }
        let f2 = disguise(&pool[j], &mut rng);
        let c = construct_t4(&f, &f2).unwrap();
        let (l1, l2, m1, m2) = (f.lambda(), f2.lambda(), f.m() as u64, f2.m() as u64);
        let allowed = [l1 * m2, l2 * m1, l1 * l2];
        for (l, _) in oracle_coincidences(&c.design) {
            prop_assert!(allowed.contains(&l), "lambda {} outside {:?}", l, allowed);
        }
        prop_assert_eq!(c.efnod_certified(), certify_efnod(&c.design).is_granted());
        Ok(())
    });
}

// ---------------------------------------------------------------- files

pub fn export_then_ingest_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    run(100, random_design(), move |f| {
        let path = root.join("d.design");
        write_design(&path, &f, &["note: random".to_string()]).unwrap();
        let back = ingest(&path).unwrap();
        prop_assert_eq!(&back.design, &f);
        let text = std::fs::read_to_string(&path).unwrap();
        prop_assert_eq!(DesignFile::parse(&text, "d.design").unwrap().render(), text);
        Ok(())
    });
    for q in [2, 3, 4, 5] {
        let d = dm_multiplication_table(q).unwrap();
        let path = dir.path().join(format!("nd{q}.design"));
        write_difference(&path, &d, &[]).unwrap();
        let back = ingest_difference(&path).unwrap();
        assert_eq!(back.matrix(), d.matrix());
        assert_eq!(back.group(), d.group());
    }
}

pub fn catalog_round_trips() {
    let cat = Catalog::builtin();
    let text = cat.to_toml().unwrap();
    let back = Catalog::from_toml(&text).unwrap();
    assert_eq!(back, cat);
    assert_eq!(back.to_toml().unwrap(), text);
}

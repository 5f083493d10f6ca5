//! Exact linear algebra: Smith normal form over Z/d (with transforms),
//! linear solving over Z/d, and rank/nullspace over prime fields.
//!
//! Working modulo d keeps every entry below d, so there is no coefficient
//! growth. Z/d is a principal ideal ring, and the 2×2 unimodular gcd steps
//! used over Z remain valid after reduction.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::grp::gcd;

pub type Mat = Vec<Vec<u64>>;

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| (i == j) as u64).collect()).collect()
}

/// Extended gcd on nonnegative integers: `(g, s, t)` with `s·a + t·b = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - (a.div_euclid(b)) * t)
    }
}

/// Solves `a·x ≡ b (mod d)` for one solution, if any.
pub fn div_mod(a: u64, b: u64, d: u64) -> Option<u64> {
    let g = gcd(a % d, d);
    if !b.is_multiple_of(g) {
        return None;
    }
    let (d2, a2, b2) = (d / g, (a % d) / g, b / g);
    if d2 == 1 {
        return Some(0);
    }
    let inv = inv_mod(a2 % d2, d2)?;
    Some((b2 % d2) * inv % d2)
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, s, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(s.rem_euclid(m as i128) as u64)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Result of `P·A·Q = D` over Z/d. `diag[i]` is the i-th diagonal entry for
/// `i < min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub modulus: u64,
    pub rows: usize,
    pub cols: usize,
    pub diag: Vec<u64>,
    pub left: Option<Mat>,
    pub left_inv: Option<Mat>,
    pub right: Option<Mat>,
    pub right_inv: Option<Mat>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Track {
    pub left: bool,
    pub right: bool,
}

struct Work {
    d: i128,
    a: Vec<Vec<i128>>,
    p: Option<Vec<Vec<i128>>>,
    pinv: Option<Vec<Vec<i128>>>,
    q: Option<Vec<Vec<i128>>>,
    qinv: Option<Vec<Vec<i128>>>,
}

fn ident_i(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

/// `(x, y) ← (m00 x + m01 y, m10 x + m11 y)` on two rows of `m`.
fn rows_combine(mat: &mut [Vec<i128>], i: usize, j: usize, m: [i128; 4], d: i128) {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let (a, b) = mat.split_at_mut(hi);
    let (ri, rj) = if i < j { (&mut a[lo], &mut b[0]) } else { (&mut b[0], &mut a[lo]) };
    for k in 0..ri.len() {
        let (x, y) = (ri[k], rj[k]);
        if x == 0 && y == 0 {
            continue;
        }
        ri[k] = (m[0] * x + m[1] * y).rem_euclid(d);
        rj[k] = (m[2] * x + m[3] * y).rem_euclid(d);
    }
}

/// Column version: `(col_i, col_j) ← (m00 col_i + m10 col_j, m01 col_i + m11 col_j)`.
fn cols_combine(mat: &mut [Vec<i128>], i: usize, j: usize, m: [i128; 4], d: i128) {
    for row in mat.iter_mut() {
        let (x, y) = (row[i], row[j]);
        if x == 0 && y == 0 {
            continue;
        }
        row[i] = (m[0] * x + m[2] * y).rem_euclid(d);
        row[j] = (m[1] * x + m[3] * y).rem_euclid(d);
    }
}

impl Work {
    /// Row transform `M` (det 1) on rows t, i of A and P; inverse on P⁻¹ columns.
    fn row_op(&mut self, t: usize, i: usize, m: [i128; 4]) {
        let d = self.d;
        rows_combine(&mut self.a, t, i, m, d);
        if let Some(p) = &mut self.p {
            rows_combine(p, t, i, m, d);
        }
        if let Some(pi) = &mut self.pinv {
            // P⁻¹ ← P⁻¹ M⁻¹, M⁻¹ = [m11, -m01; -m10, m00] acting on columns t, i.
            let inv = [m[3], -m[1], -m[2], m[0]];
            cols_combine(pi, t, i, inv, d);
        }
    }

    fn col_op(&mut self, t: usize, j: usize, m: [i128; 4]) {
        let d = self.d;
        cols_combine(&mut self.a, t, j, m, d);
        if let Some(q) = &mut self.q {
            cols_combine(q, t, j, m, d);
        }
        if let Some(qi) = &mut self.qinv {
            let inv = [m[3], -m[1], -m[2], m[0]];
            rows_combine(qi, t, j, inv, d);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.a.swap(a, b);
        if let Some(p) = &mut self.p {
            p.swap(a, b);
        }
        if let Some(pi) = &mut self.pinv {
            for r in pi.iter_mut() {
                r.swap(a, b);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in self.a.iter_mut() {
            r.swap(a, b);
        }
        if let Some(q) = &mut self.q {
            for r in q.iter_mut() {
                r.swap(a, b);
            }
        }
        if let Some(qi) = &mut self.qinv {
            qi.swap(a, b);
        }
    }
}

fn ideal(x: i128, d: i128) -> i128 {
    gcd(x as u64, d as u64) as i128
}

/// Smith-type diagonalization over Z/d. The diagonal is not normalized to a
/// divisibility chain; callers only use the individual entries.
pub fn snf_mod(a: &Mat, d: u64, track: Track) -> Snf {
    assert!(d >= 1);
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let di = d as i128;
    let mut w = Work {
        d: di,
        a: a.iter().map(|r| r.iter().map(|&x| (x % d) as i128).collect()).collect(),
        p: track.left.then(|| ident_i(rows)),
        pinv: track.left.then(|| ident_i(rows)),
        q: track.right.then(|| ident_i(cols)),
        qinv: track.right.then(|| ident_i(cols)),
    };
    let n = rows.min(cols);
    let mut diag = vec![0u64; n];
    for t in 0..n {
        // Pivot: nonzero entry generating the largest ideal.
        let mut best: Option<(usize, usize, i128)> = None;
        'search: for j in t..cols {
            for i in t..rows {
                let x = w.a[i][j];
                if x != 0 {
                    let g = ideal(x, di);
                    if best.is_none_or(|(_, _, bg)| g < bg) {
                        best = Some((i, j, g));
                        if g == 1 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                let b = w.a[i][t];
                if b == 0 {
                    continue;
                }
                let p = w.a[t][t];
                if let Some(q) = div_mod(p as u64, b as u64, d) {
                    w.row_op(t, i, [1, 0, -(q as i128), 1]);
                } else {
                    let (g, s, x) = ext_gcd(p, b);
                    w.row_op(t, i, [s, x, -b / g, p / g]);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let b = w.a[t][j];
                if b == 0 {
                    continue;
                }
                let p = w.a[t][t];
                if let Some(q) = div_mod(p as u64, b as u64, d) {
                    w.col_op(t, j, [1, -(q as i128), 0, 1]);
                } else {
                    let (g, s, x) = ext_gcd(p, b);
                    w.col_op(t, j, [s, -b / g, x, p / g]);
                    dirty = true;
                }
            }
            if !dirty && (t + 1..rows).all(|i| w.a[i][t] == 0) {
                break;
            }
        }
        diag[t] = w.a[t][t] as u64;
    }
    let conv = |m: Option<Vec<Vec<i128>>>| m.map(|m| m.into_iter().map(|r| r.into_iter().map(|x| x as u64).collect()).collect());
    Snf {
        modulus: d,
        rows,
        cols,
        diag,
        left: conv(w.p),
        left_inv: conv(w.pinv),
        right: conv(w.q),
        right_inv: conv(w.qinv),
    }
}

pub fn mat_vec(m: &Mat, v: &[u64], d: u64) -> Vec<u64> {
    m.iter()
        .map(|r| (r.iter().zip(v).map(|(&a, &b)| a as u128 * b as u128 % d as u128).sum::<u128>() % d as u128) as u64)
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat, d: u64) -> Mat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|r| {
            (0..n)
                .map(|j| (r.iter().enumerate().map(|(k, &x)| x as u128 * b[k][j] as u128 % d as u128).sum::<u128>() % d as u128) as u64)
                .collect()
        })
        .collect()
}

/// One solution of `A x ≡ b (mod d)`, if any.
pub fn solve_mod(a: &Mat, b: &[u64], d: u64) -> Option<Vec<u64>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    if rows == 0 {
        return Some(Vec::new());
    }
    let snf = snf_mod(a, d, Track { left: true, right: true });
    let pb = mat_vec(snf.left.as_ref().unwrap(), b, d);
    let mut y = vec![0u64; cols];
    for i in 0..rows {
        let s = if i < snf.diag.len() { snf.diag[i] } else { 0 };
        if i < cols {
            y[i] = div_mod(s, pb[i], d)?;
        } else if !pb[i].is_multiple_of(d) {
            return None;
        }
    }
    Some(mat_vec(snf.right.as_ref().unwrap(), &y, d))
}

/// Generators of `{x : A x ≡ 0 (mod d)}`.
pub fn kernel_mod(a: &Mat, cols: usize, d: u64) -> Vec<Vec<u64>> {
    let snf = snf_mod(a, d, Track { left: false, right: true });
    let q = snf.right.as_ref().unwrap();
    let mut out = Vec::new();
    for i in 0..cols {
        let s = if i < snf.diag.len() { snf.diag[i] } else { 0 };
        let c = d / gcd(s, d);
        if c == d {
            continue;
        }
        out.push((0..cols).map(|r| q[r][i] * c % d).collect());
    }
    out
}

/// Least generator of F_p^×.
pub fn primitive_root(p: u64) -> Option<u64> {
    if !is_prime(p) {
        return None;
    }
    if p == 2 {
        return Some(1);
    }
    let fs = crate::grp::prime_factors(p - 1);
    (2..p).find(|&g| fs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
}

/// Least prime `p` with `m | p - 1`.
pub fn least_prime_one_mod(m: u64) -> u64 {
    let m = m.max(1);
    (1..).map(|k| k * m + 1).find(|&p| is_prime(p)).expect("Dirichlet")
}

/// Row-reduces over F_p, returning (rank, reduced rows, pivot columns).
pub fn row_reduce_fp(m: &Mat, p: u64) -> (usize, Mat, Vec<usize>) {
    let mut a: Mat = m.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = inv_mod(a[r][c], p).expect("prime field");
        for x in a[r].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (r, a, pivots)
}

pub fn rank_fp(m: &Mat, p: u64) -> usize {
    if m.is_empty() || m[0].is_empty() {
        return 0;
    }
    // Work on the shorter side for speed.
    if m.len() > m[0].len() {
        let t: Mat = (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect();
        return row_reduce_fp(&t, p).0;
    }
    row_reduce_fp(m, p).0
}

/// Rank over Q by exact Gaussian elimination.
pub fn rank_q(m: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, pr);
        let piv = a[r][c].clone();
        let pivot_row: Vec<BigRational> = a[r].iter().map(|x| x / &piv).collect();
        for row in a.iter_mut().skip(r + 1) {
            if !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Basis of `{x : M x = 0}` over F_p.
pub fn nullspace_fp(m: &Mat, cols: usize, p: u64) -> Vec<Vec<u64>> {
    let (rank, red, pivots) = row_reduce_fp(m, p);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate().take(rank) {
            v[pc] = (p - red[r][free] % p) % p;
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_snf(a: &Mat, d: u64) {
        let snf = snf_mod(a, d, Track { left: true, right: true });
        let pa = mat_mul(snf.left.as_ref().unwrap(), a, d);
        let paq = mat_mul(&pa, snf.right.as_ref().unwrap(), d);
        for (i, row) in paq.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let want = if i == j { snf.diag[i] % d } else { 0 };
                assert_eq!(x, want, "entry ({i},{j})");
            }
        }
        let id_r = mat_mul(snf.left.as_ref().unwrap(), snf.left_inv.as_ref().unwrap(), d);
        assert_eq!(id_r, identity(a.len()).iter().map(|r| r.iter().map(|x| x % d).collect()).collect::<Mat>());
        let id_c = mat_mul(snf.right.as_ref().unwrap(), snf.right_inv.as_ref().unwrap(), d);
        assert_eq!(id_c, identity(a[0].len()).iter().map(|r| r.iter().map(|x| x % d).collect()).collect::<Mat>());
    }

    #[test]
    fn snf_small() {
        check_snf(&vec![vec![2, 3], vec![4, 1]], 6);
        check_snf(&vec![vec![0, 0, 2], vec![0, 4, 0]], 8);
    }

    proptest! {
        #[test]
        fn snf_random(rows in 1usize..6, cols in 1usize..6, d in 1u64..13, seed in proptest::collection::vec(0u64..1000, 36)) {
            let a: Mat = (0..rows).map(|i| (0..cols).map(|j| seed[i * 6 + j] % d).collect()).collect();
            check_snf(&a, d);
        }

        #[test]
        fn solve_matches_bruteforce(d in 2u64..7, seed in proptest::collection::vec(0u64..100, 9), b in proptest::collection::vec(0u64..100, 3)) {
            let a: Mat = (0..3).map(|i| (0..3).map(|j| seed[i * 3 + j] % d).collect()).collect();
            let b: Vec<u64> = b.iter().map(|x| x % d).collect();
            let mut exists = false;
            for x0 in 0..d { for x1 in 0..d { for x2 in 0..d {
                if mat_vec(&a, &[x0, x1, x2], d) == b { exists = true; }
            }}}
            let sol = solve_mod(&a, &b, d);
            prop_assert_eq!(sol.is_some(), exists);
            if let Some(x) = sol { prop_assert_eq!(mat_vec(&a, &x, d), b); }
        }
    }

    #[test]
    fn fp_rank_and_nullspace() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]];
        assert_eq!(rank_fp(&m, 7), 2);
        let ns = nullspace_fp(&m, 3, 7);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&m, &ns[0], 7).iter().all(|&x| x == 0));
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(div_mod(2, 4, 6), Some(2));
        assert_eq!(div_mod(2, 3, 6), None);
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(pow_mod(3, 6, 7), 1);
        assert!(is_prime(13) && !is_prime(15));
    }
}

//! Multi-modular row reduction and integer fast paths for rational matrices.
//!
//! The reduced row echelon form is computed modulo word-sized primes, lifted by
//! Chinese remaindering and rational reconstruction, and then certified over
//! the rationals: every row of the input must be the combination of the lifted
//! rows given by its pivot entries, and some prime already showed the rank is
//! at least the number of lifted rows. A certified result is therefore the
//! unique reduced echelon form; anything that fails certification falls back
//! to fraction-free elimination.

use std::cmp::Ordering;

use rug::{Integer, Rational};

use crate::linalg::{integer_row, Echelon, Mat};

/// Below this many entries fraction-free elimination is used directly.
pub const MODULAR_THRESHOLD: usize = 48 * 48;
const MAX_PRIMES: usize = 400;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes just below `2^31`, largest first.
fn primes() -> impl Iterator<Item = u64> {
    (1u64 << 30..1u64 << 31).rev().filter(|&p| is_prime(p))
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Integer matrix with entries scaled row by row.
struct IntRows {
    rows: usize,
    cols: usize,
    data: Vec<Integer>,
}

impl IntRows {
    fn from_rational(m: &Mat<Rational>) -> Self {
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for r in 0..m.rows() {
            data.extend(integer_row(m.row(r)));
        }
        IntRows {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }

    fn reduce(&self, p: u64) -> Vec<u64> {
        self.data.iter().map(|x| x.mod_u(p as u32) as u64).collect()
    }
}

/// Reduced row echelon form modulo `p`: pivots and the pivot rows.
fn rref_mod(mut a: Vec<u64>, rows: usize, cols: usize, p: u64) -> (Vec<usize>, Vec<u64>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pr) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if pr != rank {
            for j in 0..cols {
                a.swap(pr * cols + j, rank * cols + j);
            }
        }
        let inv = inv_mod(a[rank * cols + c], p);
        for j in c..cols {
            a[rank * cols + j] = a[rank * cols + j] * inv % p;
        }
        let (head, tail) = a.split_at_mut(rank * cols);
        let (pivot_row, rest) = tail.split_at_mut(cols);
        for chunk in head.chunks_mut(cols).chain(rest.chunks_mut(cols)) {
            let f = chunk[c];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for j in c..cols {
                if pivot_row[j] != 0 {
                    chunk[j] = (chunk[j] + nf * pivot_row[j]) % p;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    a.truncate(rank * cols);
    (pivots, a)
}

/// `a/b` with `a = u b mod m` and `|a|, b <= sqrt(m/2)`.
fn rational_reconstruct(u: &Integer, m: &Integer) -> Option<Rational> {
    if *u == 0 {
        return Some(Rational::new());
    }
    let bound = Integer::from(m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.clone());
    let (mut t0, mut t1) = (Integer::new(), Integer::from(1));
    while r1 > bound {
        let (q, r) = r0.div_rem_floor(r1.clone());
        r0 = std::mem::replace(&mut r1, r);
        let t = Integer::from(&t0 - &q * &t1);
        t0 = std::mem::replace(&mut t1, t);
    }
    if t1.cmp0() == Ordering::Equal || Integer::from(t1.abs_ref()) > bound {
        return None;
    }
    let g = Integer::from(r1.gcd_ref(&t1));
    if g != 1 {
        return None;
    }
    Some(Rational::from((r1, t1)))
}

/// Better pivot pattern: larger rank, then lexicographically smaller.
fn better(a: &[usize], b: &[usize]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a < b)
}

/// Certified reduced row echelon form via modular images, or `None` when the
/// lift does not stabilize within the prime budget.
pub fn modular_rref(m: &Mat<Rational>) -> Option<Echelon<Rational>> {
    let ints = IntRows::from_rational(m);
    let (rows, cols) = (ints.rows, ints.cols);
    let mut best: Option<Vec<usize>> = None;
    let mut residues: Vec<Integer> = Vec::new();
    let mut modulus = Integer::from(1);
    let mut last: Option<Vec<Rational>> = None;
    for p in primes().take(MAX_PRIMES) {
        let (piv, red) = rref_mod(ints.reduce(p), rows, cols, p);
        match &best {
            Some(b) if better(b, &piv) => continue,
            Some(b) if *b == piv => {}
            _ => {
                best = Some(piv.clone());
                residues = vec![Integer::new(); red.len()];
                modulus = Integer::from(1);
                last = None;
            }
        }
        // Chinese remaindering of every entry of the pivot rows
        let m_inv = inv_mod(Integer::from(modulus.mod_u(p as u32)).to_u64().expect("small"), p);
        for (x, &r) in residues.iter_mut().zip(&red) {
            let xm = x.mod_u(p as u32) as u64;
            let delta = (r + p - xm) % p * m_inv % p;
            if delta != 0 {
                *x += Integer::from(&modulus * delta);
            }
        }
        modulus *= p;
        let lifted: Option<Vec<Rational>> = residues.iter().map(|x| rational_reconstruct(x, &modulus)).collect();
        let Some(lifted) = lifted else { continue };
        let stable = last.as_ref() == Some(&lifted);
        last = Some(lifted.clone());
        if !stable {
            continue;
        }
        let pivots = best.clone().expect("set above");
        let r = pivots.len();
        let reduced = Mat::from_vec(r, cols, lifted);
        if certify(&ints, &reduced, &pivots) {
            // zero rows below the pivot rows, as elimination leaves them
            let padded = Mat::from_fn(rows, cols, |i, j| {
                if i < r {
                    reduced[(i, j)].clone()
                } else {
                    Rational::new()
                }
            });
            return Some(Echelon { reduced: padded, pivots });
        }
    }
    None
}

/// Checks `row = sum_k row[pivot_k] * R_k` for every input row.
fn certify(ints: &IntRows, reduced: &Mat<Rational>, pivots: &[usize]) -> bool {
    let cols = ints.cols;
    // R = Rint / L with a common denominator L
    let mut l = Integer::from(1);
    for x in reduced.entries() {
        l.lcm_mut(x.denom());
    }
    let rint: Vec<Integer> = reduced
        .entries()
        .iter()
        .map(|x| Integer::from(x.numer() * Integer::from(&l / x.denom())))
        .collect();
    let small = |v: &Integer| v.significant_bits() < 40;
    let fits = small(&l) && rint.iter().all(small) && ints.data.iter().all(small);
    for row in 0..ints.rows {
        let a = &ints.data[row * cols..(row + 1) * cols];
        if fits {
            let a64: Vec<i128> = a.iter().map(|x| x.to_i64().expect("small") as i128).collect();
            let l64 = l.to_i64().expect("small") as i128;
            let mut acc: Vec<i128> = a64.iter().map(|x| x * l64).collect();
            for (k, &pc) in pivots.iter().enumerate() {
                let f = a64[pc];
                if f == 0 {
                    continue;
                }
                for (c, v) in acc.iter_mut().enumerate() {
                    let rv = rint[k * cols + c].to_i64().expect("small") as i128;
                    *v -= f * rv;
                }
            }
            if acc.iter().any(|&v| v != 0) {
                return false;
            }
        } else {
            let mut acc: Vec<Integer> = a.iter().map(|x| Integer::from(x * &l)).collect();
            for (k, &pc) in pivots.iter().enumerate() {
                let f = &a[pc];
                if *f == 0 {
                    continue;
                }
                for (c, v) in acc.iter_mut().enumerate() {
                    *v -= Integer::from(f * &rint[k * cols + c]);
                }
            }
            if acc.iter().any(|v| *v != 0) {
                return false;
            }
        }
    }
    true
}

/// Exact product of rational matrices through integer arithmetic: rows of
/// `a` and columns of `b` are cleared of denominators first.
pub fn rational_matmul(a: &Mat<Rational>, b: &Mat<Rational>) -> Mat<Rational> {
    assert_eq!(a.cols(), b.rows(), "matmul shape mismatch");
    let (n, k, m) = (a.rows(), a.cols(), b.cols());
    let arows: Vec<(Vec<Integer>, Integer)> = (0..n).map(|r| scaled(a.row(r))).collect();
    let bt = b.transpose();
    let bcols: Vec<(Vec<Integer>, Integer)> = (0..m).map(|c| scaled(bt.row(c))).collect();
    let small = |v: &[Integer]| v.iter().all(|x| x.significant_bits() < 31);
    let fast = arows.iter().all(|(v, _)| small(v)) && bcols.iter().all(|(v, _)| small(v)) && k < (1 << 30);
    let a64: Vec<Vec<i64>> = if fast {
        arows.iter().map(|(v, _)| v.iter().map(|x| x.to_i64().expect("small")).collect()).collect()
    } else {
        Vec::new()
    };
    let b64: Vec<Vec<i64>> = if fast {
        bcols.iter().map(|(v, _)| v.iter().map(|x| x.to_i64().expect("small")).collect()).collect()
    } else {
        Vec::new()
    };
    Mat::from_fn(n, m, |r, c| {
        let num = if fast {
            let s: i128 = a64[r].iter().zip(&b64[c]).map(|(&x, &y)| x as i128 * y as i128).sum();
            Integer::from(s)
        } else {
            let mut s = Integer::new();
            for (x, y) in arows[r].0.iter().zip(&bcols[c].0) {
                if *x != 0 && *y != 0 {
                    s += x * y;
                }
            }
            s
        };
        if num == 0 {
            return Rational::new();
        }
        let den = Integer::from(&arows[r].1 * &bcols[c].1);
        Rational::from((num, den))
    })
}

/// `(v * L, L)` with `L` the lcm of the denominators.
fn scaled(v: &[Rational]) -> (Vec<Integer>, Integer) {
    let mut l = Integer::from(1);
    for x in v {
        if x.denom() != &1 {
            l.lcm_mut(x.denom());
        }
    }
    let ints = v
        .iter()
        .map(|x| {
            if x.cmp0() == Ordering::Equal {
                Integer::new()
            } else {
                Integer::from(x.numer() * Integer::from(&l / x.denom()))
            }
        })
        .collect();
    (ints, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::bareiss_rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rank: usize, seed: u64) -> Mat<Rational> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = || Rational::from((rng.gen_range(-9..=9), rng.gen_range(1..=4)));
        let left = Mat::from_fn(rows, rank, |_, _| r());
        let right = Mat::from_fn(rank, cols, |_, _| r());
        left.matmul(&right)
    }

    #[test]
    fn reconstruction() {
        let m = Integer::from(1_000_003u64) * Integer::from(999_983u64);
        let x = Rational::from((-7, 12));
        let u = Integer::from(x.numer() * Integer::from(x.denom().invert_ref(&m).unwrap())) % &m;
        let u = if u < 0 { u + &m } else { u };
        assert_eq!(rational_reconstruct(&u, &m), Some(x));
    }

    #[test]
    fn agrees_with_bareiss() {
        for (rows, cols, rank, seed) in [(12, 9, 4, 1), (9, 12, 9, 2), (20, 20, 13, 3), (7, 7, 0, 4)] {
            let m = random(rows, cols, rank, seed);
            let exact = bareiss_rational(&m);
            let modular = modular_rref(&m).expect("lift");
            assert_eq!(modular.pivots, exact.pivots);
            assert_eq!(modular.reduced, exact.reduced);
        }
    }

    #[test]
    fn integer_matmul_matches() {
        let a = random(6, 5, 3, 7);
        let b = random(5, 4, 4, 8);
        assert_eq!(rational_matmul(&a, &b), a.matmul(&b));
    }
}

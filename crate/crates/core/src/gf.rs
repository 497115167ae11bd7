//! Small finite fields as exhaustive tables.

use crate::graphs::GraphError;

/// `GF(p^k)` for `p^k` in {2, 3, 4, 5, 7, 8, 9}.
///
/// Elements are `0..order`, read as base-`p` digit strings of polynomial
/// coefficients (least significant digit = constant term).
#[derive(Debug, Clone)]
pub struct FiniteField {
    p: usize,
    k: usize,
    order: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    inv: Vec<usize>,
}

impl FiniteField {
    pub fn new(order: usize) -> Result<Self, GraphError> {
        // modulus coefficients of t^k, constant term first, leading 1 omitted
        let (p, k, modulus): (usize, usize, &[usize]) = match order {
            2 => (2, 1, &[]),
            3 => (3, 1, &[]),
            5 => (5, 1, &[]),
            7 => (7, 1, &[]),
            4 => (2, 2, &[1, 1]),    // t^2 + t + 1
            8 => (2, 3, &[1, 1, 0]), // t^3 + t + 1
            9 => (3, 2, &[1, 0]),    // t^2 + 1
            _ => return Err(GraphError::UnsupportedFieldOrder(order)),
        };
        let digits = |x: usize| -> Vec<usize> {
            let mut d = vec![0; k];
            let mut x = x;
            for slot in d.iter_mut() {
                *slot = x % p;
                x /= p;
            }
            d
        };
        let undigits = |d: &[usize]| d.iter().rev().fold(0, |acc, &c| acc * p + c);
        let mut add = vec![0; order * order];
        let mut mul = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                let (dx, dy) = (digits(x), digits(y));
                let sum: Vec<usize> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[x * order + y] = undigits(&sum);
                let mut prod = vec![0; 2 * k];
                for (i, a) in dx.iter().enumerate() {
                    for (j, b) in dy.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + a * b) % p;
                    }
                }
                // reduce t^m for m >= k using t^k = -(modulus)
                for m in (k..2 * k).rev() {
                    let c = prod[m];
                    if c == 0 {
                        continue;
                    }
                    prod[m] = 0;
                    for (j, &mc) in modulus.iter().enumerate() {
                        prod[m - k + j] = (prod[m - k + j] + c * (p - mc % p)) % p;
                    }
                }
                mul[x * order + y] = undigits(&prod[..k]);
            }
        }
        let neg = (0..order)
            .map(|x| (0..order).find(|&y| add[x * order + y] == 0).expect("additive inverse"))
            .collect();
        let inv = (0..order)
            .map(|x| {
                if x == 0 {
                    0
                } else {
                    (1..order).find(|&y| mul[x * order + y] == 1).expect("field has inverses")
                }
            })
            .collect();
        Ok(FiniteField {
            p,
            k,
            order,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.order + y]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order + y]
    }

    pub fn neg(&self, x: usize) -> usize {
        self.neg[x]
    }

    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }

    /// Multiplicative inverse; `inv(0) = 0`.
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    pub fn pow(&self, x: usize, e: usize) -> usize {
        (0..e).fold(1, |acc, _| self.mul(acc, x))
    }

    /// `x -> x^p`.
    pub fn frobenius(&self, x: usize) -> usize {
        self.pow(x, self.p)
    }

    /// Rank of a row-major `rows x cols` matrix.
    pub fn rank(&self, rows: usize, cols: usize, entries: &[usize]) -> usize {
        let mut a = entries.to_vec();
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
                continue;
            };
            for j in 0..cols {
                a.swap(rank * cols + j, p * cols + j);
            }
            let inv = self.inv(a[rank * cols + c]);
            for j in 0..cols {
                a[rank * cols + j] = self.mul(a[rank * cols + j], inv);
            }
            for r in 0..rows {
                if r == rank || a[r * cols + c] == 0 {
                    continue;
                }
                let f = a[r * cols + c];
                for j in 0..cols {
                    let t = self.mul(f, a[rank * cols + j]);
                    a[r * cols + j] = self.sub(a[r * cols + j], t);
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_hold_exhaustively() {
        for order in [2, 3, 4, 5, 7, 8, 9] {
            let f = FiniteField::new(order).unwrap();
            for x in 0..order {
                assert_eq!(f.add(x, 0), x);
                assert_eq!(f.mul(x, 1), x);
                assert_eq!(f.add(x, f.neg(x)), 0);
                if x != 0 {
                    assert_eq!(f.mul(x, f.inv(x)), 1, "GF({order}) inverse of {x}");
                }
                for y in 0..order {
                    assert_eq!(f.add(x, y), f.add(y, x));
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                    if x != 0 && y != 0 {
                        assert_ne!(f.mul(x, y), 0, "zero divisor in GF({order})");
                    }
                    for z in 0..order {
                        assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                        assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                        assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_of_gf4_has_order_two() {
        let f = FiniteField::new(4).unwrap();
        for x in 0..4 {
            assert_eq!(f.frobenius(f.frobenius(x)), x);
        }
        // the fixed field is GF(2)
        let fixed: Vec<usize> = (0..4).filter(|&x| f.frobenius(x) == x).collect();
        assert_eq!(fixed, vec![0, 1]);
    }

    #[test]
    fn unsupported_orders() {
        assert!(matches!(FiniteField::new(6), Err(GraphError::UnsupportedFieldOrder(6))));
        assert!(FiniteField::new(16).is_err());
    }

    #[test]
    fn rank_over_gf2() {
        let f = FiniteField::new(2).unwrap();
        assert_eq!(f.rank(2, 2, &[1, 1, 1, 1]), 1);
        assert_eq!(f.rank(3, 3, &[1, 0, 0, 0, 1, 0, 1, 1, 0]), 2);
        let rank_one = (0..512usize)
            .filter(|m| {
                let e: Vec<usize> = (0..9).map(|b| (m >> b) & 1).collect();
                f.rank(3, 3, &e) == 1
            })
            .count();
        assert_eq!(rank_one, 49);
    }
}

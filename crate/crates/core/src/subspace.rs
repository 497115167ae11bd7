//! Subspaces of `F^n` with a canonical basis, and projectors of direct sums.

use crate::linalg::{FieldElem, LinalgError, Mat};

/// A subspace of `F^n`.
///
/// The basis is stored column-wise in reduced column-echelon form (the
/// transpose is in reduced row-echelon form), so equal subspaces have equal
/// bases.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Mat<F>,
}

impl<F: FieldElem> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::identity(ambient),
        }
    }

    /// The span of the columns of `vectors`.
    pub fn span(vectors: &Mat<F>) -> Self {
        let ambient = vectors.rows();
        if vectors.cols() == 0 {
            return Subspace::zero(ambient);
        }
        let e = vectors.transpose().rref();
        Subspace {
            ambient,
            basis: e.row_basis().transpose(),
        }
    }

    pub fn span_of(ambient: usize, vectors: &[Vec<F>]) -> Self {
        Subspace::span(&Mat::from_columns(ambient, vectors))
    }

    /// The span of the standard basis vectors indexed by `coords` (sorted).
    pub fn coordinate(ambient: usize, coords: &[usize]) -> Self {
        let mut sorted = coords.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let basis = Mat::from_fn(ambient, sorted.len(), |r, c| {
            if sorted[c] == r {
                F::one()
            } else {
                F::zero()
            }
        });
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Mat<F> {
        &self.basis
    }

    pub fn into_basis(self) -> Mat<F> {
        self.basis
    }

    fn check_ambient(&self, other: &Self) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        Ok(Subspace::span(&self.basis.hstack(&other.basis)))
    }

    /// `U ∩ W` from the kernel of `[basis(U) | -basis(W)]`.
    pub fn intersect(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient));
        }
        let neg = other.basis.map(F::negated);
        let k = self.basis.hstack(&neg).kernel();
        let top = Mat::from_fn(self.dim(), k.cols(), |r, c| k[(r, c)].clone());
        Ok(Subspace::span(&self.basis.matmul(&top)))
    }

    /// `{ w in W : <w, u> = 0 for all u in U }` under `<u, v> = u^t conj(v)`.
    pub fn orth_complement_within(u: &Self, w: &Self) -> Result<Self, LinalgError> {
        u.check_ambient(w)?;
        if u.is_zero() || w.is_zero() {
            return Ok(w.clone());
        }
        let gram = u.basis.conj_transpose().matmul(&w.basis);
        let k = gram.kernel();
        Ok(Subspace::span(&w.basis.matmul(&k)))
    }

    /// Intersection with the coordinate subspace on `coords`.
    pub fn restrict_to_coordinates(&self, coords: &[usize]) -> Self {
        let mut inside = vec![false; self.ambient];
        for &c in coords {
            inside[c] = true;
        }
        let outside: Vec<usize> = (0..self.ambient).filter(|&r| !inside[r]).collect();
        if outside.is_empty() {
            return self.clone();
        }
        let k = self.basis.select_rows(&outside).kernel();
        Subspace::span(&self.basis.matmul(&k))
    }

    pub fn contains_vector(&self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.ambient);
        if v.iter().all(F::is_zero) {
            return true;
        }
        let aug = self.basis.hstack(&Mat::from_columns(self.ambient, &[v.to_vec()]));
        aug.rank() == self.dim()
    }

    pub fn contains(&self, other: &Self) -> bool {
        if other.is_zero() {
            return true;
        }
        self.basis.hstack(&other.basis).rank() == self.dim()
    }

    /// Recomputes the echelon form; a fixed point for canonical subspaces.
    pub fn recanonicalize(&self) -> Self {
        Subspace::span(&self.basis)
    }
}

/// A direct-sum decomposition `F^n = ⊕ cells` together with the change of
/// basis `C` (columns = concatenated cell bases) and its inverse.
#[derive(Clone, Debug)]
pub struct DirectSum<F> {
    n: usize,
    offsets: Vec<usize>,
    change: Mat<F>,
    inverse: Mat<F>,
}

impl<F: FieldElem> DirectSum<F> {
    pub fn new(cells: &[&Subspace<F>]) -> Result<Self, LinalgError> {
        let n = cells.first().map_or(0, |c| c.ambient());
        for c in cells {
            if c.ambient() != n {
                return Err(LinalgError::AmbientMismatch(n, c.ambient()));
            }
        }
        let mut offsets = Vec::with_capacity(cells.len() + 1);
        let mut total = 0;
        for c in cells {
            offsets.push(total);
            total += c.dim();
        }
        offsets.push(total);
        let parts: Vec<&Mat<F>> = cells.iter().map(|c| c.basis()).collect();
        let change = Mat::hstack_all(n, &parts);
        if total != n {
            let rank = change.rank();
            return Err(LinalgError::NotADirectSum { rank, n });
        }
        let inverse = change.inverse().map_err(|_| LinalgError::NotADirectSum {
            rank: change.rank(),
            n,
        })?;
        Ok(DirectSum {
            n,
            offsets,
            change,
            inverse,
        })
    }

    /// Builds from an already verified change of basis and inverse.
    pub fn from_parts(offsets: Vec<usize>, change: Mat<F>, inverse: Mat<F>) -> Self {
        DirectSum {
            n: change.rows(),
            offsets,
            change,
            inverse,
        }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn cell_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn cell_range(&self, cell: usize) -> std::ops::Range<usize> {
        self.offsets[cell]..self.offsets[cell + 1]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn change(&self) -> &Mat<F> {
        &self.change
    }

    pub fn inverse(&self) -> &Mat<F> {
        &self.inverse
    }

    /// Projector onto `cell` along the other cells: `C S C^-1`.
    pub fn projector(&self, cell: usize) -> Mat<F> {
        let idx: Vec<usize> = self.cell_range(cell).collect();
        if idx.is_empty() {
            return Mat::zeros(self.n, self.n);
        }
        self.change.select_columns(&idx).matmul(&self.inverse.select_rows(&idx))
    }

    /// Projector onto the sum of `cells`.
    pub fn projector_onto(&self, cells: &[usize]) -> Mat<F> {
        let idx: Vec<usize> = cells.iter().flat_map(|&c| self.cell_range(c)).collect();
        if idx.is_empty() {
            return Mat::zeros(self.n, self.n);
        }
        self.change.select_columns(&idx).matmul(&self.inverse.select_rows(&idx))
    }

    /// `sum_cell weight(cell) * projector(cell)`.
    pub fn weighted_sum(&self, weights: &[F]) -> Mat<F> {
        assert_eq!(weights.len(), self.cell_count());
        let mut scaled = self.change.clone();
        for (cell, w) in weights.iter().enumerate() {
            for k in self.cell_range(cell) {
                for r in 0..self.n {
                    scaled[(r, k)] = scaled[(r, k)].times(w);
                }
            }
        }
        scaled.matmul(&self.inverse)
    }

    /// Coordinates of `v` in the concatenated cell bases.
    pub fn coordinates(&self, v: &[F]) -> Vec<F> {
        self.inverse.matvec(v)
    }

    /// The component of `v` in `cell`.
    pub fn component(&self, cell: usize, v: &[F]) -> Vec<F> {
        let coords = self.coordinates(v);
        let mut out = vec![F::zero(); self.n];
        for k in self.cell_range(cell) {
            for (r, o) in out.iter_mut().enumerate() {
                o.add_assign_product(&self.change[(r, k)], &coords[k]);
            }
        }
        out
    }
}

/// Projection onto `cells[index]` along the remaining cells.
pub fn projector_from_direct_sum<F: FieldElem>(
    cells: &[&Subspace<F>],
    index: usize,
) -> Result<Mat<F>, LinalgError> {
    Ok(DirectSum::new(cells)?.projector(index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GroundField, QSign, Scalar};
    use rug::Rational;

    fn e(n: usize, i: usize) -> Vec<Rational> {
        (0..n).map(|k| Rational::from((k == i) as i64)).collect()
    }

    #[test]
    fn sum_with_zero_and_itself() {
        let u = Subspace::span_of(3, &[vec![1.into(), 2.into(), 3.into()]]);
        let z = Subspace::<Rational>::zero(3);
        assert_eq!(u.sum(&z).unwrap(), u);
        assert_eq!(u.sum(&u).unwrap(), u);
        let ab = Subspace::span_of(3, &[e(3, 0)]).sum(&Subspace::span_of(3, &[e(3, 1)])).unwrap();
        assert_eq!(ab.dim(), 2);
    }

    #[test]
    fn coordinate_intersection() {
        let u = Subspace::<Rational>::coordinate(3, &[0, 1]);
        let w = Subspace::<Rational>::coordinate(3, &[1, 2]);
        assert_eq!(u.intersect(&w).unwrap(), Subspace::coordinate(3, &[1]));
        assert_eq!(u.intersect(&Subspace::full(3)).unwrap(), u);
        assert_eq!(u.restrict_to_coordinates(&[1, 2]), Subspace::coordinate(3, &[1]));
    }

    #[test]
    fn ambient_mismatch() {
        let u = Subspace::<Rational>::full(2);
        let w = Subspace::<Rational>::full(3);
        assert_eq!(u.sum(&w), Err(LinalgError::AmbientMismatch(2, 3)));
        assert!(u.intersect(&w).is_err());
        assert!(Subspace::orth_complement_within(&u, &w).is_err());
    }

    #[test]
    fn hermitian_complement_uses_conjugation() {
        // <w, (1, q)> = w0 + w1 * conj(q) = w0 - q w1 for b = -2, so w = (q, 1)
        let k = GroundField::new(-2, QSign::Plus).unwrap();
        let u = Subspace::span_of(2, &[vec![k.int(1), k.q()]]);
        let c = Subspace::orth_complement_within(&u, &Subspace::full(2)).unwrap();
        assert_eq!(c.dim(), 1);
        let w = c.basis().col(0);
        let inner = &(&w[0] * &Scalar::one()) + &(&w[1] * &k.q().conj());
        assert!(inner.is_zero());
        assert_eq!(c, Subspace::span_of(2, &[vec![k.q(), k.int(1)]]));
    }

    #[test]
    fn complement_of_zero_and_of_self() {
        let w = Subspace::<Rational>::coordinate(4, &[0, 2]);
        let z = Subspace::zero(4);
        assert_eq!(Subspace::orth_complement_within(&z, &w).unwrap(), w);
        assert!(Subspace::orth_complement_within(&w, &w).unwrap().is_zero());
    }

    #[test]
    fn coordinate_projectors() {
        let a = Subspace::<Rational>::coordinate(2, &[0]);
        let b = Subspace::<Rational>::coordinate(2, &[1]);
        let p = projector_from_direct_sum(&[&a, &b], 0).unwrap();
        assert_eq!(p, Mat::diagonal(&[1.into(), 0.into()]));
        let overlap = Subspace::<Rational>::full(2);
        assert!(matches!(
            projector_from_direct_sum(&[&a, &overlap], 0),
            Err(LinalgError::NotADirectSum { .. })
        ));
    }

    #[test]
    fn skew_projectors_partition_identity() {
        let a = Subspace::span_of(2, &[vec![1.into(), 1.into()]]);
        let b = Subspace::span_of(2, &[vec![1.into(), Rational::from(-2)]]);
        let ds = DirectSum::new(&[&a, &b]).unwrap();
        let (p, r) = (ds.projector(0), ds.projector(1));
        assert_eq!(p.add(&r), Mat::identity(2));
        assert_eq!(p.matmul(&p), p);
        assert!(p.matmul(&r).is_zero());
        assert_eq!(ds.weighted_sum(&[1.into(), 0.into()]), p);
    }
}
